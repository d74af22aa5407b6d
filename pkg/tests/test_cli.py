import json

import pytest
from click.testing import CliRunner

from consensus_spectra import config
from consensus_spectra.cli import main
from consensus_spectra.graphs import make_family, write_graph_file


@pytest.fixture
def runner():
    yield CliRunner()
    config.set_tolerances(config.Tolerances())


def test_bounds_csv_and_exit_code(runner):
    r = runner.invoke(main, ["bounds", "--family", "ring", "--size", "21", "--rule", "equal_neighbor"])
    assert r.exit_code == 0
    header, row = r.output.strip().split("\n")
    assert header.startswith("graph,rule,n,lambda2")
    assert row.endswith(",True")


def test_bounds_json_butterfly(runner):
    r = runner.invoke(main, ["bounds", "--family", "butterfly", "--size", "5", "--format", "json"])
    assert r.exit_code == 0
    (rep,) = json.loads(r.output)
    for key in ("beta_a", "beta_b", "beta_ds", "cheeger_lower", "cheeger_upper"):
        assert rep[key] is not None


def test_bounds_from_graph_file(runner, tmp_path):
    write_graph_file(make_family("star", 7), tmp_path / "g.txt")
    r = runner.invoke(main, ["bounds", "--graph-file", str(tmp_path / "g.txt"), "--rule", "metropolis"])
    assert r.exit_code == 0
    assert ",metropolis,7," in r.output


def test_bounds_reports_file_errors(runner, tmp_path):
    (tmp_path / "bad.txt").write_text("n 3\n1 2\n2 7\n")
    r = runner.invoke(main, ["bounds", "--graph-file", str(tmp_path / "bad.txt")])
    assert r.exit_code != 0
    assert "bad.txt:3:" in r.output


def test_table_is_deterministic_and_flags_agreement(runner, tmp_path):
    args = ["table", "--family", "ring", "--family", "two_star"]
    a = runner.invoke(main, args)
    b = runner.invoke(main, args)
    assert a.exit_code == 0
    assert a.output == b.output
    rows = a.output.strip().split("\n")[1:]
    assert len(rows) == 6 and all(",True," in r for r in rows)


def test_table_nonzero_when_a_row_disagrees(runner):
    r = runner.invoke(main, ["table", "--family", "star", "--rule", "fixed_weight"])
    assert r.exit_code == 1
    assert ",False," in r.output


def test_table_marks_unsupported_pairs(runner):
    r = runner.invoke(main, ["table", "--family", "butterfly", "--sizes", "4"])
    assert r.exit_code == 1
    assert "n/a" in r.output


def test_table_sizes_parsing(runner):
    r = runner.invoke(main, ["table", "--family", "ring", "--sizes", "x"])
    assert r.exit_code == 2


def test_simulate_ot(runner, tmp_path):
    r = runner.invoke(
        main,
        ["simulate", "--scenario", "ot_two_star", "--size", "12", "--steps", "100000", "--format", "json"],
    )
    assert r.exit_code == 0
    assert json.loads(r.output)["rho_hat"] >= 0.875


def test_simulate_writes_csv_and_header(runner, tmp_path):
    out = tmp_path / "traj.csv"
    args = ["simulate", "--family", "barbell", "--size", "3", "--x0", "eigenvector", "--steps", "200",
            "--out", str(out)]
    assert runner.invoke(main, args).exit_code == 0
    first = out.read_text()
    assert runner.invoke(main, args).exit_code == 0
    assert out.read_text() == first
    head = json.loads(out.with_suffix(".json").read_text())
    assert head["rho_hat"] == pytest.approx(0.97297, abs=1e-5)


def test_simulate_constant_start_converges(runner):
    r = runner.invoke(main, ["simulate", "--family", "ring", "--size", "5", "--x0", "constant", "--format", "json"])
    assert json.loads(r.output)["converged"] is True


def test_simulate_needs_one_source(runner):
    r = runner.invoke(main, ["simulate", "--size", "5"])
    assert r.exit_code == 2


def test_tol_override(runner):
    r = runner.invoke(main, ["--tol-override", "bogus=1", "bounds", "--family", "ring", "--size", "5"])
    assert r.exit_code == 2
    r = runner.invoke(main, ["--tol-override", "max_enum_n=4", "bounds", "--family", "ring", "--size", "5",
                             "--format", "json"])
    assert r.exit_code == 0
    assert json.loads(r.output)[0]["eta_bound"] is None


def test_threads_env(runner, monkeypatch):
    monkeypatch.setenv("CONSENSUS_SPECTRA_THREADS", "2")
    r = runner.invoke(main, ["table", "--family", "ring"])
    assert r.exit_code == 0
    monkeypatch.setenv("CONSENSUS_SPECTRA_THREADS", "x")
    assert runner.invoke(main, ["table", "--family", "ring"]).exit_code == 2


def test_verify_failure_exit_code(runner):
    r = runner.invoke(main, ["verify", "slow_examples", "--format", "json"])
    # the published butterfly cut value is not reproduced
    assert r.exit_code == 1
    out = r.output[: r.output.rindex("}") + 1]
    d = json.loads(out)
    failed = {rec["name"] for rec in d["records"] if not rec["passed"]}
    assert failed == {f"butterfly-{m}-cut_value" for m in range(3, 8)}
