"""Command-line front end: ``consensus-spectra {table,bounds,simulate,verify}``.

Every command writes CSV (default) or JSON to stdout or ``--out`` and exits
with status 0 iff all checks it performs pass.
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click
import numpy as np

from . import bounds, config, sim
from . import matrices as mx
from . import spectral as sp
from . import table as tb
from . import verify as vf
from .graphs.core import GraphError, GraphSchedule
from .graphs.families import FAMILIES, make_family
from .graphs.io import read_graph_file, read_schedule_file

THREADS_ENV = "CONSENSUS_SPECTRA_THREADS"


def _workers() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise click.UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def _pmap(fn, items: list) -> list:
    """Order-preserving map, fanned out to worker processes when allowed."""
    workers = min(_workers(), len(items))
    if workers <= 1:
        return [fn(*it) for it in items]
    with ProcessPoolExecutor(workers) as pool:
        return list(pool.map(fn, *zip(*items)))


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def _csv(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else ("" if v is None else v) for k, v in r.items()})
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _parse_sizes(raw: str | None) -> list[int] | None:
    if raw is None:
        return None
    try:
        sizes = [int(s) for s in raw.split(",") if s.strip()]
    except ValueError:
        raise click.BadParameter(f"--sizes must be comma-separated integers, got {raw!r}") from None
    if not sizes:
        raise click.BadParameter("--sizes is empty")
    return sizes


def _apply_tolerances(overrides: tuple[str, ...]) -> None:
    changes = {}
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise click.BadParameter(f"expected k=v, got {item!r}", param_hint="--tol-override")
        changes[key.strip()] = value.strip()
    if changes:
        try:
            config.set_tolerances(config.TOL.override(**changes))
        except (KeyError, ValueError) as e:
            raise click.BadParameter(str(e), param_hint="--tol-override") from None


_format = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
_out = click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write here instead of stdout.")
_seed = click.option("--seed", type=int, default=0, show_default=True)


@click.group()
@click.option("--tol-override", multiple=True, metavar="K=V", help="Override a numerical tolerance.")
@click.version_option(package_name="consensus-spectra")
def main(tol_override: tuple[str, ...]) -> None:
    """Convergence-rate bounds for averaging algorithms on graphs."""
    _apply_tolerances(tol_override)


# -- table ---------------------------------------------------------------------


TABLE_COLUMNS = (
    "family", "size", "n", "rule", "rate_bound", "gap", "reference_gap", "rel_dev", "agrees", "note",
)


def _table_row(family: str, size: int, rule: str) -> dict:
    try:
        r = tb.table_row(family, size, rule)
    except (KeyError, GraphError, mx.MatrixError) as e:
        return {"family": family, "size": size, "n": None, "rule": rule, "rate_bound": None,
                "gap": None, "reference_gap": None, "rel_dev": None, "agrees": "n/a",
                "note": str(e).strip("'\"")}
    return {"family": family, "size": size, "n": r.n, "rule": rule, "rate_bound": r.rate_bound,
            "gap": r.gap, "reference_gap": r.reference_gap, "rel_dev": r.rel_dev,
            "agrees": r.agrees, "note": r.note}


@main.command()
@click.option("--family", multiple=True, type=click.Choice(FAMILIES), help="Repeatable; default: all table families.")
@click.option("--sizes", default=None, help="Comma-separated size parameters (default: smallest with n >= 64).")
@click.option("--rule", "rules", multiple=True, type=click.Choice(tb.TABLE_RULES))
@_format
@_out
def table(family, sizes, rules, fmt, out):
    """Computed rate bounds next to the published closed forms."""
    families = family or tb.TABLE_FAMILIES
    rules = rules or tb.TABLE_RULES
    size_list = _parse_sizes(sizes)
    items = [
        (f, s, r)
        for f in families
        for s in (size_list or [tb.LARGE_SIZES.get(f, 0)])
        for r in rules
    ]
    rows = _pmap(_table_row, items)
    _emit(_json(rows) if fmt == "json" else _csv(rows, TABLE_COLUMNS), out)
    sys.exit(0 if all(r["agrees"] is True for r in rows) else 1)


# -- bounds ---------------------------------------------------------------------


def _graph_from(family, size, graph_file):
    if graph_file:
        if family:
            raise click.UsageError("give either --graph-file or --family, not both")
        return read_graph_file(graph_file)
    if not family or size is None:
        raise click.UsageError("need --family and --size, or --graph-file")
    return make_family(family, size)


@main.command("bounds")
@click.option("--family", type=click.Choice(FAMILIES))
@click.option("--size", type=int)
@click.option("--graph-file", type=click.Path(exists=True, dir_okay=False))
@click.option("--rule", "rules", multiple=True, type=click.Choice(mx.RULES), help="Repeatable; default: equal_neighbor.")
@click.option("--q", type=int, default=None, help="FixedWeight degree bound (default d_max).")
@_format
@_out
def bounds_cmd(family, size, graph_file, rules, q, fmt, out):
    """Full bound report for one graph, with soundness flags."""
    try:
        g = _graph_from(family, size, graph_file)
    except GraphError as e:
        raise click.ClickException(str(e)) from None
    reports = []
    for rule in rules or ("equal_neighbor",):
        try:
            reports.append(bounds.full_report(g, rule, q))
        except mx.MatrixError as e:
            raise click.ClickException(f"{rule}: {e}") from None
    if fmt == "json":
        text = _json([r.to_dict() for r in reports])
    else:
        text = bounds.reports_to_csv(reports)
    _emit(text, out)
    sys.exit(0 if all(r.all_sound for r in reports) else 1)


# -- simulate -------------------------------------------------------------------


def _schedule_from(scenario, family, size, schedule_file) -> GraphSchedule:
    given = sum(x is not None for x in (scenario, family, schedule_file))
    if given != 1:
        raise click.UsageError("give exactly one of --scenario, --family or --schedule-file")
    if schedule_file:
        return read_schedule_file(schedule_file)
    if size is None:
        raise click.UsageError("--size is required with --scenario or --family")
    if scenario == "ot_two_star":
        return sim.ot_two_star_schedule(size)
    return GraphSchedule.constant(make_family(family, size))


def _x0(kind: str, schedule: GraphSchedule, rule: str, q, seed: int) -> np.ndarray:
    n = schedule.n
    if kind == "random":
        return sim.random_x0(n, np.random.default_rng(seed))
    if kind == "constant":
        return np.ones(n)
    # second eigenvector of the first step's matrix
    a = mx.build(rule, schedule.graph_at(1), q)
    pi = mx.perron(a).entries
    s = sp.symmetrized(a, pi)
    _, vecs = np.linalg.eigh(s)
    v = vecs[:, -2] / np.sqrt(pi)
    return v / np.abs(v).max()


@main.command("simulate")
@click.option("--scenario", type=click.Choice(["ot_two_star"]), default=None)
@click.option("--family", type=click.Choice(FAMILIES), default=None, help="Constant schedule on a family graph.")
@click.option("--size", type=int)
@click.option("--schedule-file", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--rule", type=click.Choice(mx.RULES), default="equal_neighbor", show_default=True)
@click.option("--q", type=int, default=None)
@click.option("--x0", "x0_kind", type=click.Choice(["random", "eigenvector", "constant"]), default="random",
              show_default=True)
@click.option("--steps", type=click.IntRange(1, sim.MAX_STEPS), default=1000, show_default=True)
@_seed
@_format
@_out
def simulate_cmd(scenario, family, size, schedule_file, rule, q, x0_kind, steps, seed, fmt, out):
    """Run x(t) = A(t) x(t-1); CSV t,V,N (or a JSON header with rho_hat)."""
    try:
        schedule = _schedule_from(scenario, family, size, schedule_file)
        x0 = _x0(x0_kind, schedule, rule, q, seed)
        traj = sim.simulate(schedule, rule, x0, steps, q=q, seed=seed)
    except (GraphError, mx.MatrixError, ValueError) as e:
        raise click.ClickException(str(e)) from None
    if out and fmt == "csv":
        traj.dump(Path(out).with_suffix(""))
        return
    _emit(traj.to_csv() if fmt == "csv" else _json(traj.header()), out)


# -- verify -----------------------------------------------------------------------


@main.command("verify")
@click.argument("suite", type=click.Choice(sorted(vf.SUITES)))
@_seed
@_format
@_out
def verify_cmd(suite, seed, fmt, out):
    """Run a property suite; exit status 1 on any failure."""
    checks = vf.SUITES[suite](seed=seed)
    rows = [c.to_dict() for c in checks]
    if fmt == "json":
        failed = sum(not c.passed for c in checks)
        text = _json({"suite": suite, "seed": seed, "checks": len(checks), "failed": failed, "records": rows})
    else:
        text = _csv(rows, ("suite", "name", "passed", "value", "limit", "detail"))
    _emit(text, out)
    ok = all(c.passed for c in checks)
    click.echo(f"{suite}: {sum(c.passed for c in checks)}/{len(checks)} passed", err=True)
    sys.exit(0 if ok else 1)


if __name__ == "__main__":  # pragma: no cover
    main()
