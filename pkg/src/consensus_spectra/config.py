"""Numerical tolerances shared by the library, the CLI and the tests."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    row_sum: float = 1e-12
    perron_residual: float = 1e-12
    reversible: float = 1e-10
    detailed_balance: float = 1e-12
    jacobi_offdiag: float = 1e-12
    jacobi_sweeps: int = 100
    eigen_floor: float = 1e-10
    soundness: float = 1e-9
    identity: float = 1e-9
    contraction: float = 1e-10
    rate_slack: float = 5e-3
    max_enum_n: int = 22
    converged_seminorm: float = 1e-13

    def override(self, **changes: str | float) -> Tolerances:
        """Copy with fields replaced; string values are parsed to the field type."""
        kinds = {f.name: f.type for f in dataclasses.fields(self)}
        parsed = {}
        for key, value in changes.items():
            if key not in kinds:
                raise KeyError(f"unknown tolerance {key!r}; known: {sorted(kinds)}")
            parsed[key] = int(value) if kinds[key] in (int, "int") else float(value)
        return dataclasses.replace(self, **parsed)


TOL = Tolerances()


def set_tolerances(tol: Tolerances) -> Tolerances:
    """Install ``tol`` process-wide; returns the previous set."""
    global TOL
    old, TOL = TOL, tol
    return old
