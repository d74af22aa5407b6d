"""Spectral and geometric convergence-rate bounds for averaging algorithms."""

from .bounds import (
    BoundReport,
    corollary_rate_bound,
    full_report,
    reversible_rate_bound,
    small_variation_rate_bound,
)
from .config import TOL, Tolerances
from .graphs import DirectedGraph, GraphSchedule, PathFamily, make_family
from .matrices import AssumptionError, MatrixError, StochasticMatrix, alpha, adjoint, build, gram, perron
from .sim import empirical_rate, ot_two_star_schedule, simulate
from .spectral import cheeger, cut_constants, mu, reversible_spectrum, second_singular

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "corollary_rate_bound",
    "full_report",
    "reversible_rate_bound",
    "small_variation_rate_bound",
    "TOL",
    "Tolerances",
    "DirectedGraph",
    "GraphSchedule",
    "PathFamily",
    "make_family",
    "AssumptionError",
    "MatrixError",
    "StochasticMatrix",
    "alpha",
    "adjoint",
    "build",
    "gram",
    "perron",
    "empirical_rate",
    "ot_two_star_schedule",
    "simulate",
    "cheeger",
    "cut_constants",
    "mu",
    "reversible_spectrum",
    "second_singular",
]
