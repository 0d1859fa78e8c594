"""Bundled MILP solver: branch-and-bound over a bounded dense simplex."""

from .bnb import (
    CAP_HIT,
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    Solution,
    SolverOptions,
    Violation,
    check_solution,
    solve,
)
from .lpfile import export_lp, format_lp
from .simplex import LPResult, active_kernel, available_kernels, solve_lp, use_kernel

__all__ = [
    "CAP_HIT",
    "INFEASIBLE",
    "OPTIMAL",
    "UNBOUNDED",
    "LPResult",
    "Solution",
    "SolverOptions",
    "Violation",
    "active_kernel",
    "available_kernels",
    "check_solution",
    "export_lp",
    "format_lp",
    "solve",
    "solve_lp",
    "use_kernel",
]
