"""Two-phase bounded primal simplex on a dense tableau.

The pivot loop lives in a kernel: the compiled ``_kernel_ext`` when it is
built, otherwise ``_kernel_py``. Set ``OTSCONN_PURE_PYTHON=1`` to force
the fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _kernel_py

KERNEL = "python"
_run = _kernel_py.run_simplex
if os.environ.get("OTSCONN_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _kernel_ext

        _run = _kernel_ext.run_simplex
        KERNEL = "compiled"
    except ImportError:  # extension not built
        pass

BASIC, AT_LOWER, AT_UPPER, FREE = 0, 1, 2, 3
RULES = {"bland": 0, "dantzig": 1}

LE, EQ, GE = -1, 0, 1


def use_kernel(name: str) -> None:
    """Switch kernels at runtime ("compiled" or "python"); used by benchmarks."""
    global _run, KERNEL
    if name == "python":
        _run, KERNEL = _kernel_py.run_simplex, "python"
    elif name == "compiled":
        from . import _kernel_ext

        _run, KERNEL = _kernel_ext.run_simplex, "compiled"
    else:
        raise ValueError(f"unknown kernel {name!r}")


def active_kernel() -> str:
    return KERNEL


def available_kernels() -> list[str]:
    out = ["python"]
    try:
        from . import _kernel_ext  # noqa: F401

        out.insert(0, "compiled")
    except ImportError:
        pass
    return out


@dataclass
class LPResult:
    status: str  # optimal | infeasible | unbounded | iteration_limit
    x: np.ndarray | None
    objective: float
    iterations: int


def solve_lp(c, A, senses, b, lo, up, rule: str = "bland", max_iter: int | None = None,
             feas_tol: float = 1e-7, piv_tol: float = 1e-9, opt_tol: float = 1e-9) -> LPResult:
    """Minimise c.x subject to A x (<=,=,>=) b and lo <= x <= up.

    ``senses`` holds -1 for <=, 0 for =, +1 for >=; bounds may be infinite.
    """
    A = np.asarray(A, dtype=float)
    c = np.asarray(c, dtype=float)
    b = np.asarray(b, dtype=float)
    lo = np.asarray(lo, dtype=float)
    up = np.asarray(up, dtype=float)
    senses = np.asarray(senses, dtype=int)
    m, n = A.shape
    if np.any(lo > up):
        return LPResult("infeasible", None, np.inf, 0)

    # nonbasic start: finite lower, else finite upper, else free at zero
    x0 = np.where(np.isfinite(lo), lo, np.where(np.isfinite(up), up, 0.0))
    st0 = np.where(np.isfinite(lo), AT_LOWER, np.where(np.isfinite(up), AT_UPPER, FREE))
    resid = b - A @ x0

    ineq = np.flatnonzero(senses != EQ)
    n_slack = len(ineq)
    slack_col = np.full(m, -1)
    slack_col[ineq] = n + np.arange(n_slack)
    slack_lo = np.where(senses[ineq] == LE, 0.0, -np.inf)
    slack_up = np.where(senses[ineq] == LE, np.inf, 0.0)

    # a row starts on its slack when the slack can absorb the residual
    use_slack = np.zeros(m, dtype=bool)
    use_slack[ineq] = (resid[ineq] >= slack_lo) & (resid[ineq] <= slack_up)
    art_rows = np.flatnonzero(~use_slack)
    n_art = len(art_rows)
    ncol = n + n_slack + n_art

    full = np.zeros((m, ncol))
    full[:, :n] = A
    full[ineq, n + np.arange(n_slack)] = 1.0
    art_sign = np.where(resid[art_rows] >= 0, 1.0, -1.0)
    full[art_rows, n + n_slack + np.arange(n_art)] = art_sign

    lo_f = np.concatenate([lo, slack_lo, np.zeros(n_art)])
    up_f = np.concatenate([up, slack_up, np.full(n_art, np.inf)])
    x = np.concatenate([x0, np.zeros(n_slack + n_art)])
    status = np.concatenate([st0, np.full(n_slack, AT_LOWER), np.zeros(n_art)]).astype(np.int8)
    status[n:n + n_slack][senses[ineq] == GE] = AT_UPPER

    basis = np.empty(m, dtype=np.int64)
    row_sign = np.ones(m)
    basis[use_slack] = slack_col[use_slack]
    basis[art_rows] = n + n_slack + np.arange(n_art)
    row_sign[art_rows] = art_sign
    x[basis] = resid * row_sign
    status[basis] = BASIC

    T = np.ascontiguousarray(full * row_sign[:, None])
    fixed = lo_f == up_f
    allowed = (~fixed).astype(np.uint8)
    allowed[n + n_slack:] = 0
    if max_iter is None:
        max_iter = 50 * (m + ncol) + 1000
    code_rule = RULES[rule]
    iters = 0

    if n_art:
        cost1 = np.zeros(ncol)
        cost1[n + n_slack:] = 1.0
        d = cost1 - cost1[basis] @ T
        code, it = _run(T, d, x, basis, status, lo_f, up_f, allowed, code_rule, max_iter,
                        piv_tol, opt_tol)
        iters += it
        if code == 2:
            return LPResult("iteration_limit", None, np.nan, iters)
        infeas = float(np.sum(x[n + n_slack:]))
        if infeas > feas_tol * max(1.0, float(np.max(np.abs(b), initial=0.0))):
            return LPResult("infeasible", None, np.inf, iters)
        up_f[n + n_slack:] = 0.0
        nb_art = status[n + n_slack:] != BASIC
        x[n + n_slack:][nb_art] = 0.0

    cost = np.zeros(ncol)
    cost[:n] = c
    d = cost - cost[basis] @ T
    code, it = _run(T, d, x, basis, status, lo_f, up_f, allowed, code_rule,
                    max(max_iter - iters, 1), piv_tol, opt_tol)
    iters += it
    if code == 1:
        return LPResult("unbounded", None, -np.inf, iters)
    if code == 2:
        return LPResult("iteration_limit", None, np.nan, iters)

    # clean accumulated drift by re-solving for the basic values
    if np.max(np.abs(full @ x - b), initial=0.0) > 1e-9:
        nonbasic = status != BASIC
        rhs = b - full[:, nonbasic] @ x[nonbasic]
        try:
            x[basis] = np.linalg.solve(full[:, basis], rhs)
        except np.linalg.LinAlgError:
            pass
    xs = x[:n].copy()
    return LPResult("optimal", xs, float(c @ xs), iters)
