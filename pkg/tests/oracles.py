"""Independent reference implementations used by the tests."""

import itertools
import math

import numpy as np
from scipy.optimize import linprog

from otsconn.model import BINARY, CONTINUOUS, MilpModel


def random_mini_model(rng, n_bin=None, n_cont=None, n_rows=None):
    """Small bounded MILP with a mix of binaries and continuous variables."""
    n_bin = int(rng.integers(2, 13)) if n_bin is None else n_bin
    n_cont = int(rng.integers(1, 6)) if n_cont is None else n_cont
    n_rows = int(rng.integers(2, 9)) if n_rows is None else n_rows
    m = MilpModel("mini")
    for j in range(n_bin):
        m.add_variable(f"y_{j}", BINARY, 0.0, 1.0)
    for j in range(n_cont):
        lo = float(rng.integers(-5, 1))
        m.add_variable(f"x_{j}", CONTINUOUS, lo, lo + float(rng.integers(1, 8)))
    n = n_bin + n_cont
    for j in range(n):
        m.add_objective(j, float(rng.integers(-9, 10)))
    for i in range(n_rows):
        cols = rng.choice(n, size=min(n, int(rng.integers(2, 6))), replace=False)
        row = {int(j): float(rng.integers(-6, 7)) or 1.0 for j in cols}
        sense = ("<=", ">=", "=")[int(rng.choice(3, p=[0.45, 0.45, 0.1]))]
        rhs = float(rng.integers(-4, 9))
        m.add_row(row, sense, rhs, f"r{i}")
    return m


def scipy_lp(model, fixed_bins=None):
    """LP optimum with binaries fixed (or relaxed when ``fixed_bins`` is None), via HiGHS."""
    c, A, senses, b, lo, up = model.dense()
    lo, up = lo.copy(), up.copy()
    bins = model.binaries()
    if fixed_bins is not None:
        lo[bins] = up[bins] = fixed_bins
    ub_rows = senses != 0
    A_ub = np.vstack([A[senses == -1], -A[senses == 1]])
    b_ub = np.concatenate([b[senses == -1], -b[senses == 1]])
    A_eq, b_eq = A[senses == 0], b[senses == 0]
    bounds = [(None if math.isinf(l) else l, None if math.isinf(u) else u) for l, u in zip(lo, up)]
    res = linprog(c, A_ub=A_ub if ub_rows.any() else None, b_ub=b_ub if ub_rows.any() else None,
                  A_eq=A_eq if len(b_eq) else None, b_eq=b_eq if len(b_eq) else None,
                  bounds=bounds, method="highs")
    if res.status == 2:
        return None
    if res.status == 3:
        return -math.inf
    assert res.status == 0, res.message
    return float(res.fun) + model.obj_constant


def brute_force(model):
    """Best objective over every binary assignment, or None when all are infeasible."""
    bins = model.binaries()
    best = None
    for assign in itertools.product((0.0, 1.0), repeat=len(bins)):
        val = scipy_lp(model, np.array(assign))
        if val is not None and (best is None or val < best):
            best = val
    return best
