"""Pure numpy bounded-simplex iteration loop (fallback for the compiled kernel).

Both kernels share one contract, see ``run_simplex``.
"""

import numpy as np

BASIC, AT_LOWER, AT_UPPER, FREE = 0, 1, 2, 3
OPTIMAL, UNBOUNDED, ITER_LIMIT = 0, 1, 2
DEGEN_LIMIT = 30
TIE_TOL = 1e-12


def run_simplex(T, d, x, basis, status, lo, up, allowed, rule, max_iter, piv_tol, opt_tol):
    """Primal simplex pivots on a dense tableau, in place.

    T is B^-1 A over all columns, d the reduced-cost row, x the full primal
    point (nonbasic entries sit at a bound or at 0 when free). ``rule`` 0 is
    Bland's rule throughout; 1 prices by largest reduced cost and drops to
    Bland after DEGEN_LIMIT consecutive degenerate pivots.

    Returns (code, iterations).
    """
    m = T.shape[0]
    degen = 0
    movable = allowed.astype(bool)
    for it in range(max_iter):
        at_lo = (status == AT_LOWER) | (status == FREE)
        at_up = (status == AT_UPPER) | (status == FREE)
        inc = movable & at_lo & (d < -opt_tol)
        dec = movable & at_up & (d > opt_tol)
        elig = inc | dec
        if not elig.any():
            return OPTIMAL, it
        bland = rule == 0 or degen >= DEGEN_LIMIT
        if bland:
            j = int(np.argmax(elig))
        else:
            j = int(np.argmax(np.where(elig, np.abs(d), -1.0)))
        dirn = 1.0 if inc[j] else -1.0

        col = T[:, j].copy()
        a = col * dirn
        xb = x[basis]
        lob = lo[basis]
        upb = up[basis]
        with np.errstate(divide="ignore", invalid="ignore"):
            t_dec = np.where(a > piv_tol, (xb - lob) / a, np.inf)
            t_inc = np.where(a < -piv_tol, (upb - xb) / -a, np.inf)
        ratios = np.maximum(np.minimum(t_dec, t_inc), 0.0)
        ratios[np.isnan(ratios)] = np.inf
        tmin = ratios.min() if m else np.inf
        span = up[j] - lo[j]
        if not np.isfinite(span):
            span = np.inf

        if span <= tmin:
            if not np.isfinite(span):
                return UNBOUNDED, it
            # bound flip, no basis change
            x[j] = up[j] if dirn > 0 else lo[j]
            status[j] = AT_UPPER if dirn > 0 else AT_LOWER
            x[basis] = xb - a * span
            degen = 0
            continue

        ties = np.flatnonzero(ratios <= tmin + TIE_TOL)
        if bland or len(ties) == 1:
            r = int(ties[np.argmin(basis[ties])])
        else:
            mag = np.abs(a[ties])
            best = ties[mag >= mag.max() - TIE_TOL]
            r = int(best[np.argmin(basis[best])])
        t = ratios[r]
        degen = degen + 1 if t <= TIE_TOL else 0

        x[basis] = xb - a * t
        x[j] = x[j] + dirn * t
        leave = basis[r]
        if a[r] > 0:
            x[leave] = lo[leave]
            status[leave] = AT_LOWER
        else:
            x[leave] = up[leave]
            status[leave] = AT_UPPER

        prow = T[r] / col[r]
        # only rows and columns with nonzeros in the pivot column/row change
        rows = np.flatnonzero(col)
        cols = np.flatnonzero(prow)
        T[np.ix_(rows, cols)] -= np.outer(col[rows], prow[cols])
        T[r] = prow
        d[cols] -= d[j] * prow[cols]
        basis[r] = j
        status[j] = BASIC
    return ITER_LIMIT, max_iter
