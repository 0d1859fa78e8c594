# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled bounded-simplex iteration loop; same contract as _kernel_py."""

from libc.math cimport fabs, INFINITY, isfinite

cdef int BASIC = 0, AT_LOWER = 1, AT_UPPER = 2, FREE = 3
cdef int DEGEN_LIMIT = 30
cdef double TIE_TOL = 1e-12


def run_simplex(double[:, ::1] T, double[::1] d, double[::1] x, long[::1] basis,
                signed char[::1] status, double[::1] lo, double[::1] up,
                unsigned char[::1] allowed, int rule, long max_iter,
                double piv_tol, double opt_tol):
    cdef Py_ssize_t m = T.shape[0], ncol = T.shape[1]
    cdef Py_ssize_t i, k, j, r, it
    cdef int degen = 0, bland, st
    cdef double best, dj, dirn, a, t, tmin, span, piv, f, bestmag, mag, xb
    cdef long leave, bi
    cdef double[::1] col, ratio
    cdef Py_ssize_t[::1] nzc
    cdef Py_ssize_t kk, nnz

    import numpy as np
    col_arr = np.empty(m, dtype=np.float64)
    col = col_arr
    ratio_arr = np.empty(m, dtype=np.float64)
    ratio = ratio_arr
    nzc_arr = np.empty(ncol, dtype=np.intp)
    nzc = nzc_arr

    for it in range(max_iter):
        bland = rule == 0 or degen >= DEGEN_LIMIT
        j = -1
        best = 0.0
        dirn = 0.0
        for k in range(ncol):
            if not allowed[k]:
                continue
            st = status[k]
            if st == BASIC:
                continue
            dj = d[k]
            if dj < -opt_tol and (st == AT_LOWER or st == FREE):
                if bland:
                    j = k
                    dirn = 1.0
                    break
                if -dj > best:
                    best = -dj
                    j = k
                    dirn = 1.0
            elif dj > opt_tol and (st == AT_UPPER or st == FREE):
                if bland:
                    j = k
                    dirn = -1.0
                    break
                if dj > best:
                    best = dj
                    j = k
                    dirn = -1.0
        if j < 0:
            return 0, it

        for i in range(m):
            col[i] = T[i, j]

        # ratio test: global minimum first, then the same tie rule as _kernel_py
        tmin = INFINITY
        for i in range(m):
            ratio[i] = INFINITY
            a = col[i] * dirn
            bi = basis[i]
            if a > piv_tol:
                t = (x[bi] - lo[bi]) / a
            elif a < -piv_tol:
                t = (up[bi] - x[bi]) / (-a)
            else:
                continue
            if t != t:
                continue
            if t < 0.0:
                t = 0.0
            ratio[i] = t
            if t < tmin:
                tmin = t
        r = -1
        if tmin < INFINITY:
            bestmag = 0.0
            if not bland:
                for i in range(m):
                    if ratio[i] <= tmin + TIE_TOL:
                        mag = fabs(col[i])
                        if mag > bestmag:
                            bestmag = mag
            for i in range(m):
                if ratio[i] <= tmin + TIE_TOL:
                    if not bland and fabs(col[i]) < bestmag - TIE_TOL:
                        continue
                    if r < 0 or basis[i] < basis[r]:
                        r = i

        span = up[j] - lo[j]
        if not isfinite(span):
            span = INFINITY
        if span <= tmin:
            if not isfinite(span):
                return 1, it
            if dirn > 0:
                x[j] = up[j]
                status[j] = AT_UPPER
            else:
                x[j] = lo[j]
                status[j] = AT_LOWER
            for i in range(m):
                x[basis[i]] -= col[i] * dirn * span
            degen = 0
            continue

        # the bound-flip test above uses the global minimum; the step uses row r
        t = ratio[r]
        if t <= TIE_TOL:
            degen += 1
        else:
            degen = 0
        for i in range(m):
            x[basis[i]] -= col[i] * dirn * t
        x[j] += dirn * t
        leave = basis[r]
        if col[r] * dirn > 0:
            x[leave] = lo[leave]
            status[leave] = AT_LOWER
        else:
            x[leave] = up[leave]
            status[leave] = AT_UPPER

        # only columns with a nonzero in the pivot row change
        piv = col[r]
        nnz = 0
        for k in range(ncol):
            if T[r, k] != 0.0:
                T[r, k] /= piv
                nzc[nnz] = k
                nnz += 1
        for i in range(m):
            if i == r:
                continue
            f = col[i]
            if f == 0.0:
                continue
            for kk in range(nnz):
                k = nzc[kk]
                T[i, k] -= f * T[r, k]
        f = d[j]
        if f != 0.0:
            for kk in range(nnz):
                k = nzc[kk]
                d[k] -= f * T[r, k]
        basis[r] = j
        status[j] = BASIC
    return 2, max_iter
