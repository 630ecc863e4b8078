# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels over a prime field F_p; see ``_kernels_py`` for the reference."""

from libc.stdint cimport int64_t
from libc.stdlib cimport calloc, free


cdef int64_t* _load(list a, Py_ssize_t n, int64_t p) except NULL:
    cdef int64_t* buf = <int64_t*>calloc(n + 1, sizeof(int64_t))
    cdef Py_ssize_t i
    if buf == NULL:
        raise MemoryError()
    for i in range(n):
        buf[i] = (<int64_t>a[i]) % p
        if buf[i] < 0:
            buf[i] += p
    return buf


def mul_trunc(list a, list b, long p, long n):
    """Product of two coefficient lists modulo ``u^n`` and ``p``, trailing zeros trimmed."""
    cdef Py_ssize_t la = len(a), lb = len(b), size, i, j, stop
    cdef int64_t x, y, acc, limit
    cdef int64_t *av
    cdef int64_t *bv
    cdef int64_t *out
    if la == 0 or lb == 0 or n <= 0:
        return []
    size = min(n, la + lb - 1)
    if la > lb:
        av = _load(b, lb, p)
        bv = _load(a, la, p)
        la, lb = lb, la
    else:
        av = _load(a, la, p)
        bv = _load(b, lb, p)
    out = <int64_t*>calloc(size, sizeof(int64_t))
    # delayed reduction: accumulate while the partial sum stays far below 2^63
    limit = (<int64_t>1 << 62)
    try:
        for i in range(min(la, size)):
            x = av[i]
            if x == 0:
                continue
            stop = min(lb, size - i)
            for j in range(stop):
                y = bv[j]
                if y:
                    acc = out[i + j] + x * y
                    if acc >= limit:
                        acc %= p
                    out[i + j] = acc
        res = [out[i] % p for i in range(size)]
    finally:
        free(av)
        free(bv)
        free(out)
    while res and res[len(res) - 1] == 0:
        res.pop()
    return res


def solve_scalar(long p, long dk, long ds, list w, list lam, list rhs, long r_off,
                 long t_min, long t_max, long d_lo, long d_hi, long as_deg,
                 int as_mode, long as_coef, list kappa):
    """Degree-by-degree scalar eigen-equation solver; same contract as the reference."""
    cdef Py_ssize_t ncomp = len(rhs)
    cdef Py_ssize_t width = t_max - t_min + 1
    cdef Py_ssize_t c, idx, nw, nl, ri
    cdef long D, r, t, j, tnew, tau_num = ds - dk
    cdef int kind
    cdef int64_t k
    cdef int64_t w0_inv = pow(int(w[0]), -1, p)
    cdef int64_t l0_inv = pow(int(lam[0]), -1, p)
    wd = [d for d, v in enumerate(w) if v % p]
    ld = [d for d, v in enumerate(lam) if v % p]
    nw = len(wd)
    nl = len(ld)
    cdef int64_t* wdv = _load(wd, nw, 1 << 62)
    cdef int64_t* wcv = _load([w[d] for d in wd], nw, p)
    cdef int64_t* ldv = _load(ld, nl, 1 << 62)
    cdef int64_t* lcv = _load([lam[d] for d in ld], nl, p)
    cdef int64_t* xs = <int64_t*>calloc(ncomp * width + 1, sizeof(int64_t))
    cdef int64_t* vals = <int64_t*>calloc(ncomp + 1, sizeof(int64_t))
    cdef int64_t* x
    rhs_len = [len(rc) for rc in rhs]
    cdef Py_ssize_t maxr = max(rhs_len) if rhs_len else 0
    cdef int64_t* rv = <int64_t*>calloc(ncomp * maxr + 1, sizeof(int64_t))
    cdef Py_ssize_t* rl = <Py_ssize_t*>calloc(ncomp + 1, sizeof(Py_ssize_t))
    cdef int64_t* kap = _load(list(kappa) + [0] * (ncomp - len(kappa)), ncomp, p)
    constraints = []
    try:
        for c in range(ncomp):
            rc = rhs[c]
            rl[c] = len(rc)
            for idx in range(rl[c]):
                rv[c * maxr + idx] = (<int64_t>rc[idx]) % p
        for D in range(d_lo, d_hi + 1):
            kind = 0
            tnew = 0
            if D == as_deg and as_mode:
                kind = 3
                tnew = D - ds
            else:
                r = D - dk
                if r % p == 0:
                    t = r // p
                    if t >= t_min and t * (p - 1) < tau_num:
                        kind = 1
                        tnew = t
                if kind == 0:
                    t = D - ds
                    if t >= t_min and t * (p - 1) > tau_num:
                        kind = 2
                        tnew = t
            for c in range(ncomp):
                x = xs + c * width
                k = 0
                for idx in range(nw):
                    r = D - dk - wdv[idx]
                    if r < p * t_min:
                        break
                    if r % p == 0:
                        j = r // p
                        if j <= t_max:
                            k = (k + wcv[idx] * x[j - t_min]) % p
                for idx in range(nl):
                    t = D - ds - ldv[idx]
                    if t < t_min:
                        break
                    if t <= t_max:
                        k = (k - lcv[idx] * x[t - t_min]) % p
                ri = D - r_off
                if 0 <= ri < rl[c]:
                    k = (k - rv[c * maxr + ri]) % p
                if k < 0:
                    k += p
                vals[c] = k
            if kind and not t_min <= tnew <= t_max:
                raise ValueError(f"degree {D} fixes index {tnew} outside [{t_min}, {t_max}]")
            if kind == 1:
                for c in range(ncomp):
                    xs[c * width + tnew - t_min] = ((p - vals[c]) % p) * w0_inv % p
            elif kind == 2:
                for c in range(ncomp):
                    xs[c * width + tnew - t_min] = vals[c] * l0_inv % p
            elif kind == 3:
                if as_mode == 1:
                    for c in range(ncomp):
                        xs[c * width + tnew - t_min] = ((p - vals[c]) % p) * as_coef % p
                else:
                    constraints.append((D, [vals[c] for c in range(ncomp)]))
                    for c in range(ncomp):
                        xs[c * width + tnew - t_min] = kap[c]
            else:
                for c in range(ncomp):
                    if vals[c]:
                        constraints.append((D, [vals[idx] for idx in range(ncomp)]))
                        break
        result = [[xs[c * width + idx] for idx in range(width)] for c in range(ncomp)]
    finally:
        free(wdv)
        free(wcv)
        free(ldv)
        free(lcv)
        free(xs)
        free(vals)
        free(rv)
        free(rl)
        free(kap)
    return result, constraints
