"""Pure-Python reference kernels over a prime field F_p.

Both kernels mirror ``_kernels.pyx`` exactly; the test-suite compares them.
"""

from __future__ import annotations


def mul_trunc(a: list[int], b: list[int], p: int, n: int) -> list[int]:
    """Product of two coefficient lists modulo ``u^n`` and ``p``, trailing zeros trimmed."""
    if not a or not b or n <= 0:
        return []
    if len(a) > len(b):
        a, b = b, a
    size = min(n, len(a) + len(b) - 1)
    out = [0] * size
    lb = len(b)
    for i, x in enumerate(a):
        if x == 0:
            continue
        if i >= size:
            break
        stop = min(lb, size - i)
        for j in range(stop):
            y = b[j]
            if y:
                out[i + j] += x * y
    out = [c % p for c in out]
    while out and out[-1] == 0:
        out.pop()
    return out


def solve_scalar(
    p: int,
    dk: int,
    ds: int,
    w: list[int],
    lam: list[int],
    rhs: list[list[int]],
    r_off: int,
    t_min: int,
    t_max: int,
    d_lo: int,
    d_hi: int,
    as_deg: int,
    as_mode: int,
    as_coef: int,
    kappa: list[int],
):
    """Degree-by-degree solution of ``w u^dk sigma(x) - lam u^ds x = rhs`` per component.

    ``x`` is a Laurent series with support in ``[t_min, t_max]``; ``rhs[c]`` has
    coefficient of degree ``D`` at index ``D - r_off``.  Each degree either fixes
    one new coefficient of ``x`` or yields a linear constraint.  ``as_mode`` at
    degree ``as_deg``: 0 not present, 1 uniquely solvable with
    ``x = -K * as_coef``, 2 degenerate (constraint plus prescribed ``kappa``).

    Returns ``(xs, constraints)`` where ``xs[c][t - t_min]`` are coefficients and
    each constraint is ``(D, [K_c for each component])`` meaning ``K = 0``.
    """
    ncomp = len(rhs)
    width = t_max - t_min + 1
    xs = [[0] * width for _ in range(ncomp)]
    wnz = [(d, c) for d, c in enumerate(w) if c]
    lnz = [(d, c) for d, c in enumerate(lam) if c]
    w0_inv = pow(w[0], -1, p)
    l0_inv = pow(lam[0], -1, p)
    tau_num = ds - dk
    constraints = []
    for D in range(d_lo, d_hi + 1):
        kind = 0  # 0 constraint, 1 A-type, 2 B-type, 3 special
        tnew = 0
        if D == as_deg and as_mode:
            kind = 3
            tnew = D - ds
        else:
            r = D - dk
            if r % p == 0:
                t = r // p
                if t >= t_min and t * (p - 1) < tau_num:
                    kind, tnew = 1, t
            if kind == 0:
                t = D - ds
                if t >= t_min and t * (p - 1) > tau_num:
                    kind, tnew = 2, t
        vals = []
        for c in range(ncomp):
            x = xs[c]
            k = 0
            for d, cw in wnz:
                r = D - dk - d
                if r < p * t_min:
                    break
                if r % p == 0:
                    j = r // p
                    if j <= t_max:
                        k += cw * x[j - t_min]
            for d, cl in lnz:
                t = D - ds - d
                if t < t_min:
                    break
                if t <= t_max:
                    k -= cl * x[t - t_min]
            ri = D - r_off
            rc = rhs[c]
            if 0 <= ri < len(rc):
                k -= rc[ri]
            vals.append(k % p)
        if kind and not t_min <= tnew <= t_max:
            raise ValueError(f"degree {D} fixes index {tnew} outside [{t_min}, {t_max}]")
        if kind == 1:
            for c in range(ncomp):
                xs[c][tnew - t_min] = (-vals[c]) * w0_inv % p
        elif kind == 2:
            for c in range(ncomp):
                xs[c][tnew - t_min] = vals[c] * l0_inv % p
        elif kind == 3:
            if as_mode == 1:
                for c in range(ncomp):
                    xs[c][tnew - t_min] = (-vals[c]) * as_coef % p
            else:
                constraints.append((D, vals))
                for c in range(ncomp):
                    xs[c][tnew - t_min] = kappa[c] % p
        elif any(vals):
            constraints.append((D, vals))
    return xs, constraints
