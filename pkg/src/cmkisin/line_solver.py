"""Saturated phi-stable lines of a triangular mod-p Kisin module.

A saturated line is spanned by a vector ``f`` with ``sigma(f) . A = eps * f`` for
some nonzero ``eps``.  For an upper-triangular ``A`` the first nonzero
coordinate ``s`` of ``f`` (the leading index) forces ``eps = A[s][s] sigma(f_s)/f_s``.
Over the Laurent field we normalize ``f_s = 1``, so ``eps = A[s][s]``, and then
solve the scalar equations

    A[k][k] sigma(f_k) - A[s][s] f_k = -sum_{i<k} A[i][k] sigma(f_i)

one coordinate at a time, degree by degree.  Every degree either determines a
new coefficient or imposes an F_p-linear constraint.  The family of Laurent
solutions is an affine F_p-space; a point with most negative valuation ``-a``
saturates to ``u^a f`` and the line has ``mu = v(A[s][s]) + (p - 1) a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import kernels
from .algebra import INF, FieldSpec, PrecisionExhausted, TruncSeries
from .kisin_core import FiniteKisinModule, apply_frobenius, det_valuation, wedge_power


@dataclass(frozen=True)
class EigenLine:
    """A class of saturated lines sharing a leading index and a valuation ``mu``.

    ``generator`` is one witness; its coordinate ``pivot`` is a unit normalized
    to 1.  ``count`` is the number of F_p-rational lines in the class.
    """

    mu: int
    generator: tuple[TruncSeries, ...]
    pivot: int
    leading: int
    count: int

    def coordinate_valuations(self) -> list[int | float]:
        return [g.valuation() for g in self.generator]


# -- F_p linear algebra -----------------------------------------------------------


def _rref(rows: list[list[int]], p: int, ncols: int) -> list[list[int]]:
    """Reduced row echelon form over F_p (rows of length ncols)."""
    rows = [[x % p for x in r] for r in rows if any(x % p for x in r)]
    out: list[list[int]] = []
    pivots: list[int] = []
    for r in rows:
        r = r[:]
        for pr, pc in zip(out, pivots):
            c = r[pc]
            if c:
                r = [(x - c * y) % p for x, y in zip(r, pr)]
        lead = next((i for i, x in enumerate(r) if x), None)
        if lead is None:
            continue
        inv = pow(r[lead], -1, p)
        r = [x * inv % p for x in r]
        for idx, pr in enumerate(out):
            c = pr[lead]
            if c:
                out[idx] = [(x - c * y) % p for x, y in zip(pr, r)]
        out.append(r)
        pivots.append(lead)
    return out


@dataclass
class _Affine:
    """Affine subspace ``base + span(basis)`` of F_p^m."""

    base: list[int]
    basis: list[list[int]]

    @property
    def dim(self) -> int:
        return len(self.basis)


def _solve_affine(rows: list[list[int]], m: int, p: int) -> _Affine | None:
    """Solve ``row[0] + sum_j row[j+1] y_j = 0`` for ``y`` in F_p^m."""
    # move the constant column last: unknowns first
    aug = [[*r[1:], (-r[0]) % p] for r in rows]
    red = _rref(aug, p, m + 1)
    pivots = []
    for r in red:
        lead = next(i for i, x in enumerate(r) if x)
        if lead == m:
            return None
        pivots.append(lead)
    base = [0] * m
    for r, lead in zip(red, pivots):
        base[lead] = r[m]
    free = [j for j in range(m) if j not in pivots]
    basis = []
    for fj in free:
        v = [0] * m
        v[fj] = 1
        for r, lead in zip(red, pivots):
            v[lead] = (-r[fj]) % p
        basis.append(v)
    return _Affine(base, basis)


def _restrict(space: _Affine, rows: list[list[int]], p: int) -> _Affine | None:
    """Intersect ``space`` with the affine conditions ``rows`` (constant first)."""
    m = space.dim
    if not rows:
        return space
    new_rows = []
    for r in rows:
        const = (r[0] + sum(a * b for a, b in zip(r[1:], space.base))) % p
        lin = [sum(a * b for a, b in zip(r[1:], vec)) % p for vec in space.basis]
        new_rows.append([const, *lin])
    sub = _solve_affine(new_rows, m, p)
    if sub is None:
        return None
    base = [
        (b + sum(z * vec[i] for z, vec in zip(sub.base, space.basis))) % p for i, b in enumerate(space.base)
    ]
    basis = [[sum(z * vec[i] for z, vec in zip(bv, space.basis)) % p for i in range(len(space.base))] for bv in sub.basis]
    return _Affine(base, basis)


def _point_avoiding(space: _Affine, rows: list[list[int]], p: int) -> list[int]:
    """A point of ``space`` where some affine form in ``rows`` is nonzero."""
    for r in rows:
        const = (r[0] + sum(a * b for a, b in zip(r[1:], space.base))) % p
        if const:
            return list(space.base)
        for vec in space.basis:
            lin = sum(a * b for a, b in zip(r[1:], vec)) % p
            if lin:
                return [(b + v) % p for b, v in zip(space.base, vec)]
    raise ValueError("all forms vanish on the space")


# -- the solver -------------------------------------------------------------------


@dataclass
class _Laurent:
    """Coefficients ``coeffs[t - offset]`` of a Laurent series, one list per component."""

    offset: int
    comps: list[list[int]]


def _polys(m: FiniteKisinModule) -> list[list[list[int]]]:
    return [[list(s.coeffs) for s in r] for r in m.frobenius]


def _val(c: Sequence[int]) -> int | None:
    for i, x in enumerate(c):
        if x:
            return i
    return None


def _check_input(m: FiniteKisinModule) -> None:
    if not m.field.is_prime:
        raise NotImplementedError("the line solver works over prime fields")
    if not m.is_upper_triangular():
        raise ValueError("the line solver needs an upper-triangular Frobenius matrix")
    for i in range(m.rank):
        if m.frobenius[i][i].is_zero():
            raise PrecisionExhausted("a diagonal entry vanishes to the working precision")


def _solve_from_leading(A: list[list[list[int]]], p: int, N: int, s: int, extra: int):
    """Solve with leading index ``s``; returns (components per coordinate, constraint rows, offsets, T)."""
    h = len(A)
    ds = _val(A[s][s])
    offdiag = [_val(A[i][k]) for i in range(s, h) for k in range(i + 1, h)]
    offdiag = [v for v in offdiag if v is not None]
    taus = [Fraction(ds - _val(A[k][k]), p - 1) for k in range(s + 1, h)]
    # p (T + 1) > ds keeps sigma(witness) long enough to read off v(eps)
    T = max(
        [0, math.ceil(Fraction(ds - min(offdiag, default=ds), p - 1)), -(-ds // p)] + [math.ceil(t) for t in taus]
    ) + extra
    # coordinates: dict k -> _Laurent ; component 0 is the constant part
    coords: dict[int, _Laurent] = {s: _Laurent(0, [[1]])}
    ncomp = 1
    constraints: list[list[int]] = []
    for k in range(s + 1, h):
        dk = _val(A[k][k])
        tau = Fraction(ds - dk, p - 1)
        d_hi = ds + T
        # right-hand side R_k = -sum_{s<=i<k} A[i][k] sigma(f_i), per component
        lows = []
        for i in range(s, k):
            vi = _val(A[i][k])
            if vi is not None and i in coords:
                lows.append(p * coords[i].offset + vi)
        r_off = min(lows) if lows else d_hi + 1
        width = max(d_hi - r_off + 1, 0)
        rhs = [[0] * width for _ in range(ncomp)]
        for i in range(s, k):
            a = A[i][k]
            if _val(a) is None or i not in coords:
                continue
            li = coords[i]
            # sigma(f_i) as a dense list starting at degree p*offset
            start = p * li.offset
            need = d_hi - start + 1
            if N + start <= d_hi:
                raise PrecisionExhausted(f"precision {N} too small for leading index {s}")
            for c in range(len(li.comps)):
                src = li.comps[c]
                if not any(src):
                    continue
                spread = [0] * min(len(src) * p, need)
                for j, x in enumerate(src):
                    if j * p >= len(spread):
                        break
                    spread[j * p] = x
                prod = kernels.mul_trunc(a, spread, p, need)
                row = rhs[c]
                for j, x in enumerate(prod):
                    if x:
                        D = start + j
                        if D > d_hi:
                            break
                        row[D - r_off] = (row[D - r_off] - x) % p
        v_r = None
        for row in rhs:
            for j, x in enumerate(row):
                if x:
                    v_r = j + r_off if v_r is None else min(v_r, j + r_off)
                    break
        lowest = tau if v_r is None else min(tau, Fraction(v_r - dk, p))
        t_min = math.floor(lowest)
        t_max = T
        d_lo = min(dk + p * t_min, ds + t_min, v_r if v_r is not None else d_hi)
        # precision of the diagonal data
        need_w = d_hi - dk - p * t_min
        need_l = d_hi - ds - t_min
        if dk + need_w >= N or ds + need_l >= N:
            raise PrecisionExhausted(
                f"precision {N} too small; need {max(dk + need_w, ds + need_l) + 1} for leading index {s}"
            )
        w = A[k][k][dk : dk + need_w + 1]
        lam = A[s][s][ds : ds + need_l + 1]
        as_deg, as_mode, as_coef = d_lo - 1, 0, 0
        kappa = [0] * ncomp
        if tau.denominator == 1:
            as_deg = ds + int(tau)
            diff = (w[0] - lam[0]) % p
            if diff:
                as_mode, as_coef = 1, pow(diff, -1, p)
            else:
                as_mode = 2
                ncomp += 1
                for c in coords.values():
                    c.comps.append([0] * len(c.comps[0]))
                rhs.append([0] * width)
                kappa = [0] * (ncomp - 1) + [1]
                for row in constraints:
                    row.append(0)
        xs, cons = kernels.solve_scalar(
            p, dk, ds, w, lam, rhs, r_off, t_min, t_max, d_lo, d_hi, as_deg, as_mode, as_coef, kappa
        )
        coords[k] = _Laurent(t_min, [list(x) for x in xs])
        for _, vals in cons:
            constraints.append(list(vals))
        if constraints and _solve_affine(constraints, ncomp - 1, p) is None:
            return None
    return coords, constraints, ncomp, T


def _valuation_classes(coords: dict[int, _Laurent], space: _Affine, p: int):
    """Partition the affine parameter space by the most negative exponent of the solution.

    Yields ``(t_star, count, point)`` with ``t_star <= 0``.
    """
    lo = min(c.offset for c in coords.values())
    current: _Affine | None = space
    for t in range(lo, 1):
        rows = []
        for c in coords.values():
            j = t - c.offset
            if 0 <= j < len(c.comps[0]):
                vec = [comp[j] if j < len(comp) else 0 for comp in c.comps]
                if any(vec):
                    rows.append(vec)
        if not rows:
            continue
        nxt = _restrict(current, rows, p)
        size_now = p**current.dim
        size_next = 0 if nxt is None else p**nxt.dim
        if size_next < size_now:
            yield t, size_now - size_next, _point_avoiding(current, rows, p)
        if nxt is None:
            return
        current = nxt
    raise AssertionError("solution space not exhausted at degree 0")  # the leading coordinate is 1


def _witness(F: FieldSpec, coords: dict[int, _Laurent], point: list[int], t_star: int, h: int, T: int):
    """Saturated generator ``u^{-t_star} f`` normalized on its first unit coordinate."""
    p = F.p
    y = [1, *point]
    precision = T + 1 - t_star
    vec = []
    for k in range(h):
        if k not in coords:
            vec.append(TruncSeries.zero(F, precision))
            continue
        c = coords[k]
        n = len(c.comps[0]) if c.comps else 0
        vals = [sum(y[i] * c.comps[i][j] for i in range(len(c.comps)) if j < len(c.comps[i])) % p for j in range(n)]
        shift = c.offset - t_star
        full = [0] * shift + vals if shift >= 0 else vals[-shift:]
        vec.append(TruncSeries(F, precision, tuple(full)))
    pivot = next(k for k, s in enumerate(vec) if s.coefficient(0))
    inv = vec[pivot].inverse()
    vec = [s * inv for s in vec]
    return tuple(vec), pivot


def enumerate_lines(m: FiniteKisinModule, *, extra: int = 0) -> list[EigenLine]:
    """All classes of saturated phi-stable lines, sorted by ``(mu, leading)``.

    ``extra`` extends the number of computed coefficients beyond what the valuation
    analysis needs, which lengthens the witnesses.
    """
    _check_input(m)
    A = _polys(m)
    p, N, h = m.field.p, m.precision, m.rank
    out = []
    for s in range(h):
        sol = _solve_from_leading(A, p, N, s, extra)
        if sol is None:
            continue
        coords, constraints, ncomp, T = sol
        space = _solve_affine(constraints, ncomp - 1, p)
        if space is None:
            continue
        ds = _val(A[s][s])
        for t_star, count, point in _valuation_classes(coords, space, p):
            mu = ds + (p - 1) * (-t_star)
            gen, pivot = _witness(m.field, coords, point, t_star, h, T)
            out.append(EigenLine(mu, gen, pivot, s, count))
    out.sort(key=lambda line: (line.mu, line.leading))
    return out


def mu_set(lines: Sequence[EigenLine]) -> set[int]:
    return {line.mu for line in lines}


def verify_line(m: FiniteKisinModule, line: EigenLine) -> bool:
    """Substitute the witness into ``sigma(w) . A = eps w`` and check ``v(eps) = mu``.

    A witness known modulo ``u^n`` has ``sigma(w)`` known modulo ``u^(p n)``, so
    both sides are compared modulo ``u^B`` with ``B = min(mu + n, p n, N)``.
    """
    p = m.field.p
    w = [list(x.coeffs) for x in line.generator]
    n = min(x.precision for x in line.generator)
    N = m.precision
    B = min(line.mu + n, p * n, N)
    if line.mu >= B:
        return False
    sw = []
    for c in w:
        out = [0] * min(len(c) * p, p * n) if c else []
        for j, x in enumerate(c):
            if j * p < len(out):
                out[j * p] = x
        sw.append(out)
    A = _polys(m)
    h = m.rank
    image = []
    for k in range(h):
        acc = [0] * B
        for i in range(h):
            for j, x in enumerate(kernels.mul_trunc(sw[i], A[i][k], p, B)):
                acc[j] = (acc[j] + x) % p
        image.append(acc)
    eps = image[line.pivot]
    if _val(eps) != line.mu or w[line.pivot][:1] != [1]:
        return False
    for k in range(h):
        rhs = kernels.mul_trunc(eps, w[k], p, B)
        rhs = rhs + [0] * (B - len(rhs))
        if rhs != image[k]:
            return False
    return True


def submodule_valuations(m: FiniteKisinModule, corank: int, *, extra: int = 0) -> set[int]:
    """``mu`` values of saturated submodules of the given corank (lines in the wedge of rank h - corank)."""
    h = m.rank
    if not 1 <= corank < h:
        raise ValueError(f"corank must lie in 1..{h - 1}")
    return mu_set(enumerate_lines(wedge_power(m, h - corank), extra=extra))


def submodule_lines(m: FiniteKisinModule, corank: int, *, extra: int = 0) -> list[EigenLine]:
    h = m.rank
    if not 1 <= corank < h:
        raise ValueError(f"corank must lie in 1..{h - 1}")
    return enumerate_lines(wedge_power(m, h - corank), extra=extra)


def hodge_exponent_of_subgroup(m: FiniteKisinModule, line_mu: int) -> int:
    """``v(det A) - mu``: the Hodge exponent of the subgroup cut out by the line."""
    d = det_valuation(m)
    if line_mu > d:
        raise ValueError(f"mu = {line_mu} exceeds v(det) = {d}; witness is not saturated")
    return d - line_mu


__all__ = [
    "EigenLine",
    "enumerate_lines",
    "hodge_exponent_of_subgroup",
    "mu_set",
    "submodule_lines",
    "submodule_valuations",
    "verify_line",
]
