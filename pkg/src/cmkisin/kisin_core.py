"""Mod-p Kisin modules given by Frobenius matrices.

Convention: a module of rank h has Frobenius ``phi(v) = sigma(v) . A`` for a
row vector ``v``, where ``sigma`` acts on coefficients by the p-power map and
sends ``u`` to ``u^p``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Sequence

from .algebra import (
    INF,
    FieldSpec,
    PrecisionExhausted,
    TruncSeries,
    frobenius_sigma,
    make_field,
    require_valuation,
)

Matrix = tuple[tuple[TruncSeries, ...], ...]


@dataclass(frozen=True)
class FiniteKisinModule:
    """Rank-h module over k[[u]] with Frobenius matrix ``frobenius`` (row convention)."""

    field: FieldSpec
    frobenius: Matrix
    eisenstein_degree: int

    def __post_init__(self) -> None:
        rows = tuple(tuple(r) for r in self.frobenius)
        object.__setattr__(self, "frobenius", rows)
        h = len(rows)
        if h < 1 or any(len(r) != h for r in rows):
            raise ValueError("Frobenius matrix must be square and nonempty")
        if self.eisenstein_degree < 1:
            raise ValueError("Eisenstein degree must be >= 1")
        precisions = {s.precision for r in rows for s in r}
        if len(precisions) != 1:
            raise ValueError("all entries must share one precision")
        if any(s.field != self.field for r in rows for s in r):
            raise ValueError("all entries must live over the module's field")

    @property
    def rank(self) -> int:
        return len(self.frobenius)

    @property
    def precision(self) -> int:
        return self.frobenius[0][0].precision

    @property
    def p(self) -> int:
        return self.field.p

    def entry(self, i: int, j: int) -> TruncSeries:
        return self.frobenius[i][j]

    def is_upper_triangular(self) -> bool:
        h = self.rank
        return all(self.frobenius[i][j].is_zero() for i in range(h) for j in range(i))

    def with_precision(self, n: int) -> "FiniteKisinModule":
        rows = [[s.truncate(n) for s in r] for r in self.frobenius]
        return FiniteKisinModule(self.field, rows, self.eisenstein_degree)

    def to_json(self) -> dict:
        return {
            "p": self.field.p,
            "f": self.field.f,
            "e": self.eisenstein_degree,
            "h": self.rank,
            "precision": self.precision,
            "entries": [[list(s.coeffs) for s in r] for r in self.frobenius],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FiniteKisinModule":
        F = make_field(int(data["p"]), int(data.get("f", 1)))
        n = int(data["precision"])
        rows = [[TruncSeries(F, n, tuple(c)) for c in r] for r in data["entries"]]
        if len(rows) != int(data["h"]):
            raise ValueError("h does not match the number of rows")
        return cls(F, rows, int(data["e"]))


def module_from_polys(
    F: FieldSpec, entries: Sequence[Sequence[Sequence[int]]], e: int, precision: int
) -> FiniteKisinModule:
    """Build a module from coefficient lists (lowest degree first)."""
    rows = [[TruncSeries(F, precision, tuple(c)) for c in r] for r in entries]
    return FiniteKisinModule(F, rows, e)


def load_module(path: str | Path) -> FiniteKisinModule:
    return FiniteKisinModule.from_json(json.loads(Path(path).read_text()))


def apply_frobenius(m: FiniteKisinModule, v: Sequence[TruncSeries]) -> list[TruncSeries]:
    """``sigma(v) . A`` for a row vector ``v``."""
    h = m.rank
    sv = [frobenius_sigma(x) for x in v]
    out = []
    for k in range(h):
        acc = None
        for i in range(h):
            term = sv[i] * m.frobenius[i][k]
            acc = term if acc is None else acc + term
        out.append(acc)
    return out


# -- determinants -------------------------------------------------------------


def det_valuation_of(rows: Sequence[Sequence[TruncSeries]]) -> int:
    """u-adic valuation of a determinant by elimination with minimal-valuation pivots.

    Dividing a pivot row by ``u^v`` loses ``v`` digits of precision, so precision
    shrinks honestly; the result raises :class:`PrecisionExhausted` instead of
    returning a wrong valuation.
    """
    M = [list(r) for r in rows]
    n = len(M)
    if all(M[i][j].is_zero() for i in range(n) for j in range(i)):
        # triangular: the determinant is the product of the diagonal
        vals = [M[i][i].valuation() for i in range(n)]
        if INF in vals:
            raise PrecisionExhausted("a diagonal entry vanishes to the working precision")
        return int(sum(vals))
    total = 0
    while M:
        best = None
        for i, r in enumerate(M):
            for j, s in enumerate(r):
                v = s.valuation()
                if v != INF and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            raise PrecisionExhausted("determinant vanishes to the working precision")
        v, pi, pj = best
        total += v
        pivot_row = M.pop(pi)
        pivot = pivot_row[pj].shift(-v)
        inv = pivot.inverse()
        rest_cols = [j for j in range(len(pivot_row)) if j != pj]
        newM = []
        for r in M:
            lead = r[pj]
            if lead.is_zero():
                newM.append([r[j] for j in rest_cols])
                continue
            factor = lead.shift(-v) * inv
            newM.append([r[j] - factor * pivot_row[j] for j in rest_cols])
        M = newM
    return total


def det_valuation(m: FiniteKisinModule) -> int:
    """v_u(det A)."""
    return det_valuation_of(m.frobenius)


def determinant(rows: Sequence[Sequence[TruncSeries]]) -> TruncSeries:
    """Determinant by Laplace expansion along the first row (small matrices only)."""
    return _minor(rows, tuple(range(len(rows))), tuple(range(len(rows))), {})


def _minor(A, rows: tuple[int, ...], cols: tuple[int, ...], memo: dict) -> TruncSeries:
    key = (rows, cols)
    if key in memo:
        return memo[key]
    if len(rows) == 1:
        res = A[rows[0]][cols[0]]
    else:
        r0, rest = rows[0], rows[1:]
        res = None
        for t, c in enumerate(cols):
            a = A[r0][c]
            if a.is_zero():
                if res is None:
                    res = a
                continue
            sub = _minor(A, rest, cols[:t] + cols[t + 1 :], memo)
            term = a * sub
            if t % 2:
                term = -term
            res = term if res is None else res + term
    memo[key] = res
    return res


def wedge_power(m: FiniteKisinModule, k: int) -> FiniteKisinModule:
    """k-th exterior power: the compound matrix on lexicographically ordered k-subsets."""
    h = m.rank
    if not 1 <= k <= h:
        raise ValueError(f"wedge degree must lie in 1..{h}")
    subsets = list(combinations(range(h), k))
    memo: dict = {}
    A = m.frobenius
    rows = [[_minor(A, I, J, memo) for J in subsets] for I in subsets]
    return FiniteKisinModule(m.field, rows, m.eisenstein_degree)


def wedge_basis(h: int, k: int) -> list[tuple[int, ...]]:
    """Index subsets (1-based) labelling the basis of the k-th exterior power."""
    return [tuple(i + 1 for i in s) for s in combinations(range(h), k)]


def serre_tensor_valuation(v: int | Fraction, rho: int) -> int | Fraction:
    """Hodge valuation after a degree-``rho`` Serre tensor construction."""
    if v == INF:
        raise ValueError("valuation must be finite")
    if rho < 1:
        raise ValueError("rho must be >= 1")
    return rho * v


# -- quasi-Kisin decomposition --------------------------------------------------


@dataclass(frozen=True)
class QuasiKisinBlock:
    field: FieldSpec
    block_frobenius: Matrix
    isotypic_index: int
    indices: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.block_frobenius)

    def det_valuation(self) -> int:
        return det_valuation_of(self.block_frobenius)


def composed_frobenius(m: FiniteKisinModule, f: int) -> list[list[TruncSeries]]:
    """Matrix of phi^f: ``sigma^{f-1}(A) ... sigma(A) A``."""
    h = m.rank
    A = [list(r) for r in m.frobenius]
    B = A
    for j in range(1, f):
        S = [[frobenius_sigma(x, j) for x in r] for r in A]
        B = _matmul(S, B)
    return B


def _matmul(X, Y):
    h = len(X)
    out = []
    for i in range(h):
        row = []
        for k in range(len(Y[0])):
            acc = None
            for j in range(len(Y)):
                if X[i][j].is_zero() or Y[j][k].is_zero():
                    continue
                t = X[i][j] * Y[j][k]
                acc = t if acc is None else acc + t
            if acc is None:
                acc = TruncSeries.zero(X[0][0].field, min(X[0][0].precision, Y[0][0].precision))
            row.append(acc)
        out.append(row)
    return out


def _frobenius_classes(m: FiniteKisinModule, f: int) -> list[tuple[int, list[int]]]:
    """Assign each basis index a class mod f so that phi maps class c to class c+1."""
    h = m.rank
    A = m.frobenius
    adj: list[list[tuple[int, int]]] = [[] for _ in range(h)]
    for i in range(h):
        for j in range(h):
            if not A[i][j].is_zero():
                adj[i].append((j, 1))
                adj[j].append((i, -1))
    cls: list[int | None] = [None] * h
    comp: list[int] = [0] * h
    ncomp = 0
    for root in range(h):
        if cls[root] is not None:
            continue
        cls[root] = 0
        comp[root] = ncomp
        queue = deque([root])
        while queue:
            i = queue.popleft()
            for j, step in adj[i]:
                c = (cls[i] + step) % f
                if cls[j] is None:
                    cls[j] = c
                    comp[j] = ncomp
                    queue.append(j)
                elif cls[j] != c:
                    raise ValueError("Frobenius does not permute isotypic blocks cyclically")
        ncomp += 1
    groups: dict[tuple[int, int], list[int]] = {}
    for i in range(h):
        groups.setdefault((comp[i], cls[i]), []).append(i)
    return [(key[1], idx) for key, idx in sorted(groups.items())]


def quasi_kisin_decompose(m: FiniteKisinModule, f: int | None = None) -> list[QuasiKisinBlock]:
    """Blocks of phi^f on the isotypic pieces.

    Checks the identity ``v(det A) = (p-1)/(p^f-1) * sum v(det block)``.
    """
    if f is None:
        f = m.field.f
    if f < 1:
        raise ValueError("f must be >= 1")
    groups = _frobenius_classes(m, f)
    B = composed_frobenius(m, f)
    h = m.rank
    for _, idx in groups:
        inside = set(idx)
        for i in idx:
            for j in range(h):
                if j not in inside and not B[i][j].is_zero():
                    raise ValueError("composed Frobenius is not block diagonal")
    Fq = make_field(m.field.p, max(f, m.field.f)) if m.field.f == 1 else m.field
    blocks = []
    for c, idx in groups:
        rows = [[_reencode(B[i][j], Fq) for j in idx] for i in idx]
        blocks.append(QuasiKisinBlock(Fq, tuple(tuple(r) for r in rows), c, tuple(idx)))
    p = m.field.p
    total = sum(b.det_valuation() for b in blocks)
    if Fraction(p - 1, p**f - 1) * total != det_valuation(m):
        raise ArithmeticError("quasi-Kisin valuation identity failed")
    return blocks


def _reencode(s: TruncSeries, F: FieldSpec) -> TruncSeries:
    if s.field == F:
        return s
    return TruncSeries(F, s.precision, s.coeffs)


def unramified_frobenius_matrix(p: int, f: int, phi: Sequence[int], e: int = 1) -> FiniteKisinModule:
    """Cyclic presentation for an unramified CM type of degree ``f``.

    ``phi(e_i) = u^e e_{i+1}`` when ``i`` is in ``phi`` and ``e_{i+1}`` otherwise
    (indices 1-based, cyclic).  Entries lie in F_p; the module is over F_{p^f}.
    """
    phi = sorted(set(phi))
    if not phi or any(not 1 <= a <= f for a in phi):
        raise ValueError("CM type must be a nonempty subset of 1..f")
    F = make_field(p, f)
    precision = e * f * p**f + 1
    rows = []
    for i in range(1, f + 1):
        row = []
        for j in range(1, f + 1):
            if j == i % f + 1:
                deg = e if i in phi else 0
                row.append(TruncSeries.monomial(F, deg, precision))
            else:
                row.append(TruncSeries.zero(F, precision))
        rows.append(row)
    return FiniteKisinModule(F, rows, e)


def diagonal_module(p: int, exponents: Sequence[int], e: int, precision: int | None = None) -> FiniteKisinModule:
    """``diag(u^a_1, ..., u^a_h)`` over F_p."""
    F = make_field(p, 1)
    if precision is None:
        precision = 2 * max(exponents) * p + 2
    h = len(exponents)
    rows = [
        [TruncSeries.monomial(F, a, precision) if i == j else TruncSeries.zero(F, precision) for j in range(h)]
        for i, a in enumerate(exponents)
    ]
    return FiniteKisinModule(F, rows, e)


def require_finite(v) -> int:
    if v == INF:
        raise PrecisionExhausted("valuation is infinite at this precision")
    return int(v)


__all__ = [
    "FiniteKisinModule",
    "QuasiKisinBlock",
    "apply_frobenius",
    "composed_frobenius",
    "det_valuation",
    "det_valuation_of",
    "determinant",
    "diagonal_module",
    "load_module",
    "module_from_polys",
    "quasi_kisin_decompose",
    "require_valuation",
    "serre_tensor_valuation",
    "unramified_frobenius_matrix",
    "wedge_basis",
    "wedge_power",
]
