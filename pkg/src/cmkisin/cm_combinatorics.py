"""Exponent combinatorics of unramified local CM types.

A local CM type is a subset ``phi`` of ``{1, ..., h}``; the embeddings are the
cyclic shifts ``tau_j(i) = i + j mod h``.  All Hodge values are exact rationals
in units of the Eisenstein degree ``e``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .algebra import is_prime


@dataclass(frozen=True)
class CMTypeLocal:
    h: int
    phi: tuple[int, ...]
    p: int

    def __post_init__(self) -> None:
        phi = tuple(sorted(self.phi))
        if len(set(phi)) != len(phi):
            raise ValueError("CM type elements must be distinct")
        if not 1 <= len(phi) <= self.h - 1:
            raise ValueError("a CM type needs between 1 and h-1 elements")
        if any(not 1 <= a <= self.h for a in phi):
            raise ValueError(f"CM type elements must lie in 1..{self.h}")
        if not is_prime(self.p):
            raise ValueError("p must be prime")
        object.__setattr__(self, "phi", phi)

    @property
    def d(self) -> int:
        """Number of embeddings outside the type."""
        return self.h - len(self.phi)


@dataclass(frozen=True)
class KernelType:
    """Non-increasing exponents ``lambdas`` of a subgroup of ``G[p^n]``."""

    lambdas: tuple[int, ...]
    n: int

    def __post_init__(self) -> None:
        lam = tuple(self.lambdas)
        if any(a < b for a, b in zip(lam, lam[1:])):
            raise ValueError("lambdas must be non-increasing")
        if any(not 0 <= a <= self.n for a in lam):
            raise ValueError("lambdas must lie in [0, n]")
        if lam and self.n > 0 and lam[0] != self.n:
            raise ValueError("the first exponent must equal n")
        object.__setattr__(self, "lambdas", lam)

    @property
    def k(self) -> int:
        """p-height: number of nonzero exponents."""
        return sum(1 for a in self.lambdas if a)


def _inverse_shift(j: int, alpha: int, h: int) -> int:
    """``tau_j^{-1}(alpha)`` on 1-based indices."""
    return (alpha - 1 + j) % h + 1


def reflex_weights(t: CMTypeLocal) -> dict[int, int]:
    """``w_j = sum_{alpha in phi} p^(h - tau_j^{-1}(alpha))`` for ``j = 0..h-1``."""
    return {j: sum(t.p ** (t.h - _inverse_shift(j, a, t.h)) for a in t.phi) for j in range(t.h)}


def min_subset_sum(weights: Mapping[int, int], k: int) -> tuple[int, tuple[int, ...]]:
    """Minimal sum over k-subsets, ties broken by the lexicographically smallest subset."""
    if not 1 <= k <= len(weights):
        raise ValueError(f"subset size must lie in 1..{len(weights)}")
    chosen = sorted(weights, key=lambda j: (weights[j], j))[:k]
    subset = tuple(sorted(chosen))
    best = sum(weights[j] for j in subset)
    # smallest value is forced; among subsets reaching it prefer the lexicographic minimum
    for cand in combinations(sorted(weights), k):
        if sum(weights[j] for j in cand) == best:
            return best, cand
    return best, subset  # pragma: no cover


def hodge_val_unram_p_torsion(t: CMTypeLocal, k: int) -> Fraction:
    """Hodge valuation (units of e) of the most degenerate height-k subgroup of ``G[p]``."""
    if not 1 <= k < t.h:
        raise ValueError("height must satisfy 1 <= k < h")
    m, _ = min_subset_sum(reflex_weights(t), k)
    return Fraction(m * (t.p - 1), t.p**t.h - 1)


def geometric_sum(p: int, n: int) -> Fraction:
    """``(1 - p^-n)/(1 - p^-1) = sum_{j=1}^{n} p^-(j-1)``."""
    return sum((Fraction(1, p ** (j - 1)) for j in range(1, n + 1)), Fraction(0))


def jump_ranges(lambdas: Sequence[int]) -> list[tuple[int, int, int]]:
    """Devissage ranges ``(d, lo, hi)``: levels ``j`` in ``(lo, hi]`` see ``d`` nonzero exponents."""
    out = []
    h = len(lambdas)
    ext = list(lambdas) + [0]
    for d in range(1, h + 1):
        hi, lo = ext[d - 1], ext[d]
        if hi > lo:
            out.append((d, lo, hi))
    return out


def hodge_val_unram_full(t: CMTypeLocal, kt: KernelType) -> Fraction:
    """Devissage sum ``sum_d sum_{j in (lambda_{d+1}, lambda_d]} min_d (p-1) / (p^(j-1) (p^h - 1))``."""
    if len(kt.lambdas) != t.h:
        raise ValueError("kernel type must have h exponents")
    if kt.k >= t.h:
        raise ValueError("the kernel must have p-height below h")
    w = reflex_weights(t)
    total = Fraction(0)
    for d, lo, hi in jump_ranges(kt.lambdas):
        m, _ = min_subset_sum(w, d)
        for j in range(lo + 1, hi + 1):
            total += Fraction(m * (t.p - 1), t.p ** (j - 1) * (t.p**t.h - 1))
    return total


def cm_types(h: int, size: int) -> Iterable[tuple[int, ...]]:
    return combinations(range(1, h + 1), size)


def kernel_types(h: int, n: int) -> Iterable[KernelType]:
    """All non-increasing exponent tuples with first entry n and p-height below h."""

    def rec(prefix: list[int], left: int, cap: int):
        if left == 0:
            yield tuple(prefix)
            return
        for a in range(cap, -1, -1):
            yield from rec(prefix + [a], left - 1, a)

    if n == 0:
        yield KernelType((0,) * h, 0)
        return
    for tail in rec([], h - 1, n):
        lam = (n, *tail)
        if lam[-1] == 0:
            yield KernelType(lam, n)


def unram_supremum(p: int, h: int, d: int, k: int, n: int) -> Fraction:
    """Exact maximum of the devissage formula over CM types with ``h - d`` elements
    and kernels of ``G[p^n]`` with ``k`` nonzero exponents."""
    if not 1 <= d <= h - 1:
        raise ValueError("d must satisfy 1 <= d <= h-1")
    if not 1 <= k < h:
        raise ValueError("height must satisfy 1 <= k < h")
    if n == 0:
        return Fraction(0)
    best = Fraction(0)
    kernels = [kt for kt in kernel_types(h, n) if kt.k == k]
    for phi in cm_types(h, h - d):
        t = CMTypeLocal(h, phi, p)
        for kt in kernels:
            best = max(best, hodge_val_unram_full(t, kt))
    return best


def unram_bound(p: int, h: int, d: int, k: int, n: int) -> Fraction:
    """Closed-form bound for the Hodge coefficient of height-k subgroups of ``G[p^n]``.

    With ``delta = h/(h-d)`` integral this is
    ``(p-1)/(p^delta-1) * (1-p^-k)/(1-p^-1) * (1-p^-n)/(1-p^-1)``; otherwise
    :func:`unram_supremum`.  The closed form dominates the devissage formula for
    ``k = 1`` only; for larger heights the two smallest weights of an evenly
    spaced type repeat instead of dropping by a factor ``p``, and
    :func:`unram_supremum` is the true maximum.
    """
    if not 1 <= d <= h - 1:
        raise ValueError("d must satisfy 1 <= d <= h-1")
    if not 1 <= k < h:
        raise ValueError("height must satisfy 1 <= k < h")
    if n == 0:
        return Fraction(0)
    size = h - d
    if h % size == 0:
        delta = h // size
        return Fraction(p - 1, p**delta - 1) * geometric_sum(p, k) * geometric_sum(p, n)
    return unram_supremum(p, h, d, k, n)


__all__ = [
    "CMTypeLocal",
    "KernelType",
    "cm_types",
    "geometric_sum",
    "hodge_val_unram_full",
    "hodge_val_unram_p_torsion",
    "jump_ranges",
    "kernel_types",
    "min_subset_sum",
    "reflex_weights",
    "unram_bound",
    "unram_supremum",
]
