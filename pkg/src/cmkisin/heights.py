"""Closed-form variation of the Faltings height under p-power isogenies.

Every result is a :class:`HeightDelta` meaning ``Delta h = c log p`` (or a
bound or range on ``c``).  Level-j contributions of a devissage carry the
factor ``p^-(j-1)``, so level 1 reproduces the p-torsion value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import is_prime
from .cm_combinatorics import geometric_sum

EXACT = "exact"
LOWER_BOUND = "lower_bound"
RANGE = "range"


def _frac_json(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator}


@dataclass(frozen=True)
class HeightDelta:
    coefficient: Fraction
    prime: int
    qualifier: str = EXACT
    bounds: tuple[Fraction, Fraction] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "coefficient", Fraction(self.coefficient))
        if self.qualifier not in (EXACT, LOWER_BOUND, RANGE):
            raise ValueError(f"unknown qualifier {self.qualifier!r}")
        if self.qualifier == RANGE and self.bounds is None:
            raise ValueError("a range needs bounds")

    def to_json(self) -> dict:
        out = {"coefficient": _frac_json(self.coefficient), "prime": self.prime, "qualifier": self.qualifier}
        if self.bounds is not None:
            out["min"] = _frac_json(self.bounds[0])
            out["max"] = _frac_json(self.bounds[1])
        return out


def isogeny_delta(log_deg_coeff: Fraction | int, hodge_coeff: Fraction | int, p: int) -> HeightDelta:
    """``c = log_deg/2 - hodge`` for an isogeny of degree ``p^log_deg``."""
    hodge_coeff = Fraction(hodge_coeff)
    if hodge_coeff < 0:
        raise ValueError("Hodge coefficient must be >= 0")
    return HeightDelta(Fraction(log_deg_coeff) / 2 - hodge_coeff, p)


# -- quadratic characters ------------------------------------------------------


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol ``(a/n)``."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker_symbol(p: int, d: int) -> int:
    """Splitting behaviour of ``p`` in the quadratic field of discriminant ``d``: ``(d/p)``."""
    if not is_prime(p):
        raise ValueError("p must be prime")
    if d == 0:
        raise ValueError("d must be nonzero")
    return kronecker(d, p)


def is_fundamental_discriminant(d: int) -> bool:
    if d == 1 or d == 0:
        return False
    if d % 4 == 1:
        return _squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def _squarefree(n: int) -> bool:
    n = abs(n)
    f = 2
    while f * f <= n:
        if n % (f * f) == 0:
            return False
        f += 1
    return True


def factorize(n: int) -> dict[int, int]:
    if n < 1:
        raise ValueError("n must be positive")
    out: dict[int, int] = {}
    f = 2
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def elliptic_coefficient(p: int, d: int, r: int) -> Fraction:
    """``(r - (1-chi)/(p-chi) * S_r) / 2`` with ``chi = (d/p)``."""
    chi = kronecker_symbol(p, d)
    return (Fraction(r) - Fraction(1 - chi, p - chi) * geometric_sum(p, r)) / 2


def elliptic_delta(d: int, n_factorization: Mapping[int, int]) -> list[HeightDelta]:
    """Per-prime coefficients for a CM elliptic curve of discriminant ``d``."""
    if d == 0:
        raise ValueError("discriminant must be nonzero")
    if d >= 0 or d % 4 not in (0, 1):
        raise ValueError("d must be a negative discriminant (0 or 1 mod 4)")
    out = []
    for p in sorted(n_factorization):
        r = n_factorization[p]
        if r < 0:
            raise ValueError("exponents must be >= 0")
        out.append(HeightDelta(elliptic_coefficient(p, d, r), p))
    return out


# -- abelian surfaces with cyclic quartic CM ------------------------------------------


@dataclass(frozen=True)
class SurfaceKernelSpec:
    n: int
    lambdas: tuple[int, int, int] | None = None

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("n must be >= 0")
        if self.lambdas is not None:
            lam = tuple(int(x) for x in self.lambdas)
            if len(lam) != 3 or any(x < 0 for x in lam):
                raise ValueError("lambdas must be three non-negative integers")
            if not lam[0] >= lam[1] >= lam[2]:
                raise ValueError("lambdas must be non-increasing")
            if sum(lam) != self.n:
                raise ValueError("lambdas must sum to n")
            object.__setattr__(self, "lambdas", lam)


def balanced_partition(n: int) -> tuple[int, int, int]:
    q, r = divmod(n, 3)
    return tuple([q + 1] * r + [q] * (3 - r))  # type: ignore[return-value]


def _ranges(lam: Sequence[int]) -> list[tuple[int, int]]:
    """Index ranges ``(lo, hi]`` for the three devissage sums."""
    l1, l2, l3 = lam
    return [(l2, l1), (l3, l2), (0, l3)]


def _devissage_sum(p: int, lam: Sequence[int], numerators: Sequence[int]) -> Fraction:
    """``sum over the three ranges of numerator / p^(j-1)``; empty ranges add 0."""
    total = Fraction(0)
    for (lo, hi), num in zip(_ranges(lam), numerators):
        for j in range(lo + 1, hi + 1):
            total += Fraction(num, p ** (j - 1))
    return total


def case8_correction(p: int, lam: Sequence[int]) -> Fraction:
    nums = (p + 1, (p + 1) ** 2, (p**2 + 2) * (p + 1))
    return Fraction(p - 1, p**4 - 1) * _devissage_sum(p, lam, nums)


def r_polynomials(p: int) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    """Value sets ``R_1, R_2, R_3`` for the totally ramified cyclic quartic case."""
    if p == 2:
        return (8,), (24,), (40,)
    if not is_prime(p) or p % 4 != 1:
        raise ValueError("needs p = 2 or a prime p = 1 mod 4")
    r1 = (p**4 - p**2, p**4 - p**3 + p**2 - p, p**4 - p**3 + p - 1)
    r2 = (
        3 * p**4 - 2 * p**3 - p**2,
        3 * p**4 - 3 * p**3 + p**2 - p,
        3 * p**4 - 3 * p**3 + p - 1,
        2 * p**4 - 2 * p**2,
        2 * p**4 - p**3 - p**2 + p - 1,
    )
    r3 = (5 * p**4 - 4 * p**3 - p**2, 5 * p**4 - 5 * p**3 + p**2 - p, 5 * p**4 - 5 * p**3 + p - 1)
    return r1, r2, r3


def case9_corrections(p: int, lam: Sequence[int]) -> tuple[Fraction, Fraction]:
    """Smallest and largest correction over the listed ``R_i`` values."""
    rs = r_polynomials(p)
    pref = Fraction(1, 4 * (p**4 - p**3))
    lo = pref * _devissage_sum(p, lam, [min(r) for r in rs])
    hi = pref * _devissage_sum(p, lam, [max(r) for r in rs])
    return lo, hi


_SIMPLE_CORRECTIONS = {
    4: lambda p: Fraction(1, p + 1),
    5: lambda p: Fraction(1, 2 * p),
    6: lambda p: Fraction(2, p + 1),
    7: lambda p: Fraction(1, p * (p + 1)),
}


def surface_delta(case: int, p: int, spec: SurfaceKernelSpec) -> HeightDelta:
    """Height variation for the nine splitting cases of a cyclic quartic CM field."""
    if not is_prime(p):
        raise ValueError("p must be prime")
    n = spec.n
    half = Fraction(n, 2)
    if case in (1, 2, 3):
        return HeightDelta(half, p)
    if case in _SIMPLE_CORRECTIONS:
        return HeightDelta(half - _SIMPLE_CORRECTIONS[case](p) * geometric_sum(p, n), p)
    if case in (8, 9):
        lam = spec.lambdas if spec.lambdas is not None else balanced_partition(n)
        if case == 8:
            return HeightDelta(half - case8_correction(p, lam), p)
        if not (p == 2 or p % 4 == 1):
            raise ValueError("case 9 needs p = 2 or p = 1 mod 4")
        lo, hi = case9_corrections(p, lam)
        if lo == hi:
            return HeightDelta(half - lo, p)
        return HeightDelta(half - hi, p, RANGE, (half - hi, half - lo))
    raise ValueError("case must be 1..9")


# -- general splitting -----------------------------------------------------------


@dataclass(frozen=True)
class PrimeFactorData:
    """One prime of E above p, with its part of the kernel."""

    nu: int
    f: int
    ramified: bool = False
    rho: int = 1
    h: int = 1
    d: int = 0
    n: int = 0
    k: int = 0

    def __post_init__(self) -> None:
        if self.nu < 1 or self.f < 1 or self.rho < 1 or self.h < 1:
            raise ValueError("nu, f, rho, h must be >= 1")
        if not 0 <= self.d <= self.h:
            raise ValueError("d must lie in 0..h")
        if self.n < 0 or self.k < 0:
            raise ValueError("n and k must be >= 0")


@dataclass(frozen=True)
class SplittingDescriptor:
    primes: tuple[PrimeFactorData, ...]
    degree: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "primes", tuple(self.primes))
        if not self.primes:
            raise ValueError("at least one prime is required")
        if self.degree is not None and sum(q.nu * q.f for q in self.primes) != self.degree:
            raise ValueError("sum of nu_i f_i must equal [E:Q]")

    @classmethod
    def from_json(cls, data: Mapping) -> "SplittingDescriptor":
        primes = tuple(
            PrimeFactorData(
                nu=int(q["nu"]),
                f=int(q["f"]),
                ramified=bool(q.get("ramified", False)),
                rho=int(q.get("rho", 1)),
                h=int(q.get("h", 1)),
                d=int(q.get("d", 0)),
                n=int(q.get("n", 0)),
                k=int(q.get("k", 0)),
            )
            for q in data["primes"]
        )
        deg = data.get("degree")
        return cls(primes, int(deg) if deg is not None else None)


def _unramified_term(p: int, q: PrimeFactorData) -> Fraction:
    if q.f <= 1:
        return Fraction(0)
    return q.nu * Fraction(p - 1, p**q.f - 1) * geometric_sum(p, q.k) * geometric_sum(p, q.n)


def _ramified_term(p: int, q: PrimeFactorData) -> Fraction:
    return (
        Fraction(1, q.rho) * Fraction(p - 1, p**q.f - 1) * Fraction(q.h - q.d, q.h) * geometric_sum(p, q.n)
    )


def general_delta_bound(desc: SplittingDescriptor, r: int, p: int) -> HeightDelta:
    """Exact value when p splits completely, otherwise a lower bound."""
    if not is_prime(p):
        raise ValueError("p must be prime")
    half = Fraction(r, 2)
    primes = desc.primes
    if all(q.nu == 1 and q.f == 1 and not q.ramified for q in primes):
        return HeightDelta(half, p)
    correction = sum(
        (_ramified_term(p, q) if q.ramified else _unramified_term(p, q) for q in primes), Fraction(0)
    )
    return HeightDelta(half - correction, p, LOWER_BOUND)


__all__ = [
    "HeightDelta",
    "PrimeFactorData",
    "SplittingDescriptor",
    "SurfaceKernelSpec",
    "balanced_partition",
    "case8_correction",
    "case9_corrections",
    "elliptic_coefficient",
    "elliptic_delta",
    "factorize",
    "general_delta_bound",
    "is_fundamental_discriminant",
    "isogeny_delta",
    "kronecker",
    "kronecker_symbol",
    "r_polynomials",
    "surface_delta",
]
