"""Lubin-Tate iteration over (Z/p)[pi]/(pi^h) and the ramified CM presets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .algebra import TruncSeries, is_prime, make_field
from .kisin_core import FiniteKisinModule

PRESETS = ("h2-level2", "h4-cyclic")


def _prime_of(q: int) -> int:
    for p in range(2, q + 1):
        if q % p == 0:
            n = q
            while n % p == 0:
                n //= p
            if n != 1 or not is_prime(p):
                break
            return p
    raise ValueError(f"{q} is not a prime power")


@dataclass(frozen=True)
class PiPolynomial:
    """Polynomial in ``u`` with coefficients in (Z/p)[pi]/(pi^h).

    ``coeffs[d][k]`` is the coefficient of ``pi^k u^d``.
    """

    p: int
    h: int
    coeffs: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        rows = [tuple(c % self.p for c in r) + (0,) * (self.h - len(r)) for r in self.coeffs]
        if any(len(r) != self.h for r in rows):
            raise ValueError("pi-adic coefficient vector longer than h")
        while rows and not any(rows[-1]):
            rows.pop()
        object.__setattr__(self, "coeffs", tuple(rows))

    @classmethod
    def u(cls, p: int, h: int) -> "PiPolynomial":
        return cls(p, h, ((0,) * h, (1,) + (0,) * (h - 1)))

    @classmethod
    def constant(cls, p: int, h: int, vec: Sequence[int]) -> "PiPolynomial":
        return cls(p, h, (tuple(vec),))

    @classmethod
    def pi_times(cls, p: int, h: int, unit: int = 1) -> "PiPolynomial":
        vec = [0] * h
        if h > 1:
            vec[1] = unit % p
        return cls(p, h, (tuple(vec),))

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __add__(self, other: "PiPolynomial") -> "PiPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        z = (0,) * self.h
        a = list(self.coeffs) + [z] * (n - len(self.coeffs))
        b = list(other.coeffs) + [z] * (n - len(other.coeffs))
        return PiPolynomial(self.p, self.h, tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(a, b)))

    def __mul__(self, other: "PiPolynomial") -> "PiPolynomial":
        p, h = self.p, self.h
        if not self.coeffs or not other.coeffs:
            return PiPolynomial(p, h, ())
        out = [[0] * h for _ in range(len(self.coeffs) + len(other.coeffs) - 1)]
        bnz = [(j, [(y, c) for y, c in enumerate(b) if c]) for j, b in enumerate(other.coeffs) if any(b)]
        for i, a in enumerate(self.coeffs):
            anz = [(x, c) for x, c in enumerate(a) if c]
            if not anz:
                continue
            for j, bt in bnz:
                o = out[i + j]
                for x, ca in anz:
                    for y, cb in bt:
                        if x + y < h:
                            o[x + y] += ca * cb
        return PiPolynomial(p, h, tuple(tuple(r) for r in out))

    def __pow__(self, n: int) -> "PiPolynomial":
        result = PiPolynomial.constant(self.p, self.h, (1,) + (0,) * (self.h - 1))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def pi_component(self, k: int) -> list[int]:
        """Coefficients (in u) of ``pi^k``."""
        return [r[k] for r in self.coeffs]

    def reduce_mod_pi(self) -> list[int]:
        return self.pi_component(0)


def lt_iterate(q: int, s: int, *, h: int, unit: int = 1) -> PiPolynomial:
    """``[(c pi)^s](u)`` for ``[c pi](u) = c pi u + u^q``, with ``[pi^0](u) = u``."""
    if s < 0:
        raise ValueError("level must be >= 0")
    p = _prime_of(q)
    x = PiPolynomial.u(p, h)
    cpi = PiPolynomial.pi_times(p, h, unit)
    for _ in range(s):
        x = cpi * x + x**q
    return x


def level_factor(q: int, s: int, *, h: int, unit: int = 1) -> PiPolynomial:
    """``c pi + ([(c pi)^{s-1}](u))^{q-1}``, of u-degree ``q^{s-1}(q-1)``."""
    if s < 1:
        raise ValueError("level must be >= 1")
    p = _prime_of(q)
    return PiPolynomial.pi_times(p, h, unit) + lt_iterate(q, s - 1, h=h, unit=unit) ** (q - 1)


@dataclass(frozen=True)
class RamifiedPreset:
    """Totally ramified CM data of degree ``h`` at level ``level``."""

    p: int
    h: int
    level: int

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError("p must be prime")
        if self.h not in (2, 4):
            raise ValueError("only h = 2 and h = 4 presets exist")
        if self.h == 4 and not (self.p == 2 or self.p % 4 == 1):
            raise ValueError("a cyclic quartic totally ramified field needs p = 2 or p = 1 mod 4")
        if self.level < 1:
            raise ValueError("level must be >= 1")

    @property
    def e(self) -> int:
        q = self.p
        return self.h * q ** (self.level - 1) * (q - 1)


def named_preset(name: str, p: int) -> RamifiedPreset:
    if name == "h2-level2":
        return RamifiedPreset(p, 2, 2)
    if name == "h4-cyclic":
        return RamifiedPreset(p, 4, 4)
    raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")


def primitive_root_of_unity(p: int, order: int) -> int:
    if (p - 1) % order:
        raise ValueError(f"F_{p} has no primitive {order}th root of unity")
    for z in range(2, p):
        if pow(z, order, p) == 1 and all(pow(z, order // r, p) != 1 for r in range(2, order + 1) if order % r == 0 and is_prime(r)):
            return z
    if order == 1:
        return 1
    raise ArithmeticError("no primitive root found")  # pragma: no cover


def conjugate_units(preset: RamifiedPreset, phi: Sequence[int], units: str = "absorbed") -> list[int]:
    """Units ``c_i`` attached to the conjugates outside the CM type.

    ``absorbed`` sets every unit to 1.  ``galois`` uses ``zeta^i`` for a fixed
    primitive h-th root of unity ``zeta`` of F_p (smallest such integer).
    """
    comp = [i for i in range(1, preset.h + 1) if i not in set(phi)]
    if units == "absorbed":
        return [1] * len(comp)
    if units == "galois":
        if preset.p == 2:
            return [1] * len(comp)
        z = primitive_root_of_unity(preset.p, preset.h)
        return [pow(z, i, preset.p) for i in comp]
    raise ValueError("units must be 'absorbed' or 'galois'")


def toeplitz_entries(preset: RamifiedPreset, phi: Sequence[int] | None = None, units: str = "absorbed") -> list[list[int]]:
    """Coefficient lists of ``a_1, ..., a_h``: the pi-adic digits of the product of level factors."""
    if phi is None:
        phi = list(range(1, preset.h // 2 + 1))
    phi = sorted(set(phi))
    if len(phi) != preset.h // 2:
        raise ValueError("CM type must have h/2 elements")
    cs = conjugate_units(preset, phi, units)
    p, h = preset.p, preset.h
    if p >= 5 and sum(cs) % p == 0:
        raise ValueError("non-degeneracy fails: the conjugate units sum to zero mod p")
    prod = PiPolynomial.constant(p, h, (1,) + (0,) * (h - 1))
    for c in cs:
        prod = prod * level_factor(p, preset.level, h=h, unit=c)
    return [prod.pi_component(k) for k in range(h)]


def degree_hypotheses(entries: Sequence[Sequence[int]], p: int) -> dict:
    """Check the degree conditions under which a Toeplitz system has at most h lines.

    Conditions: ``deg a_i > deg a_j`` and
    ``p deg a_i + deg a_{k-i+1} > p deg a_j + deg a_{k-j+1}`` for ``i < j <= k``.
    """
    degs = []
    for a in entries:
        nz = [d for d, c in enumerate(a) if c % p]
        degs.append(nz[-1] if nz else None)
    h = len(degs)
    decreasing = None not in degs and all(degs[i] > degs[i + 1] for i in range(h - 1))
    products = decreasing and all(
        p * degs[i] + degs[k - i] > p * degs[j] + degs[k - j]
        for k in range(h)
        for i in range(k + 1)
        for j in range(i + 1, k + 1)
    )
    return {"degrees": degs, "decreasing": decreasing, "products": bool(products)}


def ramified_frobenius_matrix(
    preset: RamifiedPreset,
    phi: Sequence[int] | None = None,
    *,
    units: str = "absorbed",
    precision: int | None = None,
) -> FiniteKisinModule:
    """Upper-Toeplitz Frobenius matrix on the basis ``1, pi, ..., pi^{h-1}``.

    Entry ``(i, j)`` with ``j >= i`` is ``a_{j-i+1}``.  Default precision is
    ``2 * v(det) + 1``.
    """
    a = toeplitz_entries(preset, phi, units)
    h = preset.h
    if precision is None:
        precision = 2 * h * (len(a[0]) - 1) + 1
    F = make_field(preset.p, 1)
    zero = TruncSeries.zero(F, precision)
    series = [TruncSeries(F, precision, tuple(c)) for c in a]
    rows = [[series[j - i] if j >= i else zero for j in range(h)] for i in range(h)]
    return FiniteKisinModule(F, rows, preset.e)


def preset_module(name: str, p: int, *, units: str = "absorbed", precision: int | None = None) -> FiniteKisinModule:
    return ramified_frobenius_matrix(named_preset(name, p), units=units, precision=precision)


__all__ = [
    "PRESETS",
    "PiPolynomial",
    "RamifiedPreset",
    "conjugate_units",
    "degree_hypotheses",
    "level_factor",
    "lt_iterate",
    "named_preset",
    "preset_module",
    "primitive_root_of_unity",
    "ramified_frobenius_matrix",
    "toeplitz_entries",
]
