"""Exact arithmetic over F_p, F_{p^f} and truncated power series in ``u``.

Field elements are plain integers.  An element of F_{p^f} is encoded by the
base-p digits of its coordinates on the power basis ``1, x, ..., x^{f-1}``
modulo the canonical modulus, so the prime subfield is ``range(p)`` and keeps
its usual encoding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from . import kernels

INF = math.inf


class PrecisionExhausted(ArithmeticError):
    """Raised when a result would depend on coefficients beyond a known precision."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    r = math.isqrt(n)
    for d in range(3, r + 1, 2):
        if n % d == 0:
            return False
    return True


# -- polynomials over F_p as coefficient lists (lowest degree first) ----------


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = [x % p for x in a]
    _trim(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], -1, p)
    while len(a) - 1 >= dm and a:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
        _trim(a)
    return a


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([c % p for c in out])


def _pgcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a, b = _trim([x % p for x in a]), _trim([x % p for x in b])
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _powmod_x(e: int, m: Sequence[int], p: int) -> list[int]:
    result, base = [1], [0, 1]
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        base = _pmod(_pmul(base, base, p), m, p)
        e >>= 1
    return result


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Rabin's test for a monic polynomial over F_p."""
    f = len(poly) - 1
    if f < 1:
        return False
    if f == 1:
        return True
    if poly[0] % p == 0:
        return False
    x = [0, 1]
    # x^(p^f) == x mod poly
    xq = _powmod_x(p**f, poly, p)
    if _trim([(a - b) % p for a, b in _zip_pad(xq, x)]):
        return False
    for r in {f // q for q in range(2, f + 1) if f % q == 0 and is_prime(q)}:
        xr = _powmod_x(p**r, poly, p)
        diff = _trim([(a - b) % p for a, b in _zip_pad(xr, x)])
        if len(_pgcd(poly, diff, p)) != 1:
            return False
    return True


def _zip_pad(a: Sequence[int], b: Sequence[int]) -> Iterable[tuple[int, int]]:
    n = max(len(a), len(b))
    return zip(list(a) + [0] * (n - len(a)), list(b) + [0] * (n - len(b)))


# -- fields -------------------------------------------------------------------


@dataclass(frozen=True)
class FieldSpec:
    """The field F_{p^f} with a fixed monic irreducible modulus."""

    p: int
    f: int
    modulus: tuple[int, ...]
    _tables: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    @property
    def q(self) -> int:
        return self.p**self.f

    @property
    def is_prime(self) -> bool:
        return self.f == 1

    def digits(self, a: int) -> list[int]:
        p = self.p
        out = []
        for _ in range(self.f):
            a, r = divmod(a, p)
            out.append(r)
        return out

    def from_digits(self, ds: Sequence[int]) -> int:
        a = 0
        for d in reversed(list(ds)):
            a = a * self.p + d % self.p
        return a

    def element(self, n: int) -> int:
        """Image of the integer ``n`` in the prime subfield."""
        return n % self.p

    def add(self, a: int, b: int) -> int:
        if self.f == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        return self.from_digits([x + y for x, y in zip(self.digits(a), self.digits(b))])

    def neg(self, a: int) -> int:
        if self.f == 1:
            return -a % self.p
        if self.p == 2:
            return a
        return self.from_digits([-x for x in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def scale(self, c: int, a: int) -> int:
        """Multiply ``a`` by the prime-field scalar ``c``."""
        if self.f == 1:
            return c * a % self.p
        return self.from_digits([c * x for x in self.digits(a)])

    def _log_exp(self) -> tuple[list[int], list[int]]:
        t = self._tables.get("logexp")
        if t is None:
            t = _build_log_exp(self)
            self._tables["logexp"] = t
        return t

    def mul(self, a: int, b: int) -> int:
        if self.f == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        log, exp = self._log_exp()
        return exp[(log[a] + log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        if self.f == 1:
            return pow(a, -1, self.p)
        log, exp = self._log_exp()
        return exp[(-log[a]) % (self.q - 1)]

    def pow(self, a: int, k: int) -> int:
        if self.f == 1:
            return pow(a, k, self.p)
        if a == 0:
            return 0 if k > 0 else 1
        log, exp = self._log_exp()
        return exp[(log[a] * k) % (self.q - 1)]

    def frob(self, a: int, times: int = 1) -> int:
        """Absolute Frobenius ``a -> a^(p^times)``."""
        if self.f == 1:
            return a
        return self.pow(a, pow(self.p, times % self.f))

    def frob_inv(self, a: int) -> int:
        if self.f == 1:
            return a
        return self.frob(a, self.f - 1)

    def elements(self) -> range:
        return range(self.q)


def _build_log_exp(F: FieldSpec) -> tuple[list[int], list[int]]:
    p, m = F.p, list(F.modulus)

    def mul_poly(a: int, b: int) -> int:
        prod = _pmul(F.digits(a), F.digits(b), p)
        return F.from_digits(_pmod(prod, m, p))

    order = F.q - 1
    for g in range(2, F.q):
        exp = [1] * order
        x = 1
        seen_one = False
        for i in range(1, order):
            x = mul_poly(x, g)
            if x == 1:
                seen_one = True
                break
            exp[i] = x
        if not seen_one:
            log = [0] * F.q
            for i, v in enumerate(exp):
                log[v] = i
            return log, exp
    if F.q == 2:
        return [0, 0], [1]
    raise ArithmeticError("no generator found")  # pragma: no cover


@lru_cache(maxsize=None)
def make_field(p: int, f: int = 1) -> FieldSpec:
    """Canonical F_{p^f}: modulus is the lexicographically smallest monic irreducible.

    Lexicographic order compares the lower coefficients as the integer
    ``sum c_i p^i``.  For f = 1 the modulus is ``x`` (the field is F_p itself).
    """
    if not isinstance(p, int) or not is_prime(p) or p >= 2**31:
        raise ValueError(f"p must be a prime below 2^31, got {p!r}")
    if f < 1:
        raise ValueError("extension degree must be >= 1")
    if f == 1:
        return FieldSpec(p, 1, (0, 1))
    for code in range(p**f):
        low = [(code // p**i) % p for i in range(f)]
        poly = low + [1]
        if is_irreducible(poly, p):
            return FieldSpec(p, f, tuple(poly))
    raise ArithmeticError("no irreducible polynomial found")  # pragma: no cover


# -- truncated power series -----------------------------------------------------


@dataclass(frozen=True)
class TruncSeries:
    """A power series in ``u`` over ``field`` known modulo ``u^precision``."""

    field: FieldSpec
    precision: int
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.precision < 1:
            raise ValueError("precision must be >= 1")
        c = list(self.coeffs[: self.precision])
        _trim(c)
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_coeffs(cls, F: FieldSpec, coeffs: Iterable[int], precision: int) -> "TruncSeries":
        return cls(F, precision, tuple(coeffs))

    @classmethod
    def monomial(cls, F: FieldSpec, degree: int, precision: int, coeff: int = 1) -> "TruncSeries":
        if degree >= precision:
            return cls(F, precision, ())
        return cls(F, precision, (0,) * degree + (coeff,))

    @classmethod
    def zero(cls, F: FieldSpec, precision: int) -> "TruncSeries":
        return cls(F, precision, ())

    @classmethod
    def one(cls, F: FieldSpec, precision: int) -> "TruncSeries":
        return cls(F, precision, (1,))

    # basic queries
    def is_zero(self) -> bool:
        return not self.coeffs

    def valuation(self) -> int | float:
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return INF

    def degree(self) -> int:
        """Degree of the stored polynomial part (-1 for zero)."""
        return len(self.coeffs) - 1

    def coefficient(self, i: int) -> int:
        if i >= self.precision:
            raise PrecisionExhausted(f"coefficient {i} requested at precision {self.precision}")
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def truncate(self, n: int) -> "TruncSeries":
        return TruncSeries(self.field, min(n, self.precision), self.coeffs)

    def _check(self, other: "TruncSeries") -> None:
        if self.field != other.field:
            raise ValueError("series over different fields")

    # ring operations
    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        self._check(other)
        F = self.field
        n = min(self.precision, other.precision)
        a, b = self.coeffs, other.coeffs
        m = min(max(len(a), len(b)), n)
        out = []
        for i in range(m):
            x = a[i] if i < len(a) else 0
            y = b[i] if i < len(b) else 0
            out.append(F.add(x, y))
        return TruncSeries(F, n, tuple(out))

    def __neg__(self) -> "TruncSeries":
        F = self.field
        return TruncSeries(F, self.precision, tuple(F.neg(c) for c in self.coeffs))

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        return self + (-other)

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        self._check(other)
        F = self.field
        n = min(self.precision, other.precision)
        if F.is_prime:
            out = kernels.mul_trunc(list(self.coeffs), list(other.coeffs), F.p, n)
        else:
            out = _mul_generic(F, self.coeffs, other.coeffs, n)
        return TruncSeries(F, n, tuple(out))

    def scale(self, c: int) -> "TruncSeries":
        F = self.field
        return TruncSeries(F, self.precision, tuple(F.mul(c, x) for x in self.coeffs))

    def shift(self, k: int) -> "TruncSeries":
        """Multiply by ``u^k`` (k >= 0) or divide by ``u^(-k)`` when that is exact."""
        if k >= 0:
            return TruncSeries(self.field, self.precision + k, (0,) * k + self.coeffs)
        k = -k
        if any(self.coeffs[:k]):
            raise ValueError("series is not divisible by the requested power of u")
        if self.precision - k < 1:
            raise PrecisionExhausted("division by u^k exhausts precision")
        return TruncSeries(self.field, self.precision - k, self.coeffs[k:])

    def inverse(self) -> "TruncSeries":
        """Inverse of a unit (constant term nonzero), by Newton-free recursion."""
        F = self.field
        n = self.precision
        a = self.coeffs
        if not a or a[0] == 0:
            raise ZeroDivisionError("series is not a unit")
        inv0 = F.inv(a[0])
        b = [inv0] + [0] * (n - 1)
        for k in range(1, n):
            acc = 0
            for i in range(1, min(k, len(a) - 1) + 1):
                if a[i] and b[k - i]:
                    acc = F.add(acc, F.mul(a[i], b[k - i]))
            b[k] = F.neg(F.mul(acc, inv0))
        return TruncSeries(F, n, tuple(b))

    def frobenius(self, times: int = 1) -> "TruncSeries":
        return frobenius_sigma(self, times)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (self.field, self.precision, self.coeffs) == (other.field, other.precision, other.coeffs)

    def __hash__(self) -> int:
        return hash((self.field.p, self.field.f, self.precision, self.coeffs))

    def agrees_with(self, other: "TruncSeries") -> bool:
        """Equality modulo the smaller of the two precisions."""
        n = min(self.precision, other.precision)
        return self.truncate(n).coeffs == other.truncate(n).coeffs

    def __repr__(self) -> str:
        terms = [f"{c}*u^{i}" for i, c in enumerate(self.coeffs) if c]
        body = " + ".join(terms) if terms else "0"
        return f"TruncSeries({body} + O(u^{self.precision}))"

    # serialization
    def to_json(self) -> dict:
        return {"p": self.field.p, "f": self.field.f, "precision": self.precision, "coeffs": list(self.coeffs)}

    @classmethod
    def from_json(cls, data: dict) -> "TruncSeries":
        F = make_field(int(data["p"]), int(data.get("f", 1)))
        return cls(F, int(data["precision"]), tuple(int(c) for c in data["coeffs"]))


def _mul_generic(F: FieldSpec, a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    out = [0] * min(n, max(len(a) + len(b) - 1, 0))
    for i, x in enumerate(a):
        if not x or i >= n:
            continue
        for j, y in enumerate(b):
            if i + j >= n:
                break
            if y:
                out[i + j] = F.add(out[i + j], F.mul(x, y))
    return out


def valuation(s: TruncSeries) -> int | float:
    """Index of the first nonzero coefficient, or ``INF`` if none below precision."""
    return s.valuation()


def require_valuation(s: TruncSeries) -> int:
    """Like :func:`valuation` but raise when the series vanishes to its precision."""
    v = s.valuation()
    if v == INF:
        raise PrecisionExhausted(f"series vanishes modulo u^{s.precision}")
    return int(v)


def frobenius_sigma(s: TruncSeries, times: int = 1) -> TruncSeries:
    """Apply ``c u^i -> c^(p^times) u^(i p^times)``; precision is kept."""
    if times < 0:
        raise ValueError("times must be >= 0")
    if times == 0:
        return s
    F = s.field
    n = s.precision
    step = F.p**times
    out = [0] * min(n, (len(s.coeffs) - 1) * step + 1 if s.coeffs else 0)
    for i, c in enumerate(s.coeffs):
        j = i * step
        if j >= n:
            break
        if c:
            out[j] = F.frob(c, times)
    return TruncSeries(F, n, tuple(out))


def default_precision(max_entry_degree: int) -> int:
    """Precision helper ``2 * max degree + 1``."""
    return 2 * max_entry_degree + 1
