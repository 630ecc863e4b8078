"""Harder-Narasimhan degree, slope, semistability and polygons.

Degree of a mod-p module is ``v(det A)/e``; a module is semistable when every
saturated submodule has slope at least the slope of the module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .kisin_core import FiniteKisinModule, det_valuation, det_valuation_of
from .line_solver import submodule_valuations


@dataclass(frozen=True)
class DegreeRank:
    degree: Fraction
    rank: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "degree", Fraction(self.degree))
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        if self.degree < 0:
            raise ValueError("degree must be >= 0")

    @property
    def slope(self) -> Fraction:
        return self.degree / self.rank


@dataclass(frozen=True)
class HNPolygon:
    breakpoints: tuple[tuple[int, Fraction], ...]

    @property
    def slopes(self) -> list[Fraction]:
        pts = self.breakpoints
        return [Fraction(d1 - d0, r1 - r0) for (r0, d0), (r1, d1) in zip(pts, pts[1:])]

    def to_json(self) -> list[dict]:
        return [{"rank": r, "degree": {"num": d.numerator, "den": d.denominator}} for r, d in self.breakpoints]


@dataclass(frozen=True)
class SemistabilityResult:
    semistable: bool
    certificate: tuple[int, int] | None = None

    def __bool__(self) -> bool:
        return self.semistable


def degree_rank(m: FiniteKisinModule) -> DegreeRank:
    return DegreeRank(Fraction(det_valuation(m), m.eisenstein_degree), m.rank)


def slope(m: FiniteKisinModule) -> Fraction:
    return degree_rank(m).slope


def submodule_slope(m: FiniteKisinModule, corank: int, mu: int) -> Fraction:
    """Slope of a saturated submodule of the given corank with ``v(det phi_N) = mu``."""
    return Fraction(mu, m.eisenstein_degree * (m.rank - corank))


def is_semistable(m: FiniteKisinModule) -> SemistabilityResult:
    """Check every realized submodule valuation against the module slope."""
    s = slope(m)
    for corank in range(1, m.rank):
        for mu in sorted(submodule_valuations(m, corank)):
            if submodule_slope(m, corank, mu) < s:
                return SemistabilityResult(False, (corank, mu))
    return SemistabilityResult(True, None)


def hn_polygon(increments: Sequence[DegreeRank]) -> HNPolygon:
    """Polygon from successive graded pieces; slopes must strictly increase."""
    if not increments:
        raise ValueError("at least one increment is required")
    pts = [(0, Fraction(0))]
    for inc in increments:
        r, d = pts[-1]
        pts.append((r + inc.rank, d + inc.degree))
    poly = HNPolygon(tuple(pts))
    sl = poly.slopes
    if any(a >= b for a, b in zip(sl, sl[1:])):
        raise ValueError("slopes of an HN polygon must strictly increase")
    return poly


def _lower_hull(points: list[tuple[int, Fraction]]) -> list[tuple[int, Fraction]]:
    pts = sorted(set(points))
    hull: list[tuple[int, Fraction]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def hn_polygon_of(m: FiniteKisinModule) -> HNPolygon:
    """Lower convex hull of ``(rank N, deg N)`` over realized saturated submodules.

    Realized values come from lines in the exterior powers; lines that are not
    decomposable are included as well, which only matters for rank >= 4 middle
    powers.
    """
    h = m.rank
    e = m.eisenstein_degree
    total = Fraction(det_valuation(m), e)
    pts = [(0, Fraction(0)), (h, total)]
    for corank in range(1, h):
        r = h - corank
        for mu in submodule_valuations(m, corank):
            pts.append((r, Fraction(mu, e)))
    hull = _lower_hull(pts)
    # only the hull from (0, 0) to (h, deg) matters
    return HNPolygon(tuple(hull))


def stable_quotient_slopes(m: FiniteKisinModule, pi_powers: Sequence[int]) -> list[Fraction]:
    """Slopes of the quotients ``M / pi^k M`` of an upper-triangular ramified preset.

    On the basis ``1, pi, ..., pi^{h-1}`` the submodule ``pi^k M`` is spanned by
    the last ``h - k`` vectors, so the quotient is governed by the top-left
    ``k x k`` block.
    """
    out = []
    for k in pi_powers:
        if not 1 <= k <= m.rank:
            raise ValueError("pi-power must lie in 1..h")
        block = [row[:k] for row in m.frobenius[:k]]
        out.append(Fraction(det_valuation_of(block), m.eisenstein_degree * k))
    return out


def pi_power_submodule_mu(m: FiniteKisinModule, rank: int) -> int:
    """``v(det phi)`` on ``pi^(h-rank) M``: the bottom-right ``rank x rank`` block."""
    h = m.rank
    if not 1 <= rank <= h:
        raise ValueError("rank must lie in 1..h")
    block = [row[h - rank :] for row in m.frobenius[h - rank :]]
    return det_valuation_of(block)


__all__ = [
    "DegreeRank",
    "HNPolygon",
    "SemistabilityResult",
    "degree_rank",
    "hn_polygon",
    "hn_polygon_of",
    "is_semistable",
    "pi_power_submodule_mu",
    "slope",
    "stable_quotient_slopes",
    "submodule_slope",
]
