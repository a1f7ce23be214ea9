"""Deterministic refinement schedules and rational regular-polygon approximants.

2D: ``gon_rays(n)`` for n a power of two gives n directions at angles
2*pi*j/n, each rounded to a 2^24 grid and made primitive.  Rounding depends
only on the angle, so the sets are nested along powers of two, and the eight
directions of n = 8 are exactly the axes and diagonals.

Any d: ``grid_rays(d, r)`` lists every primitive integer vector with
sup-norm at most r; these are nested in r and symmetric under sign changes
and coordinate permutations.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product
from math import gcd

from .convex_core.exact import primitive
from .convex_core.polytope import Halfspace, Polytope
from .toric import Model

_GRID = 1 << 24


def gon_rays(n: int) -> list[tuple[int, int]]:
    if n < 3:
        raise ValueError("need at least 3 directions")
    rays = []
    for j in range(n):
        t = 2 * math.pi * j / n
        v = (round(_GRID * math.cos(t)), round(_GRID * math.sin(t)))
        rays.append(primitive(v))
    return rays


def grid_rays(d: int, r: int) -> list[tuple]:
    out = []
    for v in product(range(-r, r + 1), repeat=d):
        if any(v):
            g = 0
            for a in v:
                g = gcd(g, a)
            if g == 1:
                out.append(v)
    return out


def gon_schedule(k_min: int, k_max: int) -> list[Model]:
    """Models of 2^k directions, k = k_min..k_max."""
    return [Model(tuple(gon_rays(2**k))) for k in range(k_min, k_max + 1)]


def grid_schedule(d: int, r_max: int) -> list[Model]:
    return [Model(tuple(grid_rays(d, r))) for r in range(1, r_max + 1)]


def angular_schedule(levels: int, start: int = 2) -> list[Model]:
    return gon_schedule(start, start + levels - 1)


def schedule_by_name(name: str, levels: int, d: int = 2) -> list[Model]:
    """``2k-gon`` (levels k = 2..levels+1) or ``grid3d-r`` (r = 1..levels, any d)."""
    if name == "2k-gon":
        if d != 2:
            raise ValueError("the 2k-gon schedule is two-dimensional")
        return gon_schedule(2, levels + 1)
    if name == "grid3d-r":
        return grid_schedule(d, levels)
    raise ValueError(f"unknown schedule {name!r}")


def regular_gon(n: int, radius=1, max_denominator: int = 10_000) -> Polytope:
    """Rational n-gon circumscribed about a circle of the given inradius.

    Facet normals are exactly ``gon_rays(n)``; offsets |v|*radius are rounded
    to nearby rationals, and every half-space is checked to remain a facet.
    """
    rays = gon_rays(n)
    r = Fraction(radius)
    hs = [Halfspace(v, r * Fraction(math.hypot(*v)).limit_denominator(max_denominator)) for v in rays]
    P = Polytope.from_halfspaces(hs)
    if len(P.halfspaces) != n:
        raise ValueError(f"rounding dropped facets of the {n}-gon; raise max_denominator")
    return P


def octagon() -> Polytope:
    return regular_gon(8)
