"""Mixed volumes, support evaluation, circumscription and inclusion radii."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb, factorial
from typing import Sequence, Union

import numpy as np

from .exact import dot, to_fraction, to_vec
from .lp import OPTIMAL, UNBOUNDED, maximize
from .oracle import SupportOracle
from .polytope import Halfspace, Polytope, convex_hull, minkowski_sum

logger = logging.getLogger(__name__)

Body = Union[Polytope, SupportOracle]


class NonConvergence(RuntimeError):
    """An iterative computation exhausted its budget; carries the last state."""

    def __init__(self, message: str, **state):
        super().__init__(message)
        self.state = state


def support_eval(body: Body, u: Sequence):
    """h_K(u) = max over K of <x, u>; exact for polytopes and rational u."""
    if not any(u):
        raise ValueError("support function evaluated at the zero direction")
    if isinstance(body, Polytope):
        if all(isinstance(a, (int, Fraction)) for a in u):
            return body.support(tuple(u))
        return body.support(u)
    return body(u)


def circumscribed_polytope(body: Body, rays: Sequence[Sequence[int]]) -> Polytope:
    """{x : <x, r> <= h(r) for r in rays}; oracle values are taken exactly as floats."""
    hs = []
    for r in rays:
        if isinstance(body, Polytope):
            val = body.support(tuple(r))
        else:
            val = Fraction(body(np.asarray(r, dtype=float)))
        hs.append(Halfspace(tuple(r), to_fraction(val)))
    return Polytope.from_halfspaces(hs)


def inner_polytope(body: Body, rays: Sequence[Sequence[int]], shrink: float = 1e-12) -> Polytope:
    """Hull of touching points at the given rays.

    Oracle touching points are floats; they are pulled toward their centroid
    by a relative ``shrink`` so rounding cannot push them outside the body.
    """
    if isinstance(body, Polytope):
        return body
    pts = np.array([body.touching_point(np.asarray(r, dtype=float)) for r in rays])
    c = pts.mean(axis=0)
    pts = c + (1.0 - shrink) * (pts - c)
    return convex_hull([tuple(Fraction(float(x)) for x in p) for p in pts])


# ----------------------------------------------------------------------
# mixed volume


def _scaled_sum(bodies: Sequence[Polytope], counts: Sequence[int]) -> Polytope:
    acc = None
    for K, k in zip(bodies, counts):
        if k == 0:
            continue
        term = K.scale(k) if k != 1 else K
        acc = term if acc is None else minkowski_sum(acc, term)
    return acc


def mixed_volume_polytopes(bodies: Sequence[Polytope]) -> Fraction:
    """Exact mixed volume by inclusion-exclusion over Minkowski sums.

    Repeated bodies are grouped so each distinct multiset of summands is
    hulled only once.
    """
    d = bodies[0].dim
    if len(bodies) != d:
        raise ValueError(f"mixed volume in dimension {d} needs {d} bodies, got {len(bodies)}")
    if any(K.dim != d for K in bodies):
        raise ValueError("bodies have mismatched dimensions")
    distinct: list[Polytope] = []
    mult = Counter()
    for K in bodies:
        for i, D in enumerate(distinct):
            if D is K or D == K:
                mult[i] += 1
                break
        else:
            distinct.append(K)
            mult[len(distinct) - 1] += 1
    ns = [mult[i] for i in range(len(distinct))]
    total = Fraction(0)
    for counts in product(*(range(n + 1) for n in ns)):
        size = sum(counts)
        if size == 0:
            continue
        coeff = 1
        for n, k in zip(ns, counts):
            coeff *= comb(n, k)
        vol = _scaled_sum(distinct, counts).volume
        total += (-1) ** (d - size) * coeff * vol
    return total / factorial(d)


@dataclass(frozen=True)
class MixedVolumeBracket:
    lower: float | None
    upper: float
    level: int


def mixed_volume(bodies: Sequence[Body], schedule: Sequence | None = None, tol: float = 1e-9):
    """V(K_1, ..., K_d), normalized so V(K, ..., K) = volume(K).

    Exact (Fraction) when every body is a polytope.  Oracle bodies are
    circumscribed along ``schedule`` (a list of ray sets or Models) and the
    decreasing outer values are returned once they agree with the inner
    (touching-point) values to relative ``tol``.
    """
    if not bodies:
        raise ValueError("mixed volume of no bodies")
    d = bodies[0].dim
    if len(bodies) != d:
        raise ValueError(f"mixed volume in dimension {d} needs {d} bodies, got {len(bodies)}")
    if all(isinstance(K, Polytope) for K in bodies):
        return mixed_volume_polytopes(bodies)
    if not schedule:
        raise ValueError("oracle bodies need a refinement schedule")
    last = None
    prev_upper = None
    for level, model in enumerate(schedule):
        rays = getattr(model, "rays", model)
        outer = [K if isinstance(K, Polytope) else circumscribed_polytope(K, rays) for K in bodies]
        upper = float(mixed_volume_polytopes(outer))
        lower = None
        if all(isinstance(K, Polytope) or K.point is not None for K in bodies):
            inner = [K if isinstance(K, Polytope) else inner_polytope(K, rays) for K in bodies]
            lower = float(mixed_volume_polytopes(inner))
        last = MixedVolumeBracket(lower, upper, level)
        scale = max(1.0, abs(upper))
        if lower is not None and upper - lower <= tol * scale:
            return upper
        if lower is None and prev_upper is not None and abs(prev_upper - upper) <= tol * scale:
            return upper
        prev_upper = upper
    raise NonConvergence("mixed volume schedule exhausted before the bracket closed", bracket=last)


# ----------------------------------------------------------------------
# inclusion radius


def inclusion_radius(K: Polytope, L: Polytope) -> tuple[Fraction, tuple]:
    """Largest s >= 0 with s*L + m inside K for some translation m (exact LP)."""
    if K.dim != L.dim:
        raise ValueError("dimension mismatch")
    if not L.fulldim:
        raise ValueError("inclusion radius needs a full-dimensional inner body")
    d = K.dim
    A, b = [], []
    for h in K.halfspaces:
        A.append((L.support(h.normal),) + tuple(Fraction(x) for x in h.normal))
        b.append(h.offset)
    A.append((Fraction(-1),) + tuple(Fraction(0) for _ in range(d)))
    b.append(Fraction(0))
    c = (Fraction(1),) + tuple(Fraction(0) for _ in range(d))
    res = maximize(c, A, b)
    if res.status == UNBOUNDED:
        raise ValueError("inclusion radius is unbounded")
    if res.status != OPTIMAL:
        raise ValueError("inclusion LP infeasible: the outer body is empty")
    s, m = res.witness[0], tuple(res.witness[1:])
    return s, m


def check_inclusion(K: Polytope, L: Polytope, s, m) -> bool:
    """Exact check that s*L + m is contained in K."""
    s, m = to_fraction(s), to_vec(m)
    return all(s * L.support(h.normal) + dot(h.normal, m) <= h.offset for h in K.halfspaces)
