"""Deterministic random polytope corpora.

Instance i of a spec draws from ``random.Random(seed * 1_000_003 + i)``, so
instances do not depend on ``count`` or on the order they are generated in.
Coordinates are rationals with a fixed denominator.
"""

from __future__ import annotations

import json
import math
import os
import random
from dataclasses import asdict, dataclass
from fractions import Fraction

from .convex_core.polytope import Polytope, convex_hull
from .schedules import regular_gon

FAMILIES = ("random-hull", "box", "regular-gon", "simplex")


@dataclass(frozen=True)
class CorpusSpec:
    seed: int
    dim: int
    count: int
    family: str = "random-hull"
    # facet cap; None means 10 in the plane and 12 otherwise
    max_facets: int | None = None
    denominator: int = 100
    radius: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        if self.dim < 2:
            raise ValueError("dimension must be at least 2")
        if self.count < 0:
            raise ValueError("count must be nonnegative")
        if self.family == "regular-gon" and self.dim != 2:
            raise ValueError("regular-gon is a planar family")

    @property
    def facet_cap(self) -> int:
        if self.max_facets is not None:
            return self.max_facets
        return 10 if self.dim == 2 else 12


def instance_rng(seed: int, i: int) -> random.Random:
    return random.Random(seed * 1_000_003 + i)


def _coord(rng: random.Random, q: int, r: int) -> Fraction:
    return Fraction(rng.randint(-r * q, r * q), q)


def random_hull(rng: random.Random, d: int, cap: int, q: int = 100, r: int = 1) -> Polytope:
    """Hull of a few random lattice points (scaled by 1/q); resampled until fulldim with <= cap facets."""
    # few points keep the facet count near the cap without rejection storms
    lo = d + 1
    hi = max(lo, 12 if d == 2 else min((cap + 4) // 2, 3 * d))
    while True:
        n = rng.randint(lo, hi)
        P = convex_hull([tuple(_coord(rng, q, r) for _ in range(d)) for _ in range(n)])
        if P.fulldim and len(P.halfspaces) <= cap:
            return P


def random_box(rng: random.Random, d: int, q: int = 100, r: int = 1) -> Polytope:
    lo, hi = [], []
    for _ in range(d):
        a, b = sorted(rng.sample(range(-r * q, r * q + 1), 2))
        lo.append(Fraction(a, q))
        hi.append(Fraction(b, q))
    return Polytope.box(lo, hi)


def random_simplex(rng: random.Random, d: int, q: int = 100, r: int = 1) -> Polytope:
    while True:
        P = convex_hull([tuple(_coord(rng, q, r) for _ in range(d)) for _ in range(d + 1)])
        if P.fulldim:
            return P


def random_regular_gon(rng: random.Random, cap: int) -> Polytope:
    """Rational approximant of a regular n-gon, 3 <= n <= cap, inradius 1."""
    return regular_gon(rng.randint(3, max(3, cap)))


def random_hexagon(rng: random.Random, q: int = 1000) -> Polytope:
    """Hexagon with rational vertices near the unit circle at random angles."""
    while True:
        angles = sorted(rng.uniform(0, 2 * math.pi) for _ in range(6))
        pts = [(Fraction(round(q * math.cos(a)), q), Fraction(round(q * math.sin(a)), q)) for a in angles]
        P = convex_hull(pts)
        if len(P.vertices) == 6:
            return P


def instance(spec: CorpusSpec, i: int) -> Polytope:
    rng = instance_rng(spec.seed, i)
    d, q, r = spec.dim, spec.denominator, spec.radius
    if spec.family == "random-hull":
        return random_hull(rng, d, spec.facet_cap, q, r)
    if spec.family == "box":
        return random_box(rng, d, q, r)
    if spec.family == "simplex":
        return random_simplex(rng, d, q, r)
    return random_regular_gon(rng, spec.facet_cap)


def generate(spec: CorpusSpec) -> list[Polytope]:
    return [instance(spec, i) for i in range(spec.count)]


def random_pair(rng: random.Random, d: int, homothetic: bool = False) -> tuple[Polytope, Polytope]:
    """Two random hulls, or a hull and a positive rational homothetic copy."""
    cap = 10 if d == 2 else 12
    a = random_hull(rng, d, cap)
    if homothetic:
        t = Fraction(rng.randint(1, 40), rng.randint(1, 20))
        m = tuple(_coord(rng, 10, 2) for _ in range(d))
        return a, a.scale(t).translate(m)
    return a, random_hull(rng, d, cap)


def write(spec: CorpusSpec, outdir: str) -> list[str]:
    """Write one JSON file per instance plus a manifest; returns the file names."""
    from .serialize import dumps

    os.makedirs(outdir, exist_ok=True)
    names = []
    for i, P in enumerate(generate(spec)):
        name = f"{spec.family}-d{spec.dim}-s{spec.seed}-{i:04d}.json"
        with open(os.path.join(outdir, name), "w") as fh:
            fh.write(dumps(P) + "\n")
        names.append(name)
    with open(os.path.join(outdir, "manifest.json"), "w") as fh:
        json.dump({"spec": asdict(spec), "files": names}, fh, indent=2)
        fh.write("\n")
    return names
