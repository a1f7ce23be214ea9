"""Exact rational polytopes carried in vertex and half-space form.

Facet normals are always primitive integer vectors and offsets are Fractions,
so facet weights (facet area divided by the normal's length) stay rational.
Combinatorics in dimension >= 3 are proposed by qhull on floats and then
re-derived and verified in integer arithmetic; a brute-force exact routine
takes over whenever verification fails.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from .exact import (
    dot,
    homogeneous,
    integer_direction,
    null_vector_int,
    primitive,
    rank,
    rref,
    to_fraction,
    to_vec,
)

logger = logging.getLogger(__name__)


class EmptyPolytopeError(ValueError):
    """A half-space system has no solution."""


class UnboundedError(ValueError):
    """A half-space system does not describe a bounded set."""


@dataclass(frozen=True)
class Halfspace:
    """The set {x : <x, normal> <= offset}; normals are primitive integer vectors."""

    normal: tuple
    offset: Fraction

    @classmethod
    def make(cls, normal: Sequence, offset) -> "Halfspace":
        a = to_vec(normal)
        if not any(a):
            raise ValueError("half-space normal must be nonzero")
        p = integer_direction(a)
        # p = k * a with k > 0
        k = next(Fraction(pi) / ai for pi, ai in zip(p, a) if ai != 0)
        return cls(p, to_fraction(offset) * k)

    def slack(self, x) -> Fraction:
        return self.offset - dot(self.normal, x)

    def contains(self, x) -> bool:
        return self.slack(x) >= 0


@dataclass(frozen=True, eq=False)
class Polytope:
    """Bounded rational polytope.

    ``vertices`` are the extreme points (counterclockwise for d = 2,
    lexicographically sorted otherwise).  For full-dimensional polytopes
    ``halfspaces`` are exactly the facets; lower-dimensional ones also carry
    each equation of the affine hull as a pair of opposite half-spaces.
    """

    vertices: tuple
    halfspaces: tuple
    dim: int
    fulldim: bool
    # vertex indices lying on each half-space (facets only, fulldim case)
    incidence: tuple = field(default=(), repr=False, compare=False)

    # -- construction ---------------------------------------------------

    @classmethod
    def from_points(cls, points: Iterable[Sequence]) -> "Polytope":
        return convex_hull(points)

    @classmethod
    def from_halfspaces(cls, halfspaces: Iterable, dim: int | None = None) -> "Polytope":
        return polytope_from_halfspaces(halfspaces, dim)

    @classmethod
    def box(cls, lo: Sequence, hi: Sequence) -> "Polytope":
        lo, hi = to_vec(lo), to_vec(hi)
        return convex_hull(itertools.product(*zip(lo, hi)))

    @classmethod
    def cube(cls, d: int, r=1) -> "Polytope":
        r = to_fraction(r)
        return cls.box([-r] * d, [r] * d)

    @classmethod
    def simplex(cls, d: int, scale=1) -> "Polytope":
        s = to_fraction(scale)
        pts = [tuple(Fraction(0) for _ in range(d))]
        for i in range(d):
            pts.append(tuple(s if j == i else Fraction(0) for j in range(d)))
        return convex_hull(pts)

    # -- basic geometry -------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polytope):
            return NotImplemented
        return self.dim == other.dim and frozenset(self.vertices) == frozenset(other.vertices)

    def __hash__(self) -> int:
        return hash((self.dim, frozenset(self.vertices)))

    def __repr__(self) -> str:
        return f"Polytope(dim={self.dim}, nvertices={len(self.vertices)}, nfacets={len(self.halfspaces)}, fulldim={self.fulldim})"

    def support(self, u: Sequence):
        """max over the polytope of <x, u>; exact when u is rational."""
        if all(isinstance(a, (int, Fraction)) for a in u):
            V = self.vertices
            if self.dim == 2 and self.fulldim and len(V) > 32:
                # float guess, then exact hill-climb along the CCW cycle
                n = len(V)
                k = int(np.argmax(self.vertex_array @ np.asarray(u, dtype=float)))
                best = dot(V[k], u)
                for step in (1, -1):
                    j = k
                    while True:
                        val = dot(V[(j + step) % n], u)
                        if val <= best:
                            break
                        best, j = val, (j + step) % n
                    k = j
                return best
            return max(dot(v, u) for v in V)
        uf = np.asarray(u, dtype=float)
        return float(np.max(self.vertex_array @ uf))

    @cached_property
    def vertex_array(self) -> np.ndarray:
        return np.array([[float(x) for x in v] for v in self.vertices])

    @cached_property
    def centroid(self) -> tuple:
        """Average of the vertices (a relative-interior point)."""
        n = len(self.vertices)
        return tuple(sum(v[i] for v in self.vertices) / n for i in range(self.dim))

    def contains_point(self, x: Sequence) -> bool:
        x = to_vec(x)
        return all(h.contains(x) for h in self.halfspaces)

    def contains(self, other: "Polytope") -> bool:
        return all(self.contains_point(v) for v in other.vertices)

    def translate(self, m: Sequence) -> "Polytope":
        m = to_vec(m)
        verts = tuple(tuple(a + b for a, b in zip(v, m)) for v in self.vertices)
        hs = tuple(Halfspace(h.normal, h.offset + dot(h.normal, m)) for h in self.halfspaces)
        return Polytope(verts, hs, self.dim, self.fulldim, self.incidence)

    def scale(self, t) -> "Polytope":
        t = to_fraction(t)
        if t < 0:
            raise ValueError("scale factor must be nonnegative")
        if t == 0:
            return convex_hull([tuple(Fraction(0) for _ in range(self.dim))])
        verts = tuple(tuple(a * t for a in v) for v in self.vertices)
        hs = tuple(Halfspace(h.normal, h.offset * t) for h in self.halfspaces)
        return Polytope(verts, hs, self.dim, self.fulldim, self.incidence)

    def __add__(self, other: "Polytope") -> "Polytope":
        return minkowski_sum(self, other)

    def __rmul__(self, t) -> "Polytope":
        return self.scale(t)

    def diameter(self) -> float:
        V = self.vertex_array
        if len(V) < 2:
            return 0.0
        diff = V[:, None, :] - V[None, :, :]
        return float(np.sqrt((diff ** 2).sum(-1).max()))

    # -- measures -------------------------------------------------------

    @cached_property
    def facet_weights(self) -> tuple:
        """Facet (d-1)-volume divided by |normal| for each facet (exact)."""
        if not self.fulldim:
            raise ValueError("facet weights need a full-dimensional polytope")
        return tuple(self._facet_weight(i) for i in range(len(self.halfspaces)))

    def _facet_weight(self, i: int) -> Fraction:
        a = self.halfspaces[i].normal
        idx = self.incidence[i]
        if self.dim == 1:
            return Fraction(1)
        if self.dim == 2:
            p, q = (self.vertices[j] for j in idx)
            # edge = t * (-a2, a1)
            if a[1] != 0:
                t = (q[0] - p[0]) / -a[1]
            else:
                t = (q[1] - p[1]) / a[0]
            return abs(t)
        k = max(range(self.dim), key=lambda j: abs(a[j]))
        proj = [v[:k] + v[k + 1:] for v in (self.vertices[j] for j in idx)]
        return convex_hull(proj).volume / abs(a[k])

    @cached_property
    def volume(self) -> Fraction:
        """Exact Euclidean d-volume (zero unless full-dimensional)."""
        if not self.fulldim:
            return Fraction(0)
        d = self.dim
        if d == 1:
            return self.vertices[1][0] - self.vertices[0][0]
        if d == 2:
            V = self.vertices
            n = len(V)
            twice = sum(V[i][0] * V[(i + 1) % n][1] - V[(i + 1) % n][0] * V[i][1] for i in range(n))
            return twice / 2
        c = self.centroid
        total = sum((h.offset - dot(h.normal, c)) * w for h, w in zip(self.halfspaces, self.facet_weights))
        return total / d

    def facets(self):
        """(halfspace, vertices on it) for every facet of a full-dimensional polytope."""
        return [(h, tuple(self.vertices[j] for j in idx)) for h, idx in zip(self.halfspaces, self.incidence)]


# ----------------------------------------------------------------------
# V -> H


def _dedupe(points) -> list[tuple]:
    seen = {}
    for p in points:
        seen.setdefault(p, None)
    return list(seen)


def convex_hull(points: Iterable[Sequence]) -> Polytope:
    """Exact convex hull of rational points."""
    pts = _dedupe(to_vec(p) for p in points)
    if not pts:
        raise ValueError("convex hull of an empty point set")
    d = len(pts[0])
    if any(len(p) != d for p in pts):
        raise ValueError("points have mismatched dimensions")
    if d == 0:
        raise ValueError("ambient dimension must be positive")
    p0 = pts[0]
    R, piv = rref([tuple(a - b for a, b in zip(p, p0)) for p in pts[1:]]) if len(pts) > 1 else ([], [])
    r = len(piv)
    if r == d:
        verts, hs, inc = _fulldim_hull(pts, d)
        return Polytope(tuple(verts), tuple(hs), d, True, tuple(inc))
    return _lowdim_hull(pts, d, R, piv, p0)


def _lowdim_hull(pts, d, R, piv, p0) -> Polytope:
    r = len(piv)
    hs: list[Halfspace] = []
    if r == 0:
        verts = [p0]
    else:
        proj = {tuple(p[j] for j in piv): p for p in pts}
        sub_verts, sub_hs, _ = _fulldim_hull(list(proj), r)
        verts = [proj[q] for q in sub_verts]
        for h in sub_hs:
            a = [0] * d
            for k, j in enumerate(piv):
                a[j] = h.normal[k]
            hs.append(Halfspace(tuple(a), h.offset))
    # affine hull equations, one per non-pivot coordinate
    for j in range(d):
        if j in piv:
            continue
        coeffs = [Fraction(0)] * d
        coeffs[j] = Fraction(1)
        for k, pj in enumerate(piv):
            coeffs[pj] -= R[k][j]
        e = Halfspace.make(coeffs, dot(coeffs, p0))
        hs.append(e)
        hs.append(Halfspace(tuple(-x for x in e.normal), -e.offset))
    return Polytope(tuple(sorted(verts)), tuple(hs), d, False, ())


def _fulldim_hull(pts, d):
    """Vertices, facet half-spaces and facet-vertex incidence of a full-dim hull."""
    if d == 1:
        lo, hi = min(pts), max(pts)
        return [lo, hi], [Halfspace((-1,), -lo[0]), Halfspace((1,), hi[0])], [(0,), (1,)]
    # per-point homogeneous integers; orientation signs ignore positive rescaling
    W = [homogeneous(p) for p in pts]
    if d == 2:
        order = _chain_2d(W)
        verts = [pts[i] for i in order]
        n = len(verts)
        hs, inc = [], []
        for k in range(n):
            p, q = verts[k], verts[(k + 1) % n]
            normal = primitive(integer_direction((q[1] - p[1], p[0] - q[0])))
            hs.append(Halfspace(normal, dot(normal, p)))
            inc.append((k, (k + 1) % n))
        return verts, hs, inc
    facets, vidx, incidence = _cone_facets(W, d)
    pos = {i: k for k, i in enumerate(sorted(vidx, key=lambda i: pts[i]))}
    verts = [None] * len(pos)
    for i, k in pos.items():
        verts[k] = pts[i]
    hs, inc = [], []
    for f, on in zip(facets, incidence):
        a = f[:d]
        g = _gcd_all(a)
        hs.append(Halfspace(tuple(x // g for x in a), Fraction(-f[d], g)))
        inc.append(tuple(sorted(pos[i] for i in on)))
    return verts, hs, inc


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def _gcd_all(xs):
    g = 0
    for x in xs:
        g = _gcd(g, x)
    return g


def _orient3(a, b, c) -> int:
    # sign of det [[a],[b],[c]] for homogeneous 2D points (last coord > 0)
    return (a[0] * (b[1] * c[2] - b[2] * c[1])
            - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]))


def _chain_2d(W) -> list[int]:
    """Andrew's monotone chain on homogeneous integer points; CCW vertex indices."""
    idx = sorted(range(len(W)), key=lambda i: (Fraction(W[i][0], W[i][2]), Fraction(W[i][1], W[i][2])))
    if len(idx) <= 2:
        return idx

    def half(seq):
        out: list[int] = []
        for i in seq:
            while len(out) >= 2 and _orient3(W[out[-2]], W[out[-1]], W[i]) <= 0:
                out.pop()
            out.append(i)
        return out

    lower = half(idx)
    upper = half(reversed(idx))
    return lower[:-1] + upper[:-1]


def _cone_facets(W, d):
    """Facets of conv of homogeneous integer points W (last coordinate > 0).

    Returns (facet functionals f with f.w <= 0 for all w, vertex indices,
    per-facet incident vertex indices).  Requires full affine rank d.
    """
    if d == 2:
        order = _chain_2d(W)
        n = len(order)
        facets, inc = [], []
        for k in range(n):
            i, j = order[k], order[(k + 1) % n]
            f = primitive(null_vector_int([W[i], W[j]]))
            # outward: interior point of a CCW polygon lies to the left of each edge
            third = W[order[(k + 2) % n]]
            if sum(a * b for a, b in zip(f, third)) > 0:
                f = tuple(-x for x in f)
            facets.append(f)
            inc.append((i, j))
        return facets, order, inc
    try:
        out = _cone_facets_qhull(W, d)
        if out is not None:
            return out
    except (QhullError, ValueError) as exc:
        logger.debug("qhull proposal failed: %s", exc)
    logger.debug("falling back to exact brute-force hull (%d points)", len(W))
    return _cone_facets_brute(W, d)


def _interior_hom(W):
    return tuple(sum(w[k] for w in W) for k in range(len(W[0])))


def _finish(W, d, facets):
    # incidence and vertex test
    incidence = []
    touching: dict[int, list] = {}
    for f in facets:
        on = []
        for i, w in enumerate(W):
            s = sum(a * b for a, b in zip(f, w))
            if s > 0:
                return None
            if s == 0:
                on.append(i)
                touching.setdefault(i, []).append(f[:d])
        incidence.append(on)
    vidx = [i for i, normals in touching.items() if len(normals) >= d and rank(normals) == d]
    vset = set(vidx)
    incidence = [[i for i in on if i in vset] for on in incidence]
    return facets, vidx, incidence


def _cone_facets_qhull(W, d):
    P = np.array([[w[k] / w[d] for k in range(d)] for w in W], dtype=float)
    hull = ConvexHull(P)
    c = _interior_hom(W)
    facets = {}
    for simplex in hull.simplices:
        f = null_vector_int([W[i] for i in simplex])
        if not any(f):
            return None
        f = primitive(f)
        s = sum(a * b for a, b in zip(f, c))
        if s == 0:
            return None
        if s > 0:
            f = tuple(-x for x in f)
        facets[f] = None
    return _finish(W, d, list(facets))


def _cone_facets_brute(W, d):
    c = _interior_hom(W)
    facets = {}
    for combo in itertools.combinations(range(len(W)), d):
        f = null_vector_int([W[i] for i in combo])
        if not any(f):
            continue
        f = primitive(f)
        if sum(a * b for a, b in zip(f, c)) > 0:
            f = tuple(-x for x in f)
        if f in facets:
            continue
        if all(sum(a * b for a, b in zip(f, w)) <= 0 for w in W):
            facets[f] = None
    out = _finish(W, d, list(facets))
    assert out is not None
    return out


# ----------------------------------------------------------------------
# H -> V


def _normalize_halfspaces(halfspaces) -> list[Halfspace]:
    out = []
    for h in halfspaces:
        if isinstance(h, Halfspace):
            out.append(Halfspace.make(h.normal, h.offset))
        elif isinstance(h, dict):
            out.append(Halfspace.make(h["normal"], h["offset"]))
        else:
            normal, offset = h
            out.append(Halfspace.make(normal, offset))
    return out


def chebyshev_center(A: np.ndarray, b: np.ndarray):
    """Float Chebyshev center; returns (center, radius) or None when infeasible."""
    n, d = A.shape
    norms = np.linalg.norm(A, axis=1)
    c = np.zeros(d + 1)
    c[-1] = -1.0
    Aub = np.hstack([A, norms[:, None]])
    res = linprog(c, A_ub=Aub, b_ub=b, bounds=[(None, None)] * d + [(0, None)], method="highs")
    if res.status == 2:
        return None
    if res.status == 3:
        raise UnboundedError("half-space system is unbounded")
    if res.status != 0:
        raise RuntimeError(f"Chebyshev LP failed: {res.message}")
    return res.x[:d], res.x[d]


def polytope_from_halfspaces(halfspaces, dim: int | None = None) -> Polytope:
    hs = _normalize_halfspaces(halfspaces)
    if not hs:
        raise UnboundedError("no half-spaces")
    d = len(hs[0].normal)
    if dim is not None and dim != d:
        raise ValueError("dimension mismatch")
    verts = halfspace_vertices(hs, d)
    return convex_hull(verts)


def halfspace_vertices(hs: Sequence[Halfspace], d: int) -> list[tuple]:
    """Exact vertices of a bounded intersection of half-spaces."""
    A = np.array([[float(x) for x in h.normal] for h in hs])
    b = np.array([float(h.offset) for h in hs])
    cc = chebyshev_center(A, b)
    if cc is None:
        from .lp import INFEASIBLE, feasible_point

        if feasible_point([h.normal for h in hs], [h.offset for h in hs]).status == INFEASIBLE:
            raise EmptyPolytopeError("half-space intersection is empty")
        return _vertices_brute(hs, d)
    x, radius = cc
    scale = max(1.0, float(np.max(np.abs(b))))
    if radius > 1e-9 * scale:
        for c in (tuple(Fraction(v).limit_denominator(1 << 20) for v in x), tuple(Fraction(float(v)) for v in x)):
            slacks = [h.offset - dot(h.normal, c) for h in hs]
            if all(s > 0 for s in slacks):
                return _vertices_polar(hs, d, c, slacks)
    return _vertices_brute(hs, d)


def _vertices_polar(hs, d, c, slacks) -> list[tuple]:
    W = {}
    for h, s in zip(hs, slacks):
        # polar point normal / slack in homogeneous integer form
        w = tuple(a * s.denominator for a in h.normal) + (s.numerator,)
        w = primitive(w)
        W.setdefault(w, None)
    W = list(W)
    pts = [tuple(Fraction(w[k], w[d]) for k in range(d)) for w in W]
    if len(W) < d + 1 or rank([tuple(p[k] - pts[0][k] for k in range(d)) for p in pts[1:]]) < d:
        raise UnboundedError("half-space normals do not positively span")
    facets, _, _ = _cone_facets(W, d)
    verts = []
    for f in facets:
        beta = -f[d]
        if beta <= 0:
            raise UnboundedError("half-space normals do not positively span")
        verts.append(tuple(ci + Fraction(f[k], beta) for k, ci in enumerate(c)))
    return verts


def _vertices_brute(hs, d) -> list[tuple]:
    from .exact import solve

    verts = {}
    for combo in itertools.combinations(hs, d):
        x = solve([h.normal for h in combo], [h.offset for h in combo])
        if x is None or x in verts:
            continue
        if all(h.contains(x) for h in hs):
            verts[x] = None
    if not verts:
        raise EmptyPolytopeError("half-space intersection is empty")
    out = list(verts)
    # boundedness: no recession direction; check normals positively span the
    # orthogonal complement of the lineality (bounded iff vertices exist and
    # the normal cone covers everything)
    if not _positively_span([h.normal for h in hs], d):
        raise UnboundedError("half-space normals do not positively span")
    return out


def _positively_span(normals, d) -> bool:
    from .lp import INFEASIBLE, maximize

    # positively spanning iff no nonzero y with <n, y> <= 0 for every normal;
    # test each +-e_k direction via LP  max <y, e> s.t. <n, y> <= 0, |y|_inf <= 1
    rows = [tuple(Fraction(x) for x in n) for n in normals]
    box = []
    for k in range(d):
        e = [Fraction(0)] * d
        e[k] = Fraction(1)
        box.append(tuple(e))
        box.append(tuple(-x for x in e))
    A = rows + box
    b = [Fraction(0)] * len(rows) + [Fraction(1)] * len(box)
    for k in range(d):
        for sgn in (1, -1):
            cvec = [Fraction(0)] * d
            cvec[k] = Fraction(sgn)
            res = maximize(cvec, A, b)
            if res.status != INFEASIBLE and res.objective > 0:
                return False
    return True


# ----------------------------------------------------------------------
# Minkowski sums


def minkowski_sum(P: Polytope, Q: Polytope) -> Polytope:
    """Exact Minkowski sum."""
    if P.dim != Q.dim:
        raise ValueError("Minkowski sum of polytopes of different dimensions")
    if P.dim == 2 and P.fulldim and Q.fulldim:
        return _minkowski_2d(P, Q)
    return convex_hull(tuple(a + b for a, b in zip(p, q)) for p in P.vertices for q in Q.vertices)


def _bottom_first(V):
    k = min(range(len(V)), key=lambda i: (V[i][1], V[i][0]))
    return V[k:] + V[:k]


def _minkowski_2d(P: Polytope, Q: Polytope) -> Polytope:
    A = _bottom_first(list(P.vertices))
    B = _bottom_first(list(Q.vertices))
    n, m = len(A), len(B)
    out = []
    i = j = 0
    while i < n or j < m:
        out.append((A[i % n][0] + B[j % m][0], A[i % n][1] + B[j % m][1]))
        ea = (A[(i + 1) % n][0] - A[i % n][0], A[(i + 1) % n][1] - A[i % n][1])
        eb = (B[(j + 1) % m][0] - B[j % m][0], B[(j + 1) % m][1] - B[j % m][1])
        if i >= n:
            j += 1
            continue
        if j >= m:
            i += 1
            continue
        cr = ea[0] * eb[1] - ea[1] * eb[0]
        if cr > 0:
            i += 1
        elif cr < 0:
            j += 1
        else:
            i += 1
            j += 1
    return _polygon_from_ccw(out)


def _polygon_from_ccw(V) -> Polytope:
    """Build a polygon from a CCW convex cycle, dropping collinear points."""
    V = _dedupe(V)
    keep = []
    n = len(V)
    for k in range(n):
        a, b, c = V[k - 1], V[k], V[(k + 1) % n]
        cr = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if cr != 0:
            keep.append(b)
    # canonical start: lexicographic minimum, like the monotone chain
    s = min(range(len(keep)), key=lambda i: keep[i])
    keep = keep[s:] + keep[:s]
    n = len(keep)
    hs, inc = [], []
    for k in range(n):
        p, q = keep[k], keep[(k + 1) % n]
        normal = integer_direction((q[1] - p[1], p[0] - q[0]))
        hs.append(Halfspace(normal, dot(normal, p)))
        inc.append((k, (k + 1) % n))
    return Polytope(tuple(keep), tuple(hs), 2, True, tuple(inc))
