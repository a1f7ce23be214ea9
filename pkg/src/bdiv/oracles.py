"""Independent brute-force oracles used to cross-check the library.

Each oracle recomputes a quantity by a different route than the library
code: volumes by explicit triangulation, mixed volumes by expanding
vol(t K + L) as a polynomial, inclusion radii by a zooming grid search,
extreme points by per-point feasibility LPs.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import comb, factorial
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .convex_core.exact import rank, solve
from .convex_core.polytope import Polytope, convex_hull


def _det(rows) -> Fraction:
    """Exact determinant by fraction Gaussian elimination."""
    M = [[Fraction(x) for x in r] for r in rows]
    n = len(M)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            if f:
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return det


def _affine_dim(points) -> int:
    if len(points) <= 1:
        return 0
    p0 = points[0]
    return rank([[a - b for a, b in zip(p, p0)] for p in points[1:]])


def triangulate(P: Polytope) -> list[tuple]:
    """Simplices (vertex tuples) of a pulling triangulation of a fulldim polytope."""
    facets = [frozenset(idx) for idx in P.incidence]
    V = P.vertices

    def faces_of(face: frozenset, k: int) -> list[frozenset]:
        # maximal proper faces of a k-face are its intersections with facets of dimension k-1
        out = set()
        for F in facets:
            sub = face & F
            if sub != face and len(sub) >= k and _affine_dim([V[i] for i in sorted(sub)]) == k - 1:
                out.add(sub)
        return list(out)

    def pull(face: frozenset, k: int) -> list[tuple]:
        if k == 0:
            return [(min(face),)]
        apex = min(face)
        out = []
        for sub in faces_of(face, k):
            if apex in sub:
                continue
            for s in pull(sub, k - 1):
                out.append((apex,) + s)
        return out

    return [tuple(V[i] for i in s) for s in pull(frozenset(range(len(V))), P.dim)]


def triangulation_volume(P: Polytope) -> Fraction:
    """Sum of |det| / d! over a triangulation."""
    if not P.fulldim:
        return Fraction(0)
    d = P.dim
    total = Fraction(0)
    for s in triangulate(P):
        total += abs(_det([[a - b for a, b in zip(p, s[0])] for p in s[1:]]))
    return total / factorial(d)


def pairwise_sum_hull(P: Polytope, Q: Polytope) -> Polytope:
    return convex_hull([tuple(a + b for a, b in zip(p, q)) for p in P.vertices for q in Q.vertices])


def mixed_volumes_by_expansion(K: Polytope, L: Polytope) -> list[Fraction]:
    """[V(K[k], L[d-k]) for k = 0..d] read off the polynomial vol(t K + L)."""
    d = K.dim
    vols = []
    for t in range(d + 1):
        body = pairwise_sum_hull(K.scale(t), L) if t else L
        vols.append(triangulation_volume(body))
    rows = [[Fraction(t) ** k for k in range(d + 1)] for t in range(d + 1)]
    coef = solve(rows, vols)
    return [c / comb(d, k) for k, c in enumerate(coef)]


def extreme_points_by_lp(points: Sequence[Sequence]) -> set[tuple]:
    """Points that are not convex combinations of the other points."""
    pts = [tuple(Fraction(x) for x in p) for p in points]
    uniq = list(dict.fromkeys(pts))
    out = set()
    for i, p in enumerate(uniq):
        others = np.array([[float(x) for x in q] for j, q in enumerate(uniq) if j != i])
        if len(others) == 0:
            out.add(p)
            continue
        A_eq = np.vstack([others.T, np.ones(len(others))])
        b_eq = np.concatenate([[float(x) for x in p], [1.0]])
        res = linprog(np.zeros(len(others)), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * len(others), method="highs")
        if res.status != 0:
            out.add(p)
    return out


def inclusion_radius_by_grid(K: Polytope, L: Polytope, grid: int = 17, iters: int = 55) -> float:
    """max over m of min_j (b_j - <m, n_j>) / h_L(n_j), by brute-force search.

    L is first centered at its vertex mean so every h_L(n_j) is positive;
    that only shifts the optimal m. The objective is concave, so each
    coordinate is handled by a dense scan followed by ternary refinement,
    nested one level per dimension.
    """
    d = K.dim
    Lv = L.vertex_array
    Lc = Lv - Lv.mean(axis=0)
    N = np.array([[float(x) for x in h.normal] for h in K.halfspaces])
    b = np.array([float(h.offset) for h in K.halfspaces])
    hL = (Lc @ N.T).max(axis=0)
    Kv = K.vertex_array
    lo, hi = Kv.min(axis=0), Kv.max(axis=0)

    def f(m):
        return float(np.min((b - N @ m) / hL))

    def best_over(prefix):
        k = len(prefix)
        if k == d:
            return f(np.array(prefix))

        def g(x):
            return best_over(prefix + [x])

        xs = np.linspace(lo[k], hi[k], grid)
        vals = [g(x) for x in xs]
        j = int(np.argmax(vals))
        a, c = xs[max(j - 1, 0)], xs[min(j + 1, grid - 1)]
        for _ in range(iters):
            x1, x2 = a + (c - a) / 3, c - (c - a) / 3
            if g(x1) < g(x2):
                a = x1
            else:
                c = x2
        return max(g((a + c) / 2), vals[j])

    return best_over([])
