"""Floating-point H-polytope geometry: vertices, facet areas, ridge volumes, volume derivatives."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError


class GeometryError(ValueError):
    """The half-space system is empty, unbounded or numerically degenerate."""


def _orth_complement(N: np.ndarray) -> np.ndarray:
    """Orthonormal basis (as rows) of the orthogonal complement of the rows of N."""
    d = N.shape[1]
    _, s, vt = np.linalg.svd(N)
    r = int(np.sum(s > 1e-12 * max(1.0, s[0])))
    return vt[r:d]


def _content(points: np.ndarray, basis: np.ndarray) -> float:
    """k-volume of conv(points) inside the affine plane spanned by ``basis`` rows."""
    k = basis.shape[0]
    if k == 0:
        return 1.0
    if len(points) < k + 1:
        return 0.0
    y = points @ basis.T
    if k == 1:
        return float(y.max() - y.min())
    try:
        return float(ConvexHull(y).volume)
    except (QhullError, ValueError):
        return 0.0


def interior_point(U: np.ndarray, h: np.ndarray):
    """Chebyshev center and radius of {x : U x <= h}, or None if empty."""
    d = U.shape[1]
    norms = np.linalg.norm(U, axis=1)
    A = np.column_stack([U, norms])
    c = np.zeros(d + 1)
    c[-1] = -1.0
    bounds = [(None, None)] * d + [(0, None)]
    res = linprog(c, A_ub=A, b_ub=h, bounds=bounds, method="highs")
    if res.status != 0:
        return None
    return res.x[:d], res.x[d]


@dataclass
class Geometry:
    vertices: np.ndarray
    # incident vertex indices per half-space (empty for redundant ones)
    incidence: list
    areas: np.ndarray
    weights: np.ndarray
    volume: float
    centroid: np.ndarray
    U: np.ndarray
    h: np.ndarray

    def hessian(self) -> np.ndarray:
        """Second derivatives of the volume in the offsets h."""
        U, d = self.U, self.U.shape[1]
        m = len(U)
        norms = np.linalg.norm(U, axis=1)
        N = U / norms[:, None]
        Hp = np.zeros((m, m))
        sets = [set(inc) for inc in self.incidence]
        for i, j in combinations(range(m), 2):
            shared = sets[i] & sets[j]
            if len(shared) < d - 1:
                continue
            cos = float(N[i] @ N[j])
            sin = np.sqrt(max(0.0, 1.0 - cos * cos))
            if sin < 1e-14:
                continue
            pts = self.vertices[sorted(shared)]
            basis = _orth_complement(np.vstack([N[i], N[j]]))
            L = _content(pts, basis)
            if L <= 0:
                continue
            Hp[i, j] = Hp[j, i] = L / sin
            Hp[i, i] -= L * cos / sin
            Hp[j, j] -= L * cos / sin
        return Hp / np.outer(norms, norms)


def geometry(U: np.ndarray, h: np.ndarray, x0: np.ndarray | None = None) -> Geometry:
    """Vertices and facet data of {x : U x <= h}; x0 must be strictly interior if given."""
    U = np.asarray(U, dtype=float)
    h = np.asarray(h, dtype=float)
    m, d = U.shape
    if x0 is None or np.any(U @ x0 >= h):
        ip = interior_point(U, h)
        if ip is None or ip[1] <= 1e-14 * max(1.0, float(np.max(np.abs(h)))):
            raise GeometryError("half-space system has empty interior or is unbounded")
        x0 = ip[0]
    try:
        hsi = HalfspaceIntersection(np.column_stack([U, -h]), x0)
    except (QhullError, ValueError) as exc:
        raise GeometryError(f"half-space intersection failed: {exc}") from None
    V = hsi.intersections
    if not np.all(np.isfinite(V)):
        raise GeometryError("unbounded half-space system")
    # polish each vertex on its defining half-spaces; qhull's dual
    # construction loses digits at vertices where many facets meet
    V = V.copy()
    for k, facets in enumerate(hsi.dual_facets):
        if len(facets) == d:
            A = U[facets]
            if np.linalg.cond(A) < 1e10:
                V[k] = np.linalg.solve(A, h[facets])
    norms = np.linalg.norm(U, axis=1)
    # incidence from qhull's own combinatorics; degenerate vertices appear
    # once per defining d-subset, which leaves areas and ridges unaffected
    incidence = [[] for _ in range(m)]
    for k, facets in enumerate(hsi.dual_facets):
        for i in facets:
            incidence[i].append(k)
    N = U / norms[:, None]
    areas = np.zeros(m)
    for i in range(m):
        if len(incidence[i]) >= d:
            areas[i] = _content(V[incidence[i]], _orth_complement(N[i : i + 1]))
    try:
        hull = ConvexHull(V)
    except (QhullError, ValueError):
        raise GeometryError("degenerate polytope") from None
    vol = float(hull.volume)
    # centroid from a fan of simplices over the hull facets
    apex = V.mean(axis=0)
    tot = 0.0
    cen = np.zeros(d)
    for simplex in hull.simplices:
        P = V[simplex]
        vs = abs(np.linalg.det(P - apex)) if d == len(simplex) else 0.0
        tot += vs
        cen += vs * (P.sum(axis=0) + apex) / (d + 1)
    centroid = cen / tot if tot > 0 else apex
    return Geometry(V, incidence, areas, areas / norms, vol, centroid, U, h)
