"""Hausdorff distances between polytopes, optionally after the best translation."""

from __future__ import annotations

from itertools import combinations

import numpy as np
from scipy.optimize import linprog

from .convex_core.polytope import Polytope


def _hrep(P: Polytope) -> tuple[np.ndarray, np.ndarray]:
    A = np.array([[float(x) for x in h.normal] for h in P.halfspaces])
    b = np.array([float(h.offset) for h in P.halfspaces])
    return A, b


def _faces(P: Polytope) -> list[tuple]:
    """Vertex index sets of all proper faces of dimension >= 1."""
    level = {frozenset(idx) for idx in P.incidence}
    faces = set(level)
    for _ in range(P.dim - 2):
        nxt = set()
        for a, b in combinations(level, 2):
            c = a & b
            if len(c) >= 2 and c not in faces:
                nxt.add(c)
        faces |= nxt
        level = nxt
    return [tuple(sorted(f)) for f in faces]


def point_distance(x: np.ndarray, P: Polytope, shift: np.ndarray | None = None) -> float:
    """Euclidean distance from x to P + shift.

    The nearest point lies in the relative interior of some face, so x is
    projected onto the affine hull of every face and the feasible
    projections (plus the vertices) are compared.
    """
    V = P.vertex_array if shift is None else P.vertex_array + shift
    A, b = _hrep(P)
    if shift is not None:
        b = b + A @ shift
    norms = np.linalg.norm(A, axis=1)
    slack_tol = 1e-12 * norms * max(1.0, float(np.abs(V).max()))
    if np.all(A @ x - b <= slack_tol):
        return 0.0
    best = float(np.min(np.linalg.norm(V - x, axis=1)))
    for face in _faces(P):
        Q = V[list(face)]
        base = Q[0]
        E = (Q[1:] - base).T
        coef, *_ = np.linalg.lstsq(E, x - base, rcond=None)
        y = base + E @ coef
        if np.all(A @ y - b <= 1e3 * slack_tol):
            best = min(best, float(np.linalg.norm(y - x)))
    return best


def hausdorff(P: Polytope, Q: Polytope, shift: np.ndarray | None = None) -> float:
    """Hausdorff distance between P and Q + shift (vertex-to-body distances)."""
    s = np.zeros(P.dim) if shift is None else np.asarray(shift, dtype=float)
    d1 = max(point_distance(p, Q, s) for p in P.vertex_array)
    d2 = max(point_distance(q + s, P) for q in Q.vertex_array)
    return max(d1, d2)


def best_translation(P: Polytope, Q: Polytope) -> np.ndarray:
    """Translation t roughly minimizing the Hausdorff distance of P and Q + t.

    Minimizes the sup-norm gap of support functions over both bodies' unit
    facet normals (an LP in t); the true optimum can only be smaller.
    """
    d = P.dim
    dirs = []
    for K in (P, Q):
        for h in K.halfspaces:
            u = np.array([float(x) for x in h.normal])
            dirs.append(u / np.linalg.norm(u))
    U = np.array(dirs)
    gap = P.vertex_array @ U.T
    gap = gap.max(axis=0) - (Q.vertex_array @ U.T).max(axis=0)
    # variables (t, eps): |gap_j - <t, u_j>| <= eps
    A = np.vstack([np.column_stack([-U, -np.ones(len(U))]), np.column_stack([U, -np.ones(len(U))])])
    b = np.concatenate([-gap, gap])
    c = np.zeros(d + 1)
    c[-1] = 1.0
    res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * d + [(0, None)], method="highs")
    if res.status != 0:
        return np.asarray([float(a) - float(b) for a, b in zip(P.centroid, Q.centroid)])
    return res.x[:d]


def hausdorff_translated(P: Polytope, Q: Polytope) -> tuple[float, np.ndarray]:
    """Hausdorff distance after the translation from ``best_translation``."""
    t = best_translation(P, Q)
    return hausdorff(P, Q, t), t
