"""Support-function oracles for convex bodies that are not polytopes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


@dataclass(frozen=True)
class SupportOracle:
    """A convex, positively 1-homogeneous function given by evaluation.

    ``point`` optionally returns a maximizer of <x, u> over the body (a point
    where the supporting hyperplane touches); it lets callers build inner
    polytopes and so bracket volumes from both sides.
    """

    eval: Callable[[np.ndarray], float]
    label: str
    dim: int
    point: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, u) -> float:
        u = np.asarray(u, dtype=float)
        if not np.any(u):
            raise ValueError("support function evaluated at the zero direction")
        return float(self.eval(u))

    def touching_point(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.point is not None:
            return np.asarray(self.point(u), dtype=float)
        # central finite difference of h at u: the gradient is the touching point
        h = 1e-6 * max(1.0, float(np.linalg.norm(u)))
        g = np.empty(self.dim)
        for k in range(self.dim):
            e = np.zeros(self.dim)
            e[k] = h
            g[k] = (self.eval(u + e) - self.eval(u - e)) / (2 * h)
        return g

    def spot_check(self, rng: np.random.Generator | None = None, trials: int = 64, tol: float = 1e-9) -> bool:
        """Randomized test of homogeneity and subadditivity."""
        rng = rng or np.random.default_rng(0)
        for _ in range(trials):
            u, v = rng.normal(size=(2, self.dim))
            t = rng.uniform(0.1, 10.0)
            hu, hv = self(u), self(v)
            scale = tol * max(1.0, abs(hu), abs(hv))
            if abs(self(t * u) - t * hu) > scale * t:
                return False
            if np.any(u + v) and self(u + v) > hu + hv + scale:
                return False
        return True


def ball(d: int, radius: float = 1.0, center=None) -> SupportOracle:
    c = np.zeros(d) if center is None else np.asarray(center, dtype=float)

    def h(u):
        return radius * float(np.linalg.norm(u)) + float(c @ u)

    def p(u):
        return c + radius * u / np.linalg.norm(u)

    label = "disk" if d == 2 and radius == 1.0 and not np.any(c) else f"ball(d={d}, r={radius})"
    return SupportOracle(h, label, d, p)


def disk(radius: float = 1.0) -> SupportOracle:
    return ball(2, radius)


def ellipsoid(semi_axes, center=None) -> SupportOracle:
    """Axis-aligned ellipsoid sum (x_i / a_i)^2 <= 1."""
    a = np.asarray(semi_axes, dtype=float)
    d = len(a)
    c = np.zeros(d) if center is None else np.asarray(center, dtype=float)

    def h(u):
        return float(np.sqrt(np.sum((a * u) ** 2))) + float(c @ u)

    def p(u):
        return c + a * a * u / np.sqrt(np.sum((a * u) ** 2))

    return SupportOracle(h, f"ellipsoid{tuple(a.tolist())}", d, p)


def polytope_oracle(P) -> SupportOracle:
    """Float support oracle of an exact polytope (for mixed inputs)."""
    V = P.vertex_array

    def h(u):
        return float(np.max(V @ u))

    def p(u):
        return V[int(np.argmax(V @ u))]

    return SupportOracle(h, f"polytope[{len(V)}]", P.dim, p)
