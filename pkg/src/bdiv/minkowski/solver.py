"""Variational solver for the discrete Minkowski problem.

Minimizes F(h) = a(h) - log vol(P(h)) over offsets h of the half-spaces
<x, v_i> <= h_i, where a(h) is a pairing term: the linear functional
sum m_i h_i for the plain problem, or true support values of P(h) at off-model
directions for the restricted functionals.  F is convex on the plain problem,
its gradient is mu - w / vol with w the facet weights, and at the optimum
w = vol * mu.  A final rescaling by vol^(-1/(d-1)) makes the weights equal mu.

Steps are damped Newton steps (the Hessian of vol comes from ridge volumes)
with Armijo backtracking; iterates are recentered at their centroid, which
leaves F unchanged because mu is balanced.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from ..convex_core.measure import CurveClass, surface_area_measure
from ..convex_core.mixed import NonConvergence
from ..convex_core.polytope import Halfspace, Polytope
from ..toric import NotBig
from .geometry import Geometry, GeometryError, geometry

logger = logging.getLogger(__name__)

# pairing(h, geom) -> (value, gradient in h)
Pairing = Callable[[np.ndarray, Geometry], tuple[float, np.ndarray]]


@dataclass
class KernelResult:
    h: np.ndarray
    geom: Geometry
    mu: np.ndarray
    residual: float
    iterations: int
    trace: list = field(default_factory=list)
    status: str = "converged"


def _residual(geom: Geometry, mu: np.ndarray) -> float:
    r = np.abs(geom.weights / geom.volume - mu) / mu
    return float(np.max(r))


def newton_kernel(
    U: np.ndarray,
    h0: np.ndarray,
    pairing: Pairing,
    tol: float = 1e-10,
    budget: int = 10_000,
    floor_tol: float | None = None,
) -> KernelResult:
    """Damped Newton on a(h) - log vol(P(h)) keeping every facet present.

    Iterates live in unit-normal coordinates p = h / |v| so that primitive
    rays of very different lengths are equally conditioned; the pairing is
    still called with (h, geometry) and returns its gradient in h.

    If the line search stalls (rounding noise) with the residual already
    below ``floor_tol``, the current iterate is returned with status
    "noise-floor" instead of raising.
    """
    U = np.asarray(U, dtype=float)
    m, d = U.shape
    norms = np.linalg.norm(U, axis=1)
    N = U / norms[:, None]

    def evaluate(p, g):
        a, grad = pairing(p * norms, g)
        return a, np.asarray(grad, dtype=float) * norms

    p = np.array(h0, dtype=float) / norms
    geom = geometry(N, p)
    if np.any(geom.areas <= 0):
        raise GeometryError("starting offsets do not make every half-space a facet")
    trace: list[float] = []
    p = p - N @ geom.centroid
    geom = geometry(N, p, np.zeros(d))
    a, mu = evaluate(p, geom)
    f = a - math.log(geom.volume)
    trace.append(f)

    def result(it, res, status="converged"):
        return KernelResult(p * norms, geom, mu / norms, res, it, trace, status)

    for it in range(budget):
        res = _residual(geom, mu)
        if res <= tol:
            return result(it, res)
        V = geom.volume
        w = geom.weights
        g = mu - w / V
        Hf = -geom.hessian() / V + np.outer(w, w) / V**2
        evals, evecs = np.linalg.eigh(Hf)
        keep = evals > 1e-11 * max(1.0, float(np.max(np.abs(evals))))
        step = -(evecs[:, keep] @ ((evecs[:, keep].T @ g) / evals[keep]))
        slope = float(g @ step)
        if slope >= 0:
            step, slope = -g, -float(g @ g)
        alpha = 1.0
        accepted = False
        area_floor = 1e-12 * float(np.max(geom.areas))
        for _ in range(60):
            pn = p + alpha * step
            try:
                gn = geometry(N, pn, np.zeros(d) if np.all(pn > 0) else None)
            except GeometryError:
                alpha *= 0.5
                continue
            if np.any(gn.areas <= area_floor):
                alpha *= 0.5
                continue
            an, mun = evaluate(pn, gn)
            fn = an - math.log(gn.volume)
            noise = 1e-13 * max(1.0, abs(f))
            if fn <= f + 1e-4 * alpha * slope - noise:
                accepted = True
                break
            # once F is flat to rounding, descend on the weight residual instead
            if abs(fn - f) <= 4 * noise and _residual(gn, mun) < res:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            if floor_tol is not None and res <= floor_tol:
                return result(it, res, "noise-floor")
            raise NonConvergence(
                "line search failed", h=p * norms, residual=res, iterations=it, trace=trace
            )
        # recenter: F is translation invariant
        p = pn - N @ gn.centroid
        geom = geometry(N, p, np.zeros(d))
        a, mu = evaluate(p, geom)
        f = a - math.log(geom.volume)
        trace.append(f)
    raise NonConvergence(
        "iteration budget exhausted", h=p * norms, residual=_residual(geom, mu), iterations=budget, trace=trace
    )


def finalize(U_int: list[tuple], h: np.ndarray, geom: Geometry) -> Polytope:
    """Exact body from float offsets scaled so facet weights equal the target."""
    d = len(U_int[0])
    t = geom.volume ** (-1.0 / (d - 1))
    hs = [Halfspace(tuple(v), Fraction(float(t * hi))) for v, hi in zip(U_int, h)]
    return Polytope.from_halfspaces(hs)


# ----------------------------------------------------------------------


@dataclass(frozen=True)
class SolveReport:
    body: Polytope
    residual: float
    residual_vector: tuple
    iterations: int
    trace: tuple
    status: str


def ball_start(U: np.ndarray) -> np.ndarray:
    return np.linalg.norm(U, axis=1)


def ellipsoid_start(U: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Offsets of a random ellipsoid: every half-space is tangent, so all are facets."""
    d = U.shape[1]
    A = rng.normal(size=(d, d))
    M = A @ A.T + 0.5 * np.eye(d)
    t = rng.normal(size=d)
    return np.sqrt(np.einsum("ij,jk,ik->i", U, M, U)) + U @ t


def linear_pairing(mu: np.ndarray) -> Pairing:
    def pairing(h, geom):
        return float(mu @ h), mu

    return pairing


def minkowski_solve(gamma: CurveClass, cfg=None, tol: float | None = None, start=None) -> SolveReport:
    """Polytope whose surface-area measure is gamma (unique up to translation).

    ``start`` may be None (circumscribed unit ball), an array of offsets, or a
    numpy Generator (random circumscribed ellipsoid).
    """
    if any(gamma.balance()):
        raise ValueError("curve class is not balanced")
    if not gamma.is_spanning():
        raise NotBig("atom directions do not positively span the ambient space")
    floor = tol if tol is not None else (1e-8 if cfg is None else cfg.tol)
    # aim well below the configured tolerance, accept anything under it
    target = min(floor, 1e-10)
    budget = 10_000 if cfg is None else cfg.budget
    dirs = gamma.directions
    U = np.array(dirs, dtype=float)
    mu = np.array([float(m) for m in gamma.weights])
    if start is None:
        h0 = ball_start(U)
    elif isinstance(start, np.random.Generator):
        h0 = ellipsoid_start(U, start)
    else:
        h0 = np.asarray(start, dtype=float)
    try:
        out = newton_kernel(U, h0, linear_pairing(mu), tol=target, budget=budget, floor_tol=floor)
    except GeometryError as exc:
        raise NonConvergence(f"solver geometry failed: {exc}") from None
    body = finalize(dirs, out.h, out.geom)
    rv = exact_residuals(body, gamma)
    res = max(rv) if rv else 0.0
    if len(body.halfspaces) != len(dirs):
        raise NonConvergence("a facet vanished in the final body", residual=res)
    if res > floor:
        raise NonConvergence("exact residual of the final body exceeds the tolerance", residual=res, trace=out.trace)
    return SolveReport(body, res, tuple(rv), out.iterations, tuple(out.trace), out.status)


def exact_residuals(body: Polytope, gamma: CurveClass) -> list[float]:
    """Relative facet-weight errors of body against gamma (missing facets count 1)."""
    if not body.fulldim:
        return [1.0] * len(gamma.atoms)
    S = dict(surface_area_measure(body).atoms)
    return [float(abs(S.get(v, Fraction(0)) - m) / m) for v, m in gamma.atoms]
