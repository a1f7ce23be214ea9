"""Volume-type functionals of curve classes and their restrictions to models.

vol_hat(g) = inf over big nef b of ((g . b) / (b^d)^{1/d})^{d/(d-1)}; the
infimum is attained at the Minkowski root of g and equals its degree.

On a model R the infimum is taken over bodies with facet normals in R.  Two
independent routes compute it:

* ``lx_on_model`` pushes g forward onto R along the normal fan (exactly, in
  rationals) and solves a plain Minkowski problem for the pushed measure.
* ``m_functional`` runs the Newton kernel on the ray-value parametrization,
  with the pairing term evaluated from true support values of the current
  envelope at g's directions and its gradient from a local cone decomposition.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import factorial
from typing import Sequence

import numpy as np
from scipy.optimize import nnls

from ..convex_core.exact import dot, rank, solve
from ..convex_core.measure import CurveClass, UnbalancedError
from ..convex_core.mixed import NonConvergence
from ..convex_core.polytope import Polytope
from ..intersect import DiskantReport, diskant_check
from ..metrics import hausdorff_translated
from ..toric import Config, Model, NotBig, circumscribe
from .geometry import GeometryError
from .solver import ball_start, exact_residuals, finalize, minkowski_solve, newton_kernel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FunctionalReport:
    value: float
    minimizer: Polytope | None
    model: Model | None
    residual: float
    iterations: int = 0


@dataclass(frozen=True)
class DecompositionReport:
    body: Polytope
    value: float
    residual: float
    model: Model
    level: int = 0
    hausdorff: float | None = None
    diameter: float | None = None
    translation: tuple | None = None
    diskant: DiskantReport | None = None
    iterations: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def relative_hausdorff(self) -> float | None:
        if self.hausdorff is None or not self.diameter:
            return None
        return self.hausdorff / self.diameter


def _check_balanced(gamma: CurveClass):
    if any(gamma.balance()):
        raise UnbalancedError("curve class is not balanced")


def curve_pairing(gamma: CurveClass, body: Polytope) -> Fraction:
    """(g . b) = (d-1)! * sum m h_b(v), exact."""
    return factorial(gamma.dim - 1) * sum(m * body.support(v) for v, m in gamma.atoms)


def degree(body: Polytope) -> Fraction:
    return factorial(body.dim) * body.volume


def ratio_value(gamma: CurveClass, body: Polytope) -> float:
    """((g . b) / (b^d)^{1/d})^{d/(d-1)} for a big body b."""
    d = gamma.dim
    deg = degree(body)
    if deg <= 0:
        raise NotBig("candidate body is not big")
    p = float(curve_pairing(gamma, body))
    return (p / float(deg) ** (1.0 / d)) ** (d / (d - 1))


def is_big_curve(gamma: CurveClass, cfg: Config | None = None) -> bool:
    """Big iff the atom directions positively span the space."""
    _check_balanced(gamma)
    return gamma.is_spanning()


def vol_hat(gamma: CurveClass, cfg: Config | None = None, candidates: Sequence[Polytope] | None = None) -> FunctionalReport:
    """Exact value via the Minkowski root, or an upper bound over candidate bodies.

    A class whose directions do not span has value 0 (no minimizer).
    """
    _check_balanced(gamma)
    if candidates is not None:
        best, arg = math.inf, None
        for b in candidates:
            v = ratio_value(gamma, b)
            if v < best:
                best, arg = v, b
        if arg is None:
            raise ValueError("no candidate bodies given")
        return FunctionalReport(best, arg, None, 0.0)
    if not gamma.is_spanning():
        return FunctionalReport(0.0, None, None, 0.0)
    rep = minkowski_solve(gamma, cfg)
    return FunctionalReport(float(degree(rep.body)), rep.body, None, rep.residual, rep.iterations)


# ----------------------------------------------------------------------
# push-forward onto a model


def _cone_coefficients(v: tuple, gens: list[tuple]) -> list[Fraction] | None:
    """Nonnegative exact coefficients writing v over some basis drawn from gens."""
    d = len(v)
    for sub in combinations(range(len(gens)), d):
        M = [gens[i] for i in sub]
        if rank(M) < d:
            continue
        cols = [[M[j][i] for j in range(d)] for i in range(d)]
        lam = solve(cols, list(v))
        if all(x >= 0 for x in lam):
            out = [Fraction(0)] * len(gens)
            for i, x in zip(sub, lam):
                out[i] = x
            return out
    return None


def pushforward_2d(gamma: CurveClass, R: Model) -> CurveClass:
    """Move each atom onto the two rays of R bounding its angular sector."""
    rays = sorted(R.rays, key=lambda r: math.atan2(r[1], r[0]))
    angles = [math.atan2(r[1], r[0]) for r in rays]
    out: dict[tuple, Fraction] = {}
    n = len(rays)
    for v, m in gamma.atoms:
        t = math.atan2(v[1], v[0])
        # candidate sector from the float angle; verified exactly below
        k = int(np.searchsorted(angles, t, side="right")) - 1
        found = None
        for j in (k, k - 1, k + 1):
            a, b = rays[j % n], rays[(j + 1) % n]
            lam = _cone_coefficients(v, [a, b])
            if lam is not None and _det2(a, b) > 0:
                found = (a, b, lam)
                break
        if found is None:
            raise ArithmeticError(f"no sector of the model contains {v}")
        a, b, lam = found
        for r, x in zip((a, b), lam):
            if x:
                out[r] = out.get(r, Fraction(0)) + m * x
    return CurveClass(tuple(out.items()), 2)


def _det2(a, b) -> int:
    return a[0] * b[1] - a[1] * b[0]


def pushforward_along(gamma: CurveClass, body: Polytope) -> CurveClass:
    """Move each atom onto the facet normals at a vertex of body maximizing it."""
    d = body.dim
    inc_by_vertex: dict[int, list[int]] = {}
    for j, idx in enumerate(body.incidence):
        for k in idx:
            inc_by_vertex.setdefault(k, []).append(j)
    out: dict[tuple, Fraction] = {}
    for v, m in gamma.atoms:
        vals = [dot(x, v) for x in body.vertices]
        top = max(vals)
        lam = None
        for k, val in enumerate(vals):
            if val != top:
                continue
            facets = inc_by_vertex.get(k, [])
            gens = [body.halfspaces[j].normal for j in facets]
            lam = _cone_coefficients(v, gens)
            if lam is not None:
                break
        if lam is None:
            raise ArithmeticError(f"direction {v} is not in any normal cone of the body")
        for j, x in zip(facets, lam):
            if x:
                r = body.halfspaces[j].normal
                out[r] = out.get(r, Fraction(0)) + m * x
    return CurveClass(tuple(out.items()), d)


# ----------------------------------------------------------------------
# restricted problem through the push-forward


def _orthogonality(gamma: CurveClass, body: Polytope) -> tuple[float, float]:
    """(value, |(g . L) - (L^d)| / (L^d)) for the scaled minimizer L."""
    deg = degree(body)
    pair = curve_pairing(gamma, body)
    return float(deg), float(abs(pair - deg) / deg)


def lx_on_model(gamma: CurveClass, R: Model, cfg: Config | None = None, max_rounds: int = 20) -> DecompositionReport:
    """Minimizer of the vol-hat ratio over bodies with facet normals in R.

    In the plane the normal fan of any such body is refined by the sectors of
    R, so the push-forward is fixed and one Minkowski solve suffices.  In
    higher dimension the push-forward depends on the body's fan; it is
    iterated to a fixed point.
    """
    _check_balanced(gamma)
    if not gamma.is_spanning():
        raise NotBig("curve class is not big")
    if gamma.dim != R.dim:
        raise ValueError("dimension mismatch between class and model")
    if gamma.dim == 2:
        pushed = pushforward_2d(gamma, R)
        rep = minkowski_solve(pushed, cfg)
        value, res = _orthogonality(gamma, rep.body)
        return DecompositionReport(rep.body, value, res, R, iterations=rep.iterations, extra={"pushed_atoms": len(pushed.atoms)})
    root = minkowski_solve(gamma, cfg).body
    body = circumscribe(root, R)
    pushed = pushforward_along(gamma, body)
    its = 0
    for rnd in range(max_rounds):
        rep = minkowski_solve(pushed, cfg)
        its += rep.iterations
        nxt = pushforward_along(gamma, rep.body)
        if nxt == pushed:
            value, res = _orthogonality(gamma, rep.body)
            return DecompositionReport(rep.body, value, res, R, iterations=its, extra={"rounds": rnd + 1})
        pushed = nxt
    raise NonConvergence("push-forward did not stabilize", rounds=max_rounds)


def _with_distance(rep: DecompositionReport, root: Polytope, level: int, **kw) -> DecompositionReport:
    dist, t = hausdorff_translated(rep.body, root)
    return DecompositionReport(
        rep.body,
        rep.value,
        rep.residual,
        rep.model,
        level=level,
        hausdorff=dist,
        diameter=root.diameter(),
        translation=tuple(float(x) for x in t),
        iterations=rep.iterations,
        extra=dict(rep.extra),
        **kw,
    )


def _check_schedule(schedule: Sequence[Model]):
    for a, b in zip(schedule, schedule[1:]):
        if not a <= b:
            raise ValueError("schedule is not increasing under inclusion")


def lx_refinement_run(gamma: CurveClass, schedule: Sequence[Model], cfg: Config | None = None) -> list[DecompositionReport]:
    """Restricted minimizers along a schedule with their distance to the root."""
    _check_schedule(schedule)
    root = minkowski_solve(gamma, cfg).body
    return [_with_distance(lx_on_model(gamma, R, cfg), root, level) for level, R in enumerate(schedule)]


# ----------------------------------------------------------------------
# envelope parametrization


def _support_pairing(dirs: np.ndarray, masses: np.ndarray, U: np.ndarray):
    """True-support pairing sum m_k max_x <x, v_k> with its cone-decomposition gradient."""
    unit = U / np.linalg.norm(U, axis=1)[:, None]

    def pairing(h, geom):
        V = geom.vertices
        vals = V @ dirs.T
        tops = vals.max(axis=0)
        grad = np.zeros(len(U))
        for k, v in enumerate(dirs):
            scale = max(1.0, abs(tops[k]))
            cand = np.flatnonzero(vals[:, k] >= tops[k] - 1e-12 * scale)
            facets = sorted({i for i, inc in enumerate(geom.incidence) for c in cand if c in inc})
            # facets tight at the maximizing vertices, then the best nonnegative fit
            tight = [i for i in facets if abs(unit[i] @ V[cand[0]] - h[i] / np.linalg.norm(U[i])) <= 1e-9 * scale]
            if not tight:
                tight = facets
            lam, err = nnls(unit[tight].T, v)
            if err > 1e-9 * np.linalg.norm(v):
                raise GeometryError(f"direction {v} has no nonnegative decomposition at its vertex")
            grad[tight] += masses[k] * lam / np.linalg.norm(U[tight], axis=1)
        return float(masses @ tops), grad

    return pairing


def m_functional(gamma: CurveClass, R: Model, cfg: Config | None = None, max_rounds: int = 10) -> FunctionalReport:
    """Restricted vol-hat over envelopes of ray-value records on R.

    Rays that carry no mass at the current geometry are pruned and the
    kernel restarted, until the set of charged rays is stable.
    """
    _check_balanced(gamma)
    if not gamma.is_spanning():
        raise NotBig("curve class is not big")
    d = gamma.dim
    floor = 1e-8 if cfg is None else cfg.tol
    tol = min(floor, 1e-10)
    budget = 10_000 if cfg is None else cfg.budget
    dirs = np.array(gamma.directions, dtype=float)
    masses = np.array([float(m) for m in gamma.weights])
    rays = list(R.rays)
    its = 0
    for _ in range(max_rounds):
        U = np.array(rays, dtype=float)
        pairing = _support_pairing(dirs, masses, U)
        h0 = ball_start(U)
        from .geometry import geometry

        _, mu0 = pairing(h0, geometry(U, h0))
        keep = [i for i in range(len(rays)) if mu0[i] > 1e-14 * mu0.max()]
        if len(keep) < len(rays):
            rays = [rays[i] for i in keep]
            continue
        try:
            out = newton_kernel(U, h0, pairing, tol=tol, budget=budget, floor_tol=floor)
        except GeometryError as exc:
            raise NonConvergence(f"envelope kernel failed: {exc}") from None
        its += out.iterations
        charged = [i for i in range(len(rays)) if out.mu[i] > 1e-14 * out.mu.max()]
        if len(charged) < len(rays):
            rays = [rays[i] for i in charged]
            continue
        body = finalize(rays, out.h, out.geom)
        value = ratio_value(gamma, body)
        return FunctionalReport(value, body, R, out.residual, its)
    raise NonConvergence("charged ray set did not stabilize", rounds=max_rounds)


def mv_refinement_run(gamma: CurveClass, schedule: Sequence[Model], cfg: Config | None = None) -> list[DecompositionReport]:
    """Envelope minimizers along a schedule, with distance and Diskant data against the root."""
    _check_schedule(schedule)
    root = minkowski_solve(gamma, cfg).body
    out = []
    for level, R in enumerate(schedule):
        f = m_functional(gamma, R, cfg)
        _, res = _orthogonality(gamma, f.minimizer)
        base = DecompositionReport(f.minimizer, f.value, res, R, iterations=f.iterations, extra={"kernel_residual": f.residual})
        out.append(_with_distance(base, root, level, diskant=diskant_check(f.minimizer, root)))
    return out
