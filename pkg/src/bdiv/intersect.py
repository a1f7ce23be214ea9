"""Intersection numbers, decreasing Cartier approximation, and inequality checkers."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence

from mpmath import iv

from .convex_core.exact import solve
from .convex_core.lp import OPTIMAL, maximize
from .convex_core.measure import CurveClass
from .convex_core.mixed import (
    NonConvergence,
    inclusion_radius,
    inner_polytope,
    mixed_volume,
    mixed_volume_polytopes,
)
from .convex_core.oracle import SupportOracle
from .convex_core.polytope import Polytope
from .toric import Config, Model, NotBig, circumscribe, pair_divisor_curve

logger = logging.getLogger(__name__)

iv.dps = 50


def intersection_number(classes: Sequence, schedule=None, tol: float = 1e-9):
    """(a_1 ... a_d) = d! * mixed volume of the bodies."""
    if not classes:
        raise ValueError("no classes given")
    return factorial(classes[0].dim) * mixed_volume(list(classes), schedule=schedule, tol=tol)


def top_degree(K: Polytope) -> Fraction:
    """(a^d) = d! * volume."""
    return factorial(K.dim) * K.volume


# ----------------------------------------------------------------------
# interval helpers for irrational powers of exact rationals


def _iv(x):
    if isinstance(x, Fraction):
        return iv.mpf(x.numerator) / iv.mpf(x.denominator)
    return iv.mpf(x)


def _nonneg(x):
    # clip an interval known (mathematically) to be >= 0
    return iv.mpf([max(x.a, 0), max(x.b, 0)])


def _pow(x, p: Fraction):
    x = _nonneg(x)
    if p == 1:
        return x
    return x ** (iv.mpf(p.numerator) / iv.mpf(p.denominator))


def _mid(x) -> float:
    return float(x.mid)


def diskant_tau(A, B, X, d: int):
    """Interval value of (X^{1/(d-1)} - (X^{d/(d-1)} - A B^{1/(d-1)})^{1/d}) / B^{1/(d-1)}."""
    e1 = Fraction(1, d - 1)
    x1 = _pow(_iv(X), e1)
    b1 = _pow(_iv(B), e1)
    lhs = _pow(_iv(X), Fraction(d, d - 1)) - _iv(A) * b1
    return (x1 - _pow(lhs, Fraction(1, d))) / b1


# ----------------------------------------------------------------------
# Diskant


@dataclass(frozen=True)
class DiskantReport:
    lhs: float
    rhs: float
    s: Fraction
    tau: float
    slack: float
    # certified lower end of the slack interval
    slack_lower: float
    translation: tuple
    holds: bool
    s_ge_tau: bool
    equality: bool


def diskant_check(alpha: Polytope, beta: Polytope, tol: float = 1e-9) -> DiskantReport:
    """Evaluate both sides of the quantitative Diskant bound and compare s with tau."""
    if not (alpha.fulldim and beta.fulldim):
        raise NotBig("Diskant check needs two full-dimensional bodies")
    d = alpha.dim
    A = top_degree(alpha)
    B = top_degree(beta)
    X = factorial(d) * mixed_volume_polytopes([alpha] * (d - 1) + [beta])
    s, m = inclusion_radius(alpha, beta)
    e1 = Fraction(1, d - 1)
    x1 = _pow(_iv(X), e1)
    b1 = _pow(_iv(B), e1)
    lhs = _pow(_iv(X), Fraction(d, d - 1)) - _iv(A) * b1
    base = x1 - _iv(s) * b1
    rhs = base**d
    slack = lhs - rhs
    tau = (x1 - _pow(lhs, Fraction(1, d))) / b1
    lhs_f = _mid(lhs)
    scale = max(1.0, abs(lhs_f))
    slack_lo = float(slack.a)
    return DiskantReport(
        lhs=lhs_f,
        rhs=_mid(rhs),
        s=s,
        tau=_mid(tau),
        slack=_mid(slack),
        slack_lower=slack_lo,
        translation=m,
        holds=slack_lo >= -tol * scale,
        s_ge_tau=float(s) >= float(tau.b) - tol,
        equality=abs(_mid(slack)) <= tol * scale,
    )


# ----------------------------------------------------------------------
# decreasing approximation


@dataclass(frozen=True)
class ApproxCertificate:
    level: int
    body: Polytope
    # s * body + m lies inside the approximated body
    s: float
    tau: float
    s_lp: Fraction
    translation: tuple
    volume_lower: float
    volume_upper: float

    @property
    def volume_gap(self) -> float:
        return self.volume_upper - self.volume_lower


def _check_increasing(schedule: Sequence[Model]):
    for a, b in zip(schedule, schedule[1:]):
        if not a <= b:
            raise ValueError("schedule is not increasing under inclusion")


def approximate_decreasing(body, schedule: Sequence[Model]) -> list[tuple[Polytope, ApproxCertificate]]:
    """Circumscribe along an increasing schedule, certifying each level.

    The scale s_n comes from the Diskant tau formula evaluated at the
    conservative ends of the volume brackets: the inner polytope (hull of
    touching points) bounds (a^d) from below and the circumscribed body bounds
    (a^{d-1} . K_n) from above.  Since the outer bodies shrink, s_n is kept as
    a running maximum.
    """
    _check_increasing(schedule)
    d = body.dim
    out = []
    s_run = 0.0
    for level, R in enumerate(schedule):
        K = circumscribe(body, R)
        if not K.fulldim:
            raise NotBig("circumscribed body is not full-dimensional")
        inner = body if isinstance(body, Polytope) else inner_polytope(body, R.rays)
        B = top_degree(K)
        A_lo = top_degree(inner) if inner.fulldim else Fraction(0)
        tau = diskant_tau(A_lo, B, B, d)
        tau_lo = max(0.0, float(tau.a))
        s_run = min(1.0, max(s_run, tau_lo))
        if inner.fulldim:
            s_lp, m = inclusion_radius(inner, K)
        else:
            s_lp, m = Fraction(0), tuple(Fraction(0) for _ in range(d))
        cert = ApproxCertificate(level, K, s_run, _mid(tau), s_lp, m, float(inner.volume), float(K.volume))
        out.append((K, cert))
    return out


@dataclass(frozen=True)
class SandwichResult:
    body: Polytope
    s: Fraction
    translation: tuple
    level: int
    rays: int


def sandwich_approx(body, eps, cfg: Config | None = None, max_level: int | None = None) -> SandwichResult:
    """K' containing the body with a certified translate of (1-eps)K' inside it."""
    from .schedules import gon_rays, grid_rays

    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    d = body.dim
    if isinstance(body, Polytope):
        if not body.fulldim:
            raise NotBig("body is not full-dimensional")
        return SandwichResult(body, Fraction(1), tuple(Fraction(0) for _ in range(d)), 0, len(body.halfspaces))
    if max_level is None:
        max_level = 11 if d == 2 else 6
    for level in range(max_level):
        rays = gon_rays(2 ** (level + 2)) if d == 2 else grid_rays(d, level + 1)
        R = Model(tuple(rays))
        K = circumscribe(body, R)
        inner = inner_polytope(body, rays)
        if not inner.fulldim:
            raise NotBig("touching points span a lower-dimensional set")
        s, m = inclusion_radius(inner, K)
        logger.debug("sandwich level %d: %d rays, s = %.12g", level, len(rays), float(s))
        if s >= 1 - eps:
            return SandwichResult(K, s, m, level, len(rays))
    raise NonConvergence("sandwich budget exhausted", level=max_level - 1, s=float(s))


# ----------------------------------------------------------------------
# Khovanskii-Teissier


@dataclass(frozen=True)
class MixedSequence:
    e: tuple
    logconcave: bool
    affine: bool


def mixed_sequence(alpha: Polytope, beta: Polytope) -> tuple:
    """e_k = d! V(alpha[k], beta[d-k]) by interpolating vol(j*alpha + beta), j = 0..d."""
    d = alpha.dim
    if beta.dim != d:
        raise ValueError("dimension mismatch")
    vols = []
    for j in range(d + 1):
        vols.append((alpha.scale(j) + beta).volume if j else beta.volume)
    # vol(t a + b) = sum_k C(d,k) V(a[k], b[d-k]) t^k
    rows = [[Fraction(j) ** k for k in range(d + 1)] for j in range(d + 1)]
    coef = solve(rows, vols)
    from math import comb

    return tuple(factorial(d) * c / comb(d, k) for k, c in enumerate(coef))


def kt_sequence(alpha: Polytope, beta: Polytope, tol: float = 1e-12) -> MixedSequence:
    e = mixed_sequence(alpha, beta)
    inner = range(1, len(e) - 1)
    logconcave = all(e[k] ** 2 >= e[k - 1] * e[k + 1] for k in inner)
    affine = all(x > 0 for x in e) and all(
        abs(e[k] ** 2 - e[k - 1] * e[k + 1]) <= Fraction(tol) * e[k] ** 2 for k in inner
    )
    return MixedSequence(e, logconcave, affine)


# ----------------------------------------------------------------------
# Siu


@dataclass(frozen=True)
class SiuReport:
    ratio: Fraction
    bound: Fraction
    translation: tuple
    holds: bool


def containment_factor(alpha: Polytope, beta: Polytope) -> tuple[Fraction, tuple]:
    """min c with K_alpha + m inside c*K_beta (exact LP over (c, m))."""
    d = alpha.dim
    A, b = [], []
    for h in beta.halfspaces:
        A.append((-h.offset,) + tuple(Fraction(x) for x in h.normal))
        b.append(-alpha.support(h.normal))
    res = maximize((Fraction(-1),) + (Fraction(0),) * d, A, b)
    if res.status != OPTIMAL:
        raise NotBig(f"containment LP ended with status {res.status}")
    return res.witness[0], tuple(res.witness[1:])


def siu_ratio(alpha: Polytope, beta: Polytope, cfg: Config) -> SiuReport:
    if not beta.fulldim:
        raise NotBig("beta is not big")
    d = alpha.dim
    R, m = containment_factor(alpha, beta)
    mixed = mixed_volume_polytopes([alpha] + [beta] * (d - 1))
    bound = Fraction(cfg.siu_constant) * mixed / beta.volume
    return SiuReport(R, bound, m, R <= bound)


# ----------------------------------------------------------------------
# Chern-Levine-Nirenberg


@dataclass(frozen=True)
class ClnReport:
    value: Fraction
    norms: tuple
    curve_norm: Fraction
    constant: Fraction
    nonnegative: bool
    within_bound: bool


def cln_check(alphas: Sequence[Polytope], gamma, cfg: Config) -> ClnReport:
    """0 <= (a_1...a_k . g) <= C prod |a_i| |g| with nef norms (a . w^{d-1}).

    ``gamma`` is a CurveClass (k = 1) or a list of d-k bodies whose product
    is the complementary class.  The reported constant is scale invariant in
    every argument and equals 1 when everything is the reference body.
    """
    W = cfg.W
    d = W.dim
    k = len(alphas)
    dfact = factorial(d)
    omega_top = top_degree(W)
    norms = tuple(dfact * mixed_volume_polytopes([a] + [W] * (d - 1)) for a in alphas)
    if isinstance(gamma, CurveClass):
        if k != 1:
            raise ValueError("a curve class pairs with exactly one divisor class")
        value = pair_divisor_curve(alphas[0], gamma)
        gnorm = pair_divisor_curve(W, gamma)
    else:
        gamma = list(gamma)
        if len(gamma) != d - k:
            raise ValueError(f"expected {d - k} complementary bodies, got {len(gamma)}")
        value = dfact * mixed_volume_polytopes(list(alphas) + gamma)
        gnorm = dfact * mixed_volume_polytopes(gamma + [W] * k)
    denom = gnorm
    for n in norms:
        denom *= n
    constant = value * omega_top**k / denom if denom else Fraction(0)
    return ClnReport(value, norms, gnorm, constant, value >= 0, constant <= Fraction(cfg.siu_constant))
