"""Toric b-divisor layer: models, incarnations, envelopes, positivity and pairings.

Convention: a nef class is a convex body K through its support function h_K.
A Cartier class is a difference h_plus - h_minus, and it is pseudo-effective
exactly when some translate of K_minus fits inside K_plus.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Mapping, Sequence, Union

import numpy as np

from .convex_core.exact import dot, primitive, to_fraction
from .convex_core.lp import INFEASIBLE, OPTIMAL, feasible_point, maximize
from .convex_core.measure import CurveClass, UnbalancedError
from .convex_core.mixed import inner_polytope
from .convex_core.oracle import SupportOracle
from .convex_core.polytope import (
    EmptyPolytopeError,
    Halfspace,
    Polytope,
    _positively_span,
    convex_hull,
    minkowski_sum,
)

Body = Union[Polytope, SupportOracle]


class NotBig(ValueError):
    """The class is not big; ``certificate`` holds whatever witnesses the failure."""

    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate


@dataclass(frozen=True)
class Model:
    """A positively spanning set of primitive integer rays, ordered by inclusion."""

    rays: tuple

    @classmethod
    def make(cls, rays: Sequence[Sequence]) -> "Model":
        seen: dict[tuple, None] = {}
        dim = None
        for r in rays:
            if any(int(a) != a for a in r):
                raise ValueError(f"ray {tuple(r)!r} is not integral")
            p = primitive(tuple(int(a) for a in r))
            if dim is None:
                dim = len(p)
            elif len(p) != dim:
                raise ValueError("rays have mismatched dimensions")
            seen.setdefault(p, None)
        if dim is None:
            raise ValueError("a model needs rays")
        if dim < 2:
            raise ValueError("ambient dimension must be at least 2")
        if not _positively_span(list(seen), dim):
            raise ValueError("rays do not positively span the ambient space")
        return cls(tuple(seen))

    @property
    def dim(self) -> int:
        return len(self.rays[0])

    def __len__(self) -> int:
        return len(self.rays)

    def __le__(self, other: "Model") -> bool:
        return set(self.rays) <= set(other.rays)

    def __ge__(self, other: "Model") -> bool:
        return other <= self

    def __eq__(self, other) -> bool:
        if not isinstance(other, Model):
            return NotImplemented
        return set(self.rays) == set(other.rays)

    def __hash__(self) -> int:
        return hash(frozenset(self.rays))

    def union(self, other: "Model") -> "Model":
        return Model(tuple(dict.fromkeys(self.rays + other.rays)))


@dataclass(frozen=True)
class WeilRayData:
    """One value per ray of a model (the incarnation of a class on that model)."""

    model: Model
    values: tuple

    @classmethod
    def make(cls, model: Model, values) -> "WeilRayData":
        if isinstance(values, Mapping):
            vals = tuple(to_fraction(values[r]) for r in model.rays)
        else:
            vals = tuple(to_fraction(v) for v in values)
        if len(vals) != len(model.rays):
            raise ValueError(f"{len(model.rays)} rays but {len(vals)} values")
        return cls(model, vals)

    def value(self, ray) -> Fraction:
        ray = primitive(tuple(ray))
        for r, v in zip(self.model.rays, self.values):
            if r == ray:
                return v
        raise KeyError(ray)

    def as_dict(self) -> dict:
        return dict(zip(self.model.rays, self.values))


@dataclass(frozen=True)
class DivisorClass:
    """Either a Cartier pair h_plus - h_minus or a Weil ray record."""

    plus: Polytope | None = None
    minus: Polytope | None = None
    weil: WeilRayData | None = None

    @classmethod
    def cartier(cls, plus: Polytope, minus: Polytope | None = None) -> "DivisorClass":
        if minus is None:
            minus = convex_hull([tuple(Fraction(0) for _ in range(plus.dim))])
        if plus.dim != minus.dim:
            raise ValueError("plus and minus parts have different dimensions")
        return cls(plus=plus, minus=minus)

    @classmethod
    def from_weil(cls, data: WeilRayData) -> "DivisorClass":
        return cls(weil=data)

    @property
    def is_cartier(self) -> bool:
        return self.weil is None

    @property
    def dim(self) -> int:
        return self.plus.dim if self.weil is None else self.weil.model.dim

    def pair(self) -> tuple[Polytope, Polytope]:
        """Cartier pair form; Weil records are replaced by their envelope."""
        if self.weil is None:
            return self.plus, self.minus
        P = nef_envelope(self.weil, require_big=False)
        return P, convex_hull([tuple(Fraction(0) for _ in range(P.dim))])

    def evaluate(self, u):
        plus, minus = self.pair()
        return plus.support(u) - minus.support(u)


@dataclass(frozen=True)
class PsefCertificate:
    feasible: bool
    translation: tuple | None = None
    # Farkas multipliers on the facets of the plus part (infeasible case)
    separator: tuple | None = None


@dataclass(frozen=True)
class Config:
    d: int
    W: Polytope = field(default=None)
    siu_constant: Fraction = field(default=None)
    tol: float = 1e-8
    budget: int = 10_000

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("dimension must be at least 2")
        if self.W is None:
            object.__setattr__(self, "W", Polytope.cube(self.d))
        if self.siu_constant is None:
            object.__setattr__(self, "siu_constant", Fraction(self.d))
        W = self.W
        if W.dim != self.d or not W.fulldim:
            raise ValueError("reference body must be full-dimensional in dimension d")
        origin = tuple(Fraction(0) for _ in range(self.d))
        if not all(h.offset > 0 for h in W.halfspaces) or not W.contains_point(origin):
            raise ValueError("reference body must contain 0 in its interior")

    @classmethod
    def from_dict(cls, d: int, data: Mapping) -> "Config":
        from .serialize import polytope_from_json

        kw = {}
        if "W" in data:
            kw["W"] = polytope_from_json(data["W"])
        if "siu_constant" in data:
            kw["siu_constant"] = to_fraction(data["siu_constant"])
        if "tol" in data:
            kw["tol"] = float(data["tol"])
        if "budget" in data:
            kw["budget"] = int(data["budget"])
        return cls(int(data.get("d", d)), **kw)


# ----------------------------------------------------------------------
# incarnations, circumscription, envelopes


def _value_at(body: Body, ray) -> Fraction:
    if isinstance(body, Polytope):
        return body.support(tuple(ray))
    return Fraction(body(np.asarray(ray, dtype=float)))


def incarnate(body: Body, R: Model) -> WeilRayData:
    """Support values of the body at the rays of R."""
    return WeilRayData(R, tuple(_value_at(body, r) for r in R.rays))


def restrict(data: WeilRayData, coarser: Model) -> WeilRayData:
    """Push a record forward to a coarser model (keep only its rays)."""
    if not coarser <= data.model:
        raise ValueError("target model is not coarser than the record's model")
    table = data.as_dict()
    return WeilRayData(coarser, tuple(table[r] for r in coarser.rays))


def circumscribe(body: Body, R: Model) -> Polytope:
    """{x : <x, r> <= h(r) for every ray r}; contains the body, normals in R."""
    return nef_envelope(incarnate(body, R), require_big=False)


def nef_envelope(data: WeilRayData, require_big: bool = True) -> Polytope:
    """The largest body whose support values are at most the record's values."""
    hs = [Halfspace(r, v) for r, v in zip(data.model.rays, data.values)]
    try:
        P = Polytope.from_halfspaces(hs)
    except EmptyPolytopeError:
        res = feasible_point([h.normal for h in hs], [h.offset for h in hs])
        raise NotBig("envelope is empty", certificate=res.dual) from None
    if require_big and not P.fulldim:
        raise NotBig("envelope is not full-dimensional (volume 0)", certificate=P)
    return P


# ----------------------------------------------------------------------
# positivity


def _constraint_normals(*bodies: Polytope) -> list[tuple]:
    seen: dict[tuple, None] = {}
    for K in bodies:
        for h in K.halfspaces:
            seen.setdefault(h.normal, None)
    return list(seen)


def is_psef(alpha: DivisorClass) -> PsefCertificate:
    """Exact test for a translate of K_minus inside K_plus."""
    plus, minus = alpha.pair()
    d = plus.dim
    A = [tuple(Fraction(x) for x in h.normal) for h in plus.halfspaces]
    b = [h.offset - minus.support(h.normal) for h in plus.halfspaces]
    res = feasible_point(A, b)
    if res.status == OPTIMAL:
        m = tuple(res.witness)
        assert all(minus.support(h.normal) + dot(h.normal, m) <= h.offset for h in plus.halfspaces)
        return PsefCertificate(True, m)
    if res.status == INFEASIBLE:
        return PsefCertificate(False, separator=res.dual)
    raise RuntimeError(f"unexpected LP status {res.status} in dimension {d}")


def is_big_divisor(body: Body, cfg: Config | None = None) -> bool:
    """Positive volume; oracle bodies are bracketed by inner and outer polytopes."""
    if isinstance(body, Polytope):
        return body.fulldim
    from .schedules import grid_rays

    rays = grid_rays(body.dim, 1)
    outer = circumscribe(body, Model.make(rays))
    if not outer.fulldim:
        return False
    tol = 1e-12 if cfg is None else cfg.tol
    inner = inner_polytope(body, rays)
    return inner.fulldim and float(inner.volume) > tol * float(outer.volume)


@dataclass(frozen=True)
class NormWitness:
    value: Fraction
    # K_minus + m_plus inside C*W + K_plus, and K_plus + m_minus inside C*W + K_minus
    m_plus: tuple
    m_minus: tuple


def norm_omega(alpha: DivisorClass, cfg: Config) -> NormWitness:
    """Least C with both C*W + alpha and C*W - alpha pseudo-effective (exact LP)."""
    plus, minus = alpha.pair()
    W = cfg.W
    d = plus.dim
    if W.dim != d:
        raise ValueError("reference body has the wrong dimension")
    fan = minkowski_sum(minkowski_sum(W, plus), minus)
    normals = _constraint_normals(fan, plus, minus)
    # variables (C, m_plus, m_minus); maximize -C
    A, b = [], []
    zero = (Fraction(0),) * d
    for n in normals:
        hw, hp, hm = W.support(n), plus.support(n), minus.support(n)
        nf = tuple(Fraction(x) for x in n)
        A.append((-hw,) + nf + zero)
        b.append(hp - hm)
        A.append((-hw,) + zero + nf)
        b.append(hm - hp)
    c = (Fraction(-1),) + zero + zero
    res = maximize(c, A, b)
    if res.status != OPTIMAL:
        raise RuntimeError(f"norm LP ended with status {res.status}")
    w = res.witness
    return NormWitness(w[0], tuple(w[1 : d + 1]), tuple(w[d + 1 :]))


# ----------------------------------------------------------------------
# pairing


def pair_divisor_curve(beta, gamma: CurveClass):
    """(d-1)! * sum_i m_i * beta(v_i), exact for polytopes and Cartier pairs."""
    if any(gamma.balance()):
        raise UnbalancedError("curve class is not balanced")
    if isinstance(beta, Polytope):
        if beta.dim != gamma.dim:
            raise ValueError("dimension mismatch")
        h = beta.support
    elif isinstance(beta, SupportOracle):
        h = beta
    elif isinstance(beta, DivisorClass):
        if beta.weil is not None:
            table = beta.weil.as_dict()
            missing = [v for v in gamma.directions if v not in table]
            if missing:
                raise ValueError(f"curve directions {missing} are not rays of the record's model")
            h = table.__getitem__
        else:
            h = beta.evaluate
    else:
        raise TypeError(f"cannot pair {type(beta).__name__} with a curve class")
    return factorial(gamma.dim - 1) * gamma.pairing_sum(lambda v: h(v))
