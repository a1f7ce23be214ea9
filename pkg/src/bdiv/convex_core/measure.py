"""Balanced discrete measures on directions (curve classes) and surface-area measures."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence

from .exact import primitive, to_fraction
from .polytope import Polytope


class UnbalancedError(ValueError):
    """Atoms of a curve class do not sum to zero."""


@dataclass(frozen=True)
class CurveClass:
    """Atoms (v, m): primitive integer direction v, positive rational weight m.

    The atom stands for the measure m*|v|*delta_{v/|v|}, so pairing with a
    support function h is sum m * h(v).
    """

    atoms: tuple
    dim: int

    @classmethod
    def make(cls, atoms: Iterable[tuple[Sequence, object]], merge: bool = False) -> "CurveClass":
        out: dict[tuple, Fraction] = {}
        dim = None
        for direction, weight in atoms:
            v = tuple(int(a) for a in direction)
            if any(int(a) != a for a in direction):
                raise ValueError(f"atom direction {direction!r} must be integral")
            if dim is None:
                dim = len(v)
            elif len(v) != dim:
                raise ValueError("atom directions have mismatched dimensions")
            p = primitive(v)
            k = next(a // b for a, b in zip(v, p) if b != 0)
            w = to_fraction(weight) * k
            if w <= 0:
                raise ValueError("atom weights must be positive")
            if p in out:
                if not merge:
                    raise ValueError(f"two atoms share the direction {p}")
                out[p] += w
            else:
                out[p] = w
        if dim is None:
            raise ValueError("a curve class needs at least one atom")
        cc = cls(tuple(out.items()), dim)
        if any(cc.balance()):
            raise UnbalancedError(f"atoms are not balanced: sum = {cc.balance()}")
        return cc

    def balance(self) -> tuple:
        return tuple(sum(m * v[k] for v, m in self.atoms) for k in range(self.dim))

    @property
    def directions(self) -> list[tuple]:
        return [v for v, _ in self.atoms]

    @property
    def weights(self) -> list[Fraction]:
        return [m for _, m in self.atoms]

    def scale(self, t) -> "CurveClass":
        t = to_fraction(t)
        if t <= 0:
            raise ValueError("scale must be positive")
        return CurveClass(tuple((v, m * t) for v, m in self.atoms), self.dim)

    def pairing_sum(self, h) -> object:
        """sum m_i * h(v_i) for a callable support function h."""
        return sum(m * h(v) for v, m in self.atoms)

    def weight_of(self, v) -> Fraction:
        v = primitive(v)
        for u, m in self.atoms:
            if u == v:
                return m
        return Fraction(0)

    def is_spanning(self) -> bool:
        from .polytope import convex_hull

        # 0 interior to conv(directions) iff every facet offset is positive
        Q = convex_hull(self.directions)
        return Q.fulldim and all(h.offset > 0 for h in Q.halfspaces)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CurveClass):
            return NotImplemented
        return self.dim == other.dim and dict(self.atoms) == dict(other.atoms)

    def __hash__(self) -> int:
        return hash((self.dim, frozenset(self.atoms)))


def surface_area_measure(P: Polytope) -> CurveClass:
    """Facet normals with weights facet-area / |normal| (the (d-1)-fold self product)."""
    if not P.fulldim:
        raise ValueError("surface area measure needs a full-dimensional polytope")
    atoms = tuple((h.normal, w) for h, w in zip(P.halfspaces, P.facet_weights))
    cc = CurveClass(atoms, P.dim)
    if any(cc.balance()):
        raise AssertionError("surface measure failed the balance identity")
    return cc


def pairing_degree(P: Polytope) -> Fraction:
    """sum m_i h_P(v_i) for the surface measure of P; equals d * volume(P)."""
    return sum(w * h.offset for h, w in zip(P.halfspaces, P.facet_weights))


def normalized_pairing(gamma: CurveClass, h) -> object:
    """(d-1)! * sum m_i h(v_i): the normalized curve/divisor pairing."""
    return factorial(gamma.dim - 1) * gamma.pairing_sum(h)

