import random
from fractions import Fraction as F
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bdiv.convex_core.exact import dot
from bdiv.convex_core.lp import OPTIMAL, maximize
from bdiv.convex_core.measure import CurveClass, UnbalancedError, pairing_degree, surface_area_measure
from bdiv.convex_core.mixed import (
    check_inclusion,
    inclusion_radius,
    mixed_volume,
    mixed_volume_polytopes,
    support_eval,
)
from bdiv.convex_core.oracle import disk, ellipsoid
from bdiv.convex_core.polytope import Halfspace, Polytope, convex_hull, minkowski_sum
from bdiv.oracles import (
    extreme_points_by_lp,
    inclusion_radius_by_grid,
    mixed_volumes_by_expansion,
    pairwise_sum_hull,
    triangulation_volume,
)
from bdiv.schedules import gon_schedule

from .conftest import dims_and_polytopes, polytopes

SQUARE = Polytope.box([0, 0], [1, 1])
TRIANGLE = convex_hull([(0, 0), (1, 0), (0, 1)])


# -- hulls ---------------------------------------------------------------


def test_hull_drops_interior_point():
    P = convex_hull([(0, 0), (1, 0), (0, 1), (1, 1), (F(1, 2), F(1, 2))])
    assert len(P.vertices) == 4 and len(P.halfspaces) == 4
    assert P == SQUARE


def test_hull_simplex_is_fulldim():
    P = convex_hull([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert P.fulldim and len(P.vertices) == 4 and len(P.halfspaces) == 4


def test_hull_vertices_match_lp_extremality():
    rng = random.Random(11)
    pts = [tuple(F(rng.randint(-100, 100), 100) for _ in range(3)) for _ in range(50)]
    assert set(convex_hull(pts).vertices) == extreme_points_by_lp(pts)


def test_hull_rejects_mixed_dimensions():
    with pytest.raises(ValueError):
        convex_hull([(0, 0), (1, 0, 0)])


def test_lower_dimensional_hull():
    seg = convex_hull([(0, 0), (2, 2), (1, 1)])
    assert not seg.fulldim
    assert seg.volume == 0
    assert len(seg.vertices) == 2
    with pytest.raises(ValueError):
        surface_area_measure(seg)


@given(dims_and_polytopes())
def test_dual_descriptions_agree(P):
    for v in P.vertices:
        assert all(h.contains(v) for h in P.halfspaces)
    again = Polytope.from_halfspaces(P.halfspaces)
    assert set(again.vertices) == set(P.vertices)


# -- sums and volumes -------------------------------------------------------


def test_minkowski_sum_of_squares():
    assert SQUARE + SQUARE == Polytope.box([0, 0], [2, 2])


def test_point_summand_translates():
    pt = convex_hull([(5, 5)])
    assert SQUARE + pt == Polytope.box([5, 5], [6, 6])


def test_square_plus_triangle_matches_pairwise_hull():
    assert minkowski_sum(SQUARE, TRIANGLE) == pairwise_sum_hull(SQUARE, TRIANGLE)


@given(polytopes(2, max_points=6), polytopes(2, max_points=6))
def test_sum_support_is_additive(P, Q):
    S = P + Q
    for u in [(1, 0), (0, 1), (-1, 2), (3, -5), (-1, -1)]:
        assert S.support(u) == P.support(u) + Q.support(u)


def test_volume_examples():
    assert Polytope.cube(3, F(1, 2)).volume == 1
    assert TRIANGLE.volume == F(1, 2)


@given(dims_and_polytopes())
def test_volume_matches_triangulation(P):
    assert P.volume == triangulation_volume(P)


@given(dims_and_polytopes(), st.tuples(*[st.fractions(-3, 3, max_denominator=7)] * 3))
def test_translation_invariance(P, m):
    m = m[: P.dim]
    Q = P.translate(m)
    assert Q.volume == P.volume
    assert surface_area_measure(Q) == surface_area_measure(P)


# -- mixed volumes ------------------------------------------------------------


def test_mixed_volume_of_cube_is_volume():
    C = Polytope.box([0, 0, 0], [1, 1, 1])
    assert mixed_volume([C, C, C]) == 1


def test_mixed_volume_of_boxes():
    a = Polytope.box([0, 0], [1, 2])
    b = Polytope.box([0, 0], [3, 1])
    assert mixed_volume([a, b]) == F(7, 2)
    assert mixed_volumes_by_expansion(a, b)[1] == F(7, 2)


def test_mixed_volume_square_disk():
    sched = gon_schedule(2, 12)
    v = mixed_volume([Polytope.box([0, 0], [1, 1]), disk()], schedule=sched, tol=1e-9)
    # Steiner: vol(K + tB) = vol K + t Per K + pi t^2, so V(K, B) = Per / 2
    assert v == pytest.approx(2, abs=1e-9)


def test_mixed_volume_needs_d_bodies():
    with pytest.raises(ValueError):
        mixed_volume([SQUARE])


@given(polytopes(2, max_points=6), polytopes(2, max_points=6))
def test_planar_mixed_volume_identity(K, L):
    assert mixed_volume_polytopes([K, L]) == ((K + L).volume - K.volume - L.volume) / 2


@given(polytopes(3, max_points=6), polytopes(3, max_points=6), st.integers(1, 5))
def test_mixed_volume_symmetric_and_homogeneous(K, L, t):
    v = mixed_volume_polytopes([K, K, L])
    assert mixed_volume_polytopes([L, K, K]) == v
    assert mixed_volume_polytopes([K, K, L.scale(F(t, 3))]) == F(t, 3) * v


@given(polytopes(2, max_points=6), polytopes(2, max_points=6))
def test_mixed_volume_monotone(K, L):
    bigger = convex_hull(list(L.vertices) + [tuple(2 * x for x in L.vertices[0])] + [(0, 0)])
    assert mixed_volume_polytopes([K, L]) <= mixed_volume_polytopes([K, bigger])


@given(polytopes(2, max_points=6), polytopes(2, max_points=6))
def test_mixed_volume_matches_expansion(K, L):
    assert mixed_volume_polytopes([K, L]) == mixed_volumes_by_expansion(K, L)[1]


# -- surface measures ------------------------------------------------------------


def test_square_measure():
    assert surface_area_measure(SQUARE) == CurveClass.make([((1, 0), 1), ((-1, 0), 1), ((0, 1), 1), ((0, -1), 1)])


def test_cube_measure():
    g = surface_area_measure(Polytope.cube(3))
    assert sorted(g.weights) == [4] * 6


def test_triangle_measure():
    g = surface_area_measure(TRIANGLE)
    assert dict(g.atoms) == {(-1, 0): 1, (0, -1): 1, (1, 1): 1}


@given(dims_and_polytopes())
def test_balance_and_pairing_degree(P):
    g = surface_area_measure(P)
    assert not any(g.balance())
    assert sum(m * P.support(v) for v, m in g.atoms) == P.dim * P.volume
    assert pairing_degree(P) == P.dim * P.volume


def test_unbalanced_curve_rejected():
    with pytest.raises(UnbalancedError):
        CurveClass.make([((1, 0), 1), ((0, 1), 1)])


def test_duplicate_direction_rejected():
    with pytest.raises(ValueError):
        CurveClass.make([((1, 0), 1), ((2, 0), 1), ((-1, 0), 3)])


# -- support and inclusion --------------------------------------------------------


def test_support_examples():
    assert support_eval(SQUARE, (1, 1)) == 2
    assert support_eval(disk(), (3, 4)) == pytest.approx(5)
    with pytest.raises(ValueError):
        support_eval(SQUARE, (0, 0))


@given(dims_and_polytopes(), st.integers(1, 9))
def test_support_homogeneous(P, t):
    u = tuple(range(1, P.dim + 1))
    assert P.support(tuple(t * a for a in u)) == t * P.support(u)


def test_oracle_spot_checks():
    assert disk().spot_check()
    assert ellipsoid([2, 1]).spot_check()


def test_inclusion_radius_examples():
    assert inclusion_radius(SQUARE, SQUARE) == (1, (0, 0))
    s, m = inclusion_radius(Polytope.box([0, 0], [2, 2]), SQUARE)
    assert s == 2
    tri = convex_hull([(0, 0), (2, 0), (0, 2)])
    s, m = inclusion_radius(tri, SQUARE)
    assert check_inclusion(tri, SQUARE, s, m)
    assert float(s) == pytest.approx(inclusion_radius_by_grid(tri, SQUARE), abs=1e-6)
    assert s == 1


@given(polytopes(2, max_points=6), polytopes(2, max_points=6))
def test_inclusion_radius_certificate(K, L):
    s, m = inclusion_radius(K, L)
    assert check_inclusion(K, L, s, m)
    assert float(s) == pytest.approx(inclusion_radius_by_grid(K, L), abs=1e-6)


# -- exact LP ------------------------------------------------------------------


def test_lp_certificate_is_exact():
    # maximize x + y on the unit square
    A = [(1, 0), (0, 1), (-1, 0), (0, -1)]
    b = [1, 1, 0, 0]
    res = maximize((1, 1), A, b)
    assert res.status == OPTIMAL and res.objective == 2
    assert all(dot(a, res.witness) <= bi for a, bi in zip(A, b))


def test_lp_handles_huge_normals():
    # a polygon with primitive normals of size ~ 2^24 and its own inradius
    from bdiv.schedules import regular_gon

    P = regular_gon(64)
    s, m = inclusion_radius(P, P)
    assert s == 1
