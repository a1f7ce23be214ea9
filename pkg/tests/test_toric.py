import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from bdiv.convex_core.measure import CurveClass, UnbalancedError, surface_area_measure
from bdiv.convex_core.mixed import inclusion_radius, mixed_volume_polytopes
from bdiv.convex_core.oracle import disk
from bdiv.convex_core.polytope import Polytope, convex_hull
from bdiv.schedules import gon_rays
from bdiv.toric import (
    Config,
    DivisorClass,
    Model,
    NotBig,
    WeilRayData,
    circumscribe,
    incarnate,
    is_big_divisor,
    is_psef,
    nef_envelope,
    norm_omega,
    pair_divisor_curve,
    restrict,
)

from .conftest import dims_and_polytopes, polytopes

AXES = Model.make([(1, 0), (-1, 0), (0, 1), (0, -1)])
UNIT = Polytope.box([-1, -1], [1, 1])
SQUARE = Polytope.box([0, 0], [1, 1])
ORIGIN = convex_hull([(0, 0)])


# -- models --------------------------------------------------------------------


def test_model_needs_positive_span():
    with pytest.raises(ValueError):
        Model.make([(1, 0), (0, 1)])


def test_model_rays_made_primitive():
    R = Model.make([(2, 0), (-3, 0), (0, 5), (0, -1)])
    assert R == AXES


def test_refinement_order():
    fine = Model.make(gon_rays(8))
    assert AXES <= fine and not fine <= AXES
    assert AXES.union(fine) == fine


# -- circumscription and incarnations ------------------------------------------------


def test_disk_on_axes_is_square():
    assert circumscribe(disk(), AXES) == UNIT


def test_square_is_fixed():
    assert circumscribe(SQUARE, Model.make(gon_rays(8))) == SQUARE


@pytest.mark.parametrize("n", [4, 8, 16, 32])
def test_circumscribed_gon_area(n):
    K = circumscribe(disk(), Model.make(gon_rays(n)))
    assert float(K.volume) == pytest.approx(n * math.tan(math.pi / n), abs=1e-7)


def test_circumscribed_areas_decrease_to_pi():
    areas = [float(circumscribe(disk(), Model.make(gon_rays(2**k))).volume) for k in range(2, 9)]
    assert all(a > b > math.pi for a, b in zip(areas, areas[1:]))
    assert areas[-1] - math.pi < 1e-3


@given(polytopes(2, max_points=7))
def test_circumscription_nests(P):
    coarse, fine = Model.make(gon_rays(4)), Model.make(gon_rays(16))
    Kc, Kf = circumscribe(P, coarse), circumscribe(P, fine)
    assert all(Kf.contains_point(v) for v in P.vertices)
    assert all(Kc.contains_point(v) for v in Kf.vertices)


def test_incarnation_values():
    assert incarnate(UNIT, AXES).values == (1, 1, 1, 1)
    R = Model.make([(3, 4), (-1, 0), (0, -1)])
    assert incarnate(disk(), R).values[0] == pytest.approx(5)


@given(dims_and_polytopes())
def test_restriction_is_pushforward(P):
    from bdiv.schedules import grid_rays

    d = P.dim
    fine = Model.make(grid_rays(d, 2))
    coarse = Model.make(grid_rays(d, 1))
    assert restrict(incarnate(P, fine), coarse) == incarnate(P, coarse)


def test_restrict_rejects_finer_target():
    with pytest.raises(ValueError):
        restrict(incarnate(UNIT, AXES), Model.make(gon_rays(8)))


# -- envelopes ----------------------------------------------------------------


def test_projective_plane_triangle():
    R = Model.make([(1, 0), (0, 1), (-1, -1)])
    K = nef_envelope(WeilRayData.make(R, [1, 1, 1]))
    assert K.volume == F(9, 2) and 2 * K.volume == 9
    assert is_big_divisor(K)


def test_redundant_ray_value():
    R = Model.make([(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1)])
    assert nef_envelope(WeilRayData.make(R, [1, 1, 1, 1, 5])) == UNIT


def test_empty_envelope_not_big():
    with pytest.raises(NotBig):
        nef_envelope(WeilRayData.make(AXES, [-1, -1, -1, -1]))


def test_flat_envelope_not_big():
    with pytest.raises(NotBig):
        nef_envelope(WeilRayData.make(AXES, [1, -1, 1, 1]))


@given(st.lists(st.integers(1, 9), min_size=8, max_size=8))
def test_envelope_idempotent_and_extremal(vals):
    R = Model.make(gon_rays(8))
    data = WeilRayData.make(R, vals)
    K = nef_envelope(data)
    assert nef_envelope(incarnate(K, R)) == K
    # support values never exceed the data
    assert all(K.support(r) <= v for r, v in zip(R.rays, data.values))


@given(polytopes(2, max_points=6))
def test_envelope_contains_every_minorant(Q):
    # any body below the data sits inside the envelope
    R = Model.make(gon_rays(8))
    data = WeilRayData.make(R, [Q.support(r) + 1 for r in R.rays])
    K = nef_envelope(data)
    assert all(K.contains_point(v) for v in Q.vertices)


# -- psef and bigness -------------------------------------------------------------


def test_psef_examples():
    c = is_psef(DivisorClass.cartier(SQUARE, SQUARE))
    assert c.feasible
    assert not is_psef(DivisorClass.cartier(ORIGIN, SQUARE)).feasible
    big = Polytope.box([0, 0], [3, 3])
    far = Polytope.box([10, 10], [11, 11])
    c = is_psef(DivisorClass.cartier(big, far))
    assert c.feasible
    moved = far.translate(c.translation)
    assert all(big.contains_point(v) for v in moved.vertices)


def test_psef_infeasible_has_separator():
    c = is_psef(DivisorClass.cartier(SQUARE, Polytope.box([0, 0], [2, 1])))
    assert not c.feasible and c.separator is not None


@given(dims_and_polytopes())
def test_nef_is_psef(P):
    origin = convex_hull([tuple(0 for _ in range(P.dim))])
    assert is_psef(DivisorClass.cartier(P, origin)).feasible


def test_bigness():
    assert is_big_divisor(Polytope.cube(3))
    assert not is_big_divisor(convex_hull([(0, 0), (1, 1)]))
    assert is_big_divisor(disk())


# -- norm ------------------------------------------------------------------------


def test_norm_of_reference_body():
    cfg = Config(2)
    assert norm_omega(DivisorClass.cartier(cfg.W), cfg).value == 1
    assert norm_omega(DivisorClass.cartier(cfg.W.scale(2)), cfg).value == 2


def _circumscription_factor(K, W):
    # bisection on inclusion_radius(c W, K) >= 1
    lo, hi = F(0), F(64)
    for _ in range(60):
        mid = (lo + hi) / 2
        s, _ = inclusion_radius(W.scale(mid), K)
        lo, hi = (lo, mid) if s >= 1 else (mid, hi)
    return hi


@given(polytopes(2, max_points=6))
def test_nef_norm_is_circumscription_factor(K):
    cfg = Config(2)
    w = norm_omega(DivisorClass.cartier(K), cfg)
    assert float(w.value) == pytest.approx(float(_circumscription_factor(K, cfg.W)), abs=1e-12)


@given(polytopes(2, max_points=6), polytopes(2, max_points=6))
def test_norm_witnesses(P, M):
    cfg = Config(2)
    w = norm_omega(DivisorClass.cartier(P, M), cfg)
    CW = cfg.W.scale(w.value)
    big_plus, big_minus = CW + P, CW + M
    assert all(big_plus.contains_point(v) for v in M.translate(w.m_plus).vertices)
    assert all(big_minus.contains_point(v) for v in P.translate(w.m_minus).vertices)
    assert w.value >= 0


@given(polytopes(2, max_points=6), polytopes(2, max_points=6))
def test_norm_symmetric(P, M):
    cfg = Config(2)
    assert norm_omega(DivisorClass.cartier(P, M), cfg).value == norm_omega(DivisorClass.cartier(M, P), cfg).value


# -- pairing ------------------------------------------------------------------------


def test_pairing_examples():
    g = surface_area_measure(SQUARE)
    assert pair_divisor_curve(SQUARE, g) == 2
    assert pair_divisor_curve(ORIGIN, g) == 0
    tri = convex_hull([(0, 0), (1, 0), (0, 1)])
    assert pair_divisor_curve(tri, g) == 2


def test_pairing_with_weil_record():
    g = surface_area_measure(UNIT)
    rec = DivisorClass.from_weil(incarnate(UNIT, AXES))
    assert pair_divisor_curve(rec, g) == pair_divisor_curve(UNIT, g) == 8


def test_pairing_rejects_unbalanced():
    bad = CurveClass((((1, 0), F(1)), ((0, 1), F(1))), 2)
    with pytest.raises(UnbalancedError):
        pair_divisor_curve(SQUARE, bad)


@given(dims_and_polytopes(), st.data())
def test_pairing_is_mixed_volume(K, data):
    from .conftest import polytopes as pts

    L = data.draw(pts(K.dim, max_points=6))
    d = K.dim
    g = surface_area_measure(K)
    assert pair_divisor_curve(L, g) == math.factorial(d) * mixed_volume_polytopes([K] * (d - 1) + [L])


@given(polytopes(2, max_points=6), polytopes(2, max_points=6), st.integers(1, 4))
def test_pairing_linear(K, L, t):
    g = surface_area_measure(K)
    assert pair_divisor_curve(L + K, g) == pair_divisor_curve(L, g) + pair_divisor_curve(K, g)
    assert pair_divisor_curve(L, g.scale(t)) == t * pair_divisor_curve(L, g)


def test_config_validation():
    with pytest.raises(ValueError):
        Config(1)
    with pytest.raises(ValueError):
        Config(2, W=Polytope.box([0, 0], [1, 1]))
    assert Config(3).siu_constant == 3
