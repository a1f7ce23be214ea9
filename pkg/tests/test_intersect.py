import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from bdiv.convex_core.measure import surface_area_measure
from bdiv.convex_core.oracle import disk, ellipsoid
from bdiv.convex_core.polytope import Polytope, convex_hull
from bdiv.corpus import random_pair
from bdiv.intersect import (
    approximate_decreasing,
    cln_check,
    diskant_check,
    intersection_number,
    kt_sequence,
    sandwich_approx,
    siu_ratio,
    top_degree,
)
from bdiv.schedules import gon_schedule
from bdiv.toric import Config, Model, NotBig

from .conftest import dims_and_polytopes, polytopes

SQUARE = Polytope.box([0, 0], [1, 1])


def test_intersection_examples():
    assert intersection_number([Polytope.box([0] * 3, [1] * 3)] * 3) == 6
    a, b = Polytope.box([0, 0], [1, 2]), Polytope.box([0, 0], [3, 1])
    assert intersection_number([a, b]) == 7
    v = intersection_number([SQUARE, disk()], schedule=gon_schedule(2, 12))
    assert v == pytest.approx(4, abs=1e-8)


@given(dims_and_polytopes())
def test_intersection_on_diagonal_is_degree(P):
    assert intersection_number([P] * P.dim) == math.factorial(P.dim) * P.volume == top_degree(P)


# -- Diskant ------------------------------------------------------------------------


def test_diskant_equal_classes():
    r = diskant_check(SQUARE, SQUARE)
    assert r.lhs == pytest.approx(0, abs=1e-12) and r.rhs == pytest.approx(0, abs=1e-12)
    assert r.s == 1 and r.tau == pytest.approx(1)
    assert r.holds and r.equality


def test_diskant_homothety():
    r = diskant_check(Polytope.box([0, 0], [2, 2]), SQUARE)
    assert r.s == 2
    assert r.lhs == pytest.approx(0, abs=1e-12) and r.rhs == pytest.approx(0, abs=1e-12)
    assert r.holds and r.s_ge_tau


def test_diskant_needs_big():
    with pytest.raises(NotBig):
        diskant_check(SQUARE, convex_hull([(0, 0), (1, 0)]))


@given(dims_and_polytopes(), st.data())
def test_diskant_holds(K, data):
    L = data.draw(polytopes(K.dim, max_points=6))
    r = diskant_check(K, L)
    assert r.slack >= -1e-9 * max(1, abs(r.lhs))
    assert r.holds and r.s_ge_tau


@given(polytopes(2, max_points=6), st.integers(1, 20), st.integers(1, 7))
def test_diskant_equality_for_homothets(K, p, q):
    r = diskant_check(K.scale(F(p, q)).translate((1, -2)), K)
    assert abs(r.slack) <= 1e-9 * max(1, abs(r.lhs))
    assert float(r.s) == pytest.approx(p / q)


# -- decreasing approximation ------------------------------------------------------


def test_disk_approximation_volumes():
    out = approximate_decreasing(disk(), gon_schedule(2, 4))
    vols = [float(K.volume) for K, _ in out]
    assert vols == pytest.approx([4, 8 * math.tan(math.pi / 8), 16 * math.tan(math.pi / 16)], abs=1e-9)
    certs = [c for _, c in out]
    assert all(a.s <= b.s for a, b in zip(certs, certs[1:]))
    assert all(0 < c.s <= 1 for c in certs)


def test_polytope_approximation_constant():
    out = approximate_decreasing(SQUARE, gon_schedule(2, 5))
    assert all(K == SQUARE for K, _ in out)
    assert all(c.s == 1 for _, c in out)


def test_ellipse_approximation():
    out = approximate_decreasing(ellipsoid([2, 1]), gon_schedule(2, 8))
    vols = [float(K.volume) for K, _ in out]
    assert all(a >= b >= 2 * math.pi - 1e-9 for a, b in zip(vols, vols[1:]))
    assert vols[-1] - 2 * math.pi < 1e-3
    assert all(c.volume_lower <= 2 * math.pi + 1e-9 for _, c in out)


def test_pairings_decrease_to_limit():
    out = approximate_decreasing(disk(), gon_schedule(2, 11))
    vals = [float(intersection_number([SQUARE, K])) for K, _ in out]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert vals[-1] == pytest.approx(4, abs=1e-4)


def test_schedule_must_increase():
    with pytest.raises(ValueError):
        approximate_decreasing(disk(), list(reversed(gon_schedule(2, 4))))


def test_sandwich():
    assert sandwich_approx(SQUARE, F(1, 2)).s == 1
    r = sandwich_approx(disk(), F(1, 10))
    assert r.s >= F(9, 10)
    n = r.rays
    assert math.cos(math.pi / n) >= 0.9 - 1e-9
    small = sandwich_approx(disk(), F(1, 10**6))
    assert small.s >= 1 - F(1, 10**6) and small.rays > n
    inner = small.body.scale(small.s).translate(small.translation)
    assert all(math.hypot(*map(float, v)) <= 1 + 1e-12 for v in inner.vertices)


def test_sandwich_rejects_bad_eps():
    with pytest.raises(ValueError):
        sandwich_approx(disk(), 1)


# -- Khovanskii-Teissier ------------------------------------------------------------


def test_kt_examples():
    assert kt_sequence(SQUARE, SQUARE).affine
    r = kt_sequence(SQUARE.scale(2), Polytope.box([0, 0], [2, 1]))
    r2 = kt_sequence(SQUARE, Polytope.box([0, 0], [2, 1]))
    assert r2.e == (4, 3, 2) and r2.logconcave and not r2.affine
    h = kt_sequence(SQUARE.scale(3), SQUARE)
    assert h.e == (2, 6, 18) and h.affine
    assert r.logconcave


@given(dims_and_polytopes(), st.data())
def test_kt_logconcave(K, data):
    L = data.draw(polytopes(K.dim, max_points=6))
    r = kt_sequence(K, L)
    assert r.logconcave and all(x >= 0 for x in r.e)


# -- Siu and CLN -------------------------------------------------------------------


def test_siu_examples():
    cfg = Config(2)
    r = siu_ratio(SQUARE, SQUARE, cfg)
    assert r.ratio == 1 and r.bound == 2
    r = siu_ratio(Polytope.box([0, 0], [1, 10]), SQUARE, cfg)
    assert r.ratio == 10 and r.bound == 11 and r.holds


def test_siu_probe_corpus_slice():
    rng = random.Random(5)
    for d in (2, 3):
        cfg = Config(d)
        for _ in range(10):
            a, b = random_pair(rng, d)
            assert siu_ratio(a, b, cfg).holds


def test_cln_reference_constant():
    cfg = Config(2)
    r = cln_check([cfg.W], surface_area_measure(cfg.W), cfg)
    assert r.constant == 1 and r.nonnegative


@given(polytopes(2, max_points=6), polytopes(2, max_points=6))
def test_cln_scale_invariant(K, L):
    cfg = Config(2)
    g = surface_area_measure(L)
    r1 = cln_check([K], g, cfg)
    r2 = cln_check([K.scale(2)], g, cfg)
    assert r1.nonnegative
    assert r2.value == 2 * r1.value and r2.norms[0] == 2 * r1.norms[0]
    assert r2.constant == r1.constant


def test_cln_body_products():
    cfg = Config(3)
    C = Polytope.cube(3)
    r = cln_check([C], [C, C], cfg)
    assert r.constant == 1
    with pytest.raises(ValueError):
        cln_check([C], [C], cfg)
