import json
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from bdiv.convex_core.measure import surface_area_measure
from bdiv.convex_core.oracle import ellipsoid
from bdiv.schedules import gon_rays
from bdiv.serialize import (
    InputError,
    body_from_json,
    curve_from_json,
    divisor_from_json,
    dumps,
    model_from_json,
    polytope_from_json,
    weil_from_json,
)
from bdiv.toric import DivisorClass, Model, WeilRayData, incarnate

from .conftest import dims_and_polytopes, polytopes


def reparse(x):
    return json.loads(dumps(x))


@given(dims_and_polytopes())
def test_polytope_round_trip(P):
    assert polytope_from_json(reparse(P)) == P
    # the halfspace form alone also suffices
    assert polytope_from_json({"halfspaces": reparse(P)["halfspaces"]}) == P


@given(dims_and_polytopes())
def test_curve_round_trip(P):
    g = surface_area_measure(P)
    assert curve_from_json(reparse(g)) == g


@given(st.lists(st.fractions(-5, 5, max_denominator=9), min_size=8, max_size=8))
def test_model_and_weil_round_trip(vals):
    R = Model.make(gon_rays(8))
    assert model_from_json(reparse(R)) == R
    w = WeilRayData.make(R, vals)
    assert weil_from_json(reparse(w)) == w
    a = DivisorClass.from_weil(w)
    assert divisor_from_json(reparse(a)).weil == w


@given(polytopes(2, max_points=5), polytopes(2, max_points=5))
def test_cartier_round_trip(P, M):
    a = divisor_from_json(reparse(DivisorClass.cartier(P, M)))
    assert a.pair() == (P, M)


def test_rationals_print_as_strings():
    assert dumps(F(7, 2)) == '"7/2"'
    assert dumps(F(4)) == "4"
    assert dumps(0.1) == "0.10000000000000001"
    assert float(dumps(1 / 3)) == 1 / 3
    assert dumps(2.0) == "2.0"


def test_decimal_input_is_exact():
    P = polytope_from_json({"vertices": [[0, 0], [0.1, 0], [0, 0.1]]})
    assert F(1, 10) in {v[0] for v in P.vertices}


def test_oracles():
    E = body_from_json({"oracle": "ellipsoid", "semi_axes": [2, 1]})
    assert E((1.0, 0.0)) == pytest.approx(ellipsoid([2, 1])((1.0, 0.0)))
    assert body_from_json({"oracle": "ball", "dim": 3}).dim == 3
    with pytest.raises(InputError, match=r"\$\.oracle"):
        body_from_json({"oracle": "cone"})


@pytest.mark.parametrize(
    "fn, data, where",
    [
        (polytope_from_json, {"vertices": [[0, 0], [1]]}, "$.vertices"),
        (polytope_from_json, {"vertices": [[0, "a"]]}, "$.vertices[0][1]"),
        (polytope_from_json, {}, "$"),
        (polytope_from_json, {"vertices": [[0, 0], [1, 0], [0, 1]], "dim": 3}, "$.dim"),
        (polytope_from_json, {"halfspaces": [{"normal": [1, 0], "offset": 1}]}, "$.halfspaces"),
        (polytope_from_json, {"halfspaces": [{"normal": [0, 0], "offset": 1}]}, "$.halfspaces[0].normal"),
        (curve_from_json, {"atoms": [{"direction": [1, 0], "weight": 1}]}, "$.atoms"),
        (curve_from_json, {"atoms": [{"direction": [1.5, 0], "weight": 1}]}, "$.atoms[0].direction[0]"),
        (curve_from_json, {"atoms": [{"weight": 1}]}, "$.atoms[0].direction"),
        (model_from_json, {"rays": [[1, 0], [0, 1]]}, "$.rays"),
        (weil_from_json, {"model": {"rays": [[1, 0], [-1, 0], [0, 1], [0, -1]]}, "values": [1]}, "$.values"),
        (divisor_from_json, {"minus": {}}, "$"),
    ],
)
def test_errors_point_at_field(fn, data, where):
    with pytest.raises(InputError) as exc:
        fn(data)
    assert exc.value.path == where


def test_report_dataclasses_serialize():
    from bdiv.intersect import approximate_decreasing
    from bdiv.convex_core.oracle import disk
    from bdiv.schedules import gon_schedule

    K, cert = approximate_decreasing(disk(), gon_schedule(2, 2))[0]
    out = reparse(cert)
    assert out["volume_gap"] == pytest.approx(cert.volume_gap)
    assert out["body"]["vertices"]
