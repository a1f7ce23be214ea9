"""JSON reading and writing for every value type and report.

Rationals are written as integers or "p/q" strings and floats with 17
significant digits, so printed reports can be diffed bit for bit.
"""

from __future__ import annotations

import dataclasses
import json
import math
from fractions import Fraction
from typing import Any

import numpy as np

from .convex_core.exact import format_fraction, to_fraction
from .convex_core.measure import CurveClass, UnbalancedError
from .convex_core.oracle import SupportOracle, ball, disk, ellipsoid
from .convex_core.polytope import Halfspace, Polytope, convex_hull
from .toric import DivisorClass, Model, WeilRayData


class InputError(ValueError):
    """Malformed JSON input; ``path`` points at the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


# ----------------------------------------------------------------------
# text output


def _float_text(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = f"{x:.17g}"
    # keep floats recognizable as floats
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def dumps(obj: Any, indent: int | None = 2) -> str:
    """JSON text with floats at 17 significant digits."""
    return _emit(to_json(obj), indent, 0)


def _emit(x, indent, level) -> str:
    if isinstance(x, float):
        return _float_text(x)
    if isinstance(x, (str, int, bool)) or x is None:
        return json.dumps(x)
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    sep = "," if indent is not None else ", "
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_emit(v, indent, level + 1)}" for k, v in x.items()]
        return "{" + sep.join(items) + end + "}"
    if isinstance(x, list):
        if not x:
            return "[]"
        # short scalar rows stay on one line
        if all(not isinstance(v, (dict, list)) for v in x):
            return "[" + ", ".join(_emit(v, None, 0) for v in x) + "]"
        items = [pad + _emit(v, indent, level + 1) for v in x]
        return "[" + sep.join(items) + end + "]"
    raise TypeError(f"cannot emit {type(x).__name__}")


# ----------------------------------------------------------------------
# value -> plain JSON structure


def _vec(v) -> list:
    return [format_fraction(a) for a in v]


def polytope_to_json(P: Polytope) -> dict:
    return {
        "dim": P.dim,
        "fulldim": P.fulldim,
        "vertices": [_vec(v) for v in P.vertices],
        "halfspaces": [{"normal": list(h.normal), "offset": format_fraction(h.offset)} for h in P.halfspaces],
    }


def curve_to_json(g: CurveClass) -> dict:
    return {"dim": g.dim, "atoms": [{"direction": list(v), "weight": format_fraction(m)} for v, m in g.atoms]}


def model_to_json(R: Model) -> dict:
    return {"dim": R.dim, "rays": [list(r) for r in R.rays]}


def weil_to_json(w: WeilRayData) -> dict:
    return {"model": model_to_json(w.model), "values": [format_fraction(x) for x in w.values]}


def divisor_to_json(a: DivisorClass) -> dict:
    if a.weil is not None:
        return {"weil": weil_to_json(a.weil)}
    return {"plus": polytope_to_json(a.plus), "minus": polytope_to_json(a.minus)}


def to_json(x: Any) -> Any:
    """Plain JSON structure for values, reports and containers."""
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return format_fraction(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.ndarray):
        return [to_json(v) for v in x.tolist()]
    if isinstance(x, Polytope):
        return polytope_to_json(x)
    if isinstance(x, CurveClass):
        return curve_to_json(x)
    if isinstance(x, Model):
        return model_to_json(x)
    if isinstance(x, WeilRayData):
        return weil_to_json(x)
    if isinstance(x, DivisorClass):
        return divisor_to_json(x)
    if isinstance(x, SupportOracle):
        return {"oracle": x.label, "dim": x.dim}
    if dataclasses.is_dataclass(x):
        out = {f.name: to_json(getattr(x, f.name)) for f in dataclasses.fields(x)}
        # computed properties worth reporting
        for name in ("volume_gap", "relative_hausdorff"):
            if hasattr(type(x), name):
                out[name] = to_json(getattr(x, name))
        return out
    if isinstance(x, dict):
        return {str(k): to_json(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_json(v) for v in x]
    raise TypeError(f"cannot serialize {type(x).__name__}")


# ----------------------------------------------------------------------
# plain JSON structure -> value


def _need(data, key, path):
    if not isinstance(data, dict):
        raise InputError(path, "expected an object")
    if key not in data:
        raise InputError(f"{path}.{key}", "missing field")
    return data[key]


def _scalar(x, path) -> Fraction:
    if isinstance(x, float):
        # decimal literals mean what they say
        x = repr(x)
    try:
        return to_fraction(x)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(path, f"not a rational number ({exc})") from None


def _scalar_list(xs, path) -> tuple:
    if not isinstance(xs, list):
        raise InputError(path, "expected a list")
    return tuple(_scalar(x, f"{path}[{i}]") for i, x in enumerate(xs))


def _int_list(xs, path) -> tuple:
    v = _scalar_list(xs, path)
    for i, a in enumerate(v):
        if a.denominator != 1:
            raise InputError(f"{path}[{i}]", "expected an integer")
    return tuple(int(a) for a in v)


def _check_dim(data, d, path):
    if isinstance(data, dict) and "dim" in data and data["dim"] != d:
        raise InputError(f"{path}.dim", f"declared {data['dim']} but entries have dimension {d}")


def polytope_from_json(data, path: str = "$") -> Polytope:
    if not isinstance(data, dict):
        raise InputError(path, "expected a polytope object")
    if "vertices" in data:
        pts = data["vertices"]
        if not isinstance(pts, list) or not pts:
            raise InputError(f"{path}.vertices", "expected a nonempty list of points")
        vs = [_scalar_list(p, f"{path}.vertices[{i}]") for i, p in enumerate(pts)]
        if len({len(v) for v in vs}) != 1:
            raise InputError(f"{path}.vertices", "points have mismatched dimensions")
        _check_dim(data, len(vs[0]), path)
        P = convex_hull(vs)
        for i, h in enumerate(data.get("halfspaces", [])):
            hs = _halfspace(h, f"{path}.halfspaces[{i}]")
            if not all(hs.contains(v) for v in P.vertices):
                raise InputError(f"{path}.halfspaces[{i}]", "inconsistent with the vertices")
        return P
    if "halfspaces" in data:
        raw = data["halfspaces"]
        if not isinstance(raw, list) or not raw:
            raise InputError(f"{path}.halfspaces", "expected a nonempty list")
        hs = [_halfspace(h, f"{path}.halfspaces[{i}]") for i, h in enumerate(raw)]
        _check_dim(data, len(hs[0].normal), path)
        try:
            return Polytope.from_halfspaces(hs)
        except ValueError as exc:
            raise InputError(f"{path}.halfspaces", str(exc)) from None
    raise InputError(path, "a polytope needs 'vertices' or 'halfspaces'")


def _halfspace(h, path) -> Halfspace:
    normal = _scalar_list(_need(h, "normal", path), f"{path}.normal")
    offset = _scalar(_need(h, "offset", path), f"{path}.offset")
    try:
        return Halfspace.make(normal, offset)
    except ValueError as exc:
        raise InputError(f"{path}.normal", str(exc)) from None


def curve_from_json(data, path: str = "$") -> CurveClass:
    atoms = _need(data, "atoms", path)
    if not isinstance(atoms, list) or not atoms:
        raise InputError(f"{path}.atoms", "expected a nonempty list")
    parsed = []
    for i, a in enumerate(atoms):
        p = f"{path}.atoms[{i}]"
        parsed.append((_int_list(_need(a, "direction", p), f"{p}.direction"), _scalar(_need(a, "weight", p), f"{p}.weight")))
    try:
        g = CurveClass.make(parsed)
    except UnbalancedError as exc:
        raise InputError(f"{path}.atoms", str(exc)) from None
    except ValueError as exc:
        raise InputError(f"{path}.atoms", str(exc)) from None
    _check_dim(data, g.dim, path)
    return g


def model_from_json(data, path: str = "$") -> Model:
    rays = _need(data, "rays", path)
    if not isinstance(rays, list) or not rays:
        raise InputError(f"{path}.rays", "expected a nonempty list")
    rs = [_int_list(r, f"{path}.rays[{i}]") for i, r in enumerate(rays)]
    try:
        R = Model.make(rs)
    except ValueError as exc:
        raise InputError(f"{path}.rays", str(exc)) from None
    _check_dim(data, R.dim, path)
    return R


def weil_from_json(data, path: str = "$") -> WeilRayData:
    R = model_from_json(_need(data, "model", path), f"{path}.model")
    vals = _scalar_list(_need(data, "values", path), f"{path}.values")
    try:
        return WeilRayData.make(R, vals)
    except ValueError as exc:
        raise InputError(f"{path}.values", str(exc)) from None


def divisor_from_json(data, path: str = "$") -> DivisorClass:
    if isinstance(data, dict) and "weil" in data:
        return DivisorClass.from_weil(weil_from_json(data["weil"], f"{path}.weil"))
    if isinstance(data, dict) and "plus" in data:
        plus = polytope_from_json(data["plus"], f"{path}.plus")
        minus = polytope_from_json(data["minus"], f"{path}.minus") if "minus" in data else None
        try:
            return DivisorClass.cartier(plus, minus)
        except ValueError as exc:
            raise InputError(path, str(exc)) from None
    if isinstance(data, dict) and ("vertices" in data or "halfspaces" in data):
        return DivisorClass.cartier(polytope_from_json(data, path))
    raise InputError(path, "a divisor class needs 'plus'/'minus' or 'weil'")


def oracle_from_json(data, path: str = "$") -> SupportOracle:
    kind = _need(data, "oracle", path)
    try:
        if kind == "disk":
            return disk(float(data.get("radius", 1.0)))
        if kind == "ball":
            return ball(int(_need(data, "dim", path)), float(data.get("radius", 1.0)))
        if kind == "ellipsoid":
            axes = [float(a) for a in _need(data, "semi_axes", path)]
            return ellipsoid(axes)
    except (TypeError, ValueError) as exc:
        raise InputError(path, str(exc)) from None
    raise InputError(f"{path}.oracle", f"unknown oracle {kind!r} (disk, ball, ellipsoid)")


def body_from_json(data, path: str = "$"):
    """A Polytope or a SupportOracle."""
    if isinstance(data, dict) and "oracle" in data:
        return oracle_from_json(data, path)
    return polytope_from_json(data, path)


def load(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(path, f"cannot read file ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise InputError(path, f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
