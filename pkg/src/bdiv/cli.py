"""Command-line front end: ``bdiv <command> [options]``.

Every command prints a JSON run report (or CSV with ``--format csv``) with
the command echo, the configuration, per-instance results, a summary and a
violations list.  Exit codes: 0 success, 1 input error, 2 NotBig or
infeasible, 3 NonConvergence, 4 a check ran and reported violations.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Any, Callable

from . import acceptance
from .convex_core.exact import format_fraction
from .convex_core.measure import CurveClass, UnbalancedError, surface_area_measure
from .convex_core.mixed import NonConvergence, inclusion_radius, mixed_volume
from .convex_core.polytope import EmptyPolytopeError, Polytope, UnboundedError, convex_hull
from .corpus import FAMILIES, CorpusSpec, write
from .intersect import (
    approximate_decreasing,
    cln_check,
    diskant_check,
    kt_sequence,
    sandwich_approx,
    siu_ratio,
)
from .minkowski.functionals import (
    is_big_curve,
    lx_on_model,
    lx_refinement_run,
    m_functional,
    mv_refinement_run,
    vol_hat,
)
from .minkowski.solver import minkowski_solve
from .schedules import schedule_by_name
from .serialize import (
    InputError,
    body_from_json,
    curve_from_json,
    divisor_from_json,
    dumps,
    load,
    model_from_json,
    polytope_from_json,
    to_json,
    weil_from_json,
)
from .toric import Config, DivisorClass, NotBig, circumscribe, is_psef, nef_envelope, norm_omega, pair_divisor_curve

EXIT_OK, EXIT_INPUT, EXIT_NOTBIG, EXIT_NONCONV, EXIT_VIOLATION = 0, 1, 2, 3, 4


class Infeasible(Exception):
    """A feasibility question was answered in the negative."""

    def __init__(self, result):
        super().__init__("infeasible")
        self.result = result


@dataclass
class RunReport:
    command: list
    config: dict
    results: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    status: str = "ok"

    @property
    def passed(self) -> bool:
        return not self.violations

    def as_json(self) -> dict:
        out = to_json(
            {
                "command": self.command,
                "config": self.config,
                "results": self.results,
                "summary": self.summary,
                "violations": self.violations,
            }
        )
        out["status"] = self.status
        out["pass"] = self.passed
        return out


# ----------------------------------------------------------------------
# input helpers


def _polytope(path: str) -> Polytope:
    return polytope_from_json(load(path), path)


def _body(path: str):
    return body_from_json(load(path), path)


def _curve(path: str) -> CurveClass:
    return curve_from_json(load(path), path)


def _points(path: str) -> list:
    data = load(path)
    pts = data.get("points") if isinstance(data, dict) else data
    if not isinstance(pts, list) or not pts:
        raise InputError(f"{path}.points", "expected a nonempty list of points")
    P = polytope_from_json({"vertices": pts}, path)
    return P


def _config(args, d: int) -> Config:
    data = load(args.config) if args.config else {}
    if not isinstance(data, dict):
        raise InputError(args.config, "config must be a JSON object")
    try:
        cfg = Config.from_dict(d, data)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(args.config or "$config", str(exc)) from None
    if args.tol is not None:
        cfg = Config(cfg.d, cfg.W, cfg.siu_constant, args.tol, cfg.budget)
    return cfg


def _config_echo(cfg: Config | None, args) -> dict:
    out: dict[str, Any] = {"seed": args.seed}
    if cfg is not None:
        out.update({"d": cfg.d, "W": cfg.W, "siu_constant": cfg.siu_constant, "tol": cfg.tol, "budget": cfg.budget})
    elif args.tol is not None:
        out["tol"] = args.tol
    return out


def _model_or_schedule(args, d: int):
    """(Model, schedule list, schedule echo) from --model or --schedule/--levels."""
    if getattr(args, "model", None):
        R = model_from_json(load(args.model), args.model)
        return R, [R], {"model": args.model}
    if getattr(args, "schedule", None):
        try:
            sched = schedule_by_name(args.schedule, args.levels, d)
        except ValueError as exc:
            raise InputError("--schedule", str(exc)) from None
        return sched[-1], sched, {"schedule": args.schedule, "levels": args.levels}
    raise InputError("--model", "give --model or --schedule")


def _pmap(fn: Callable, items: list, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


# ----------------------------------------------------------------------
# commands; each returns a RunReport


def cmd_hull(args):
    P = _points(args.points)
    return RunReport([], {}, [{"polytope": P, "vertices": len(P.vertices), "facets": len(P.halfspaces)}])


def cmd_sum(args):
    P, Q = (_polytope(p) for p in args.bodies)
    return RunReport([], {}, [{"polytope": P + Q}])


def _volume_one(path):
    P = _polytope(path)
    return {"file": path, "volume": P.volume, "degree": factorial(P.dim) * P.volume, "fulldim": P.fulldim}


def cmd_volume(args):
    return RunReport([], {}, _pmap(_volume_one, args.body, args.jobs))


def cmd_mixed_volume(args):
    bodies = [_body(p) for p in args.bodies]
    d = bodies[0].dim
    if len(bodies) != d:
        raise InputError("--bodies", f"dimension {d} needs exactly {d} bodies, got {len(bodies)}")
    schedule = None
    echo = {}
    if not all(isinstance(b, Polytope) for b in bodies):
        _, schedule, echo = _model_or_schedule(args, d)
    cfg = _config(args, d)
    v = mixed_volume(bodies, schedule=schedule, tol=cfg.tol)
    rep = RunReport([], _config_echo(cfg, args) | echo, [{"mixed_volume": v, "intersection_number": factorial(d) * v}])
    return rep


def _surface_one(path):
    P = _polytope(path)
    if not P.fulldim:
        raise NotBig(f"{path}: polytope is not full-dimensional")
    return {"file": path, "measure": surface_area_measure(P)}


def cmd_surface_measure(args):
    return RunReport([], {}, _pmap(_surface_one, args.body, args.jobs))


def cmd_inradius(args):
    K, L = _polytope(args.outer), _polytope(args.inner)
    if not L.fulldim:
        raise NotBig("inner body is not full-dimensional")
    s, m = inclusion_radius(K, L)
    return RunReport([], {}, [{"s": s, "translation": m}])


def cmd_circumscribe(args):
    body = _body(args.body)
    R, _, echo = _model_or_schedule(args, body.dim)
    K = circumscribe(body, R)
    return RunReport([], echo, [{"polytope": K, "volume": K.volume}])


def cmd_envelope(args):
    data = weil_from_json(load(args.weil), args.weil)
    K = nef_envelope(data)
    return RunReport([], {}, [{"polytope": K, "volume": K.volume, "degree": factorial(K.dim) * K.volume}])


def cmd_psef(args):
    alpha = divisor_from_json(load(args.divisor), args.divisor)
    cert = is_psef(alpha)
    rep = RunReport([], {}, [{"certificate": cert}])
    if not cert.feasible:
        raise Infeasible(rep)
    return rep


def cmd_norm_omega(args):
    alpha = divisor_from_json(load(args.divisor), args.divisor)
    cfg = _config(args, alpha.dim)
    return RunReport([], _config_echo(cfg, args), [{"norm": norm_omega(alpha, cfg)}])


def cmd_pair(args):
    gamma = _curve(args.measure)
    data = load(args.divisor)
    beta = divisor_from_json(data, args.divisor) if isinstance(data, dict) and ("plus" in data or "weil" in data) else body_from_json(data, args.divisor)
    return RunReport([], {}, [{"pairing": pair_divisor_curve(beta, gamma)}])


def cmd_intersect(args):
    bodies = [_body(p) for p in args.bodies]
    d = bodies[0].dim
    if len(bodies) != d:
        raise InputError("--bodies", f"dimension {d} needs exactly {d} bodies, got {len(bodies)}")
    schedule, echo = None, {}
    if not all(isinstance(b, Polytope) for b in bodies):
        _, schedule, echo = _model_or_schedule(args, d)
    cfg = _config(args, d)
    v = mixed_volume(bodies, schedule=schedule, tol=cfg.tol)
    return RunReport([], _config_echo(cfg, args) | echo, [{"intersection_number": factorial(d) * v}])


def cmd_approx(args):
    body = _body(args.body)
    _, sched, echo = _model_or_schedule(args, body.dim)
    out = approximate_decreasing(body, sched)
    results = [{"level": c.level, "rays": len(sched[c.level].rays), "volume": K.volume, "certificate": c} for K, c in out]
    rep = RunReport([], echo, results)
    vols = [K.volume for K, _ in out]
    ss = [c.s for _, c in out]
    if any(b > a for a, b in zip(vols, vols[1:])):
        rep.violations.append({"volumes_not_decreasing": vols})
    if any(b < a for a, b in zip(ss, ss[1:])):
        rep.violations.append({"scales_not_monotone": ss})
    rep.summary = {"final_volume": float(vols[-1]), "final_s": ss[-1]}
    return rep


def cmd_sandwich(args):
    body = _body(args.body)
    cfg = _config(args, body.dim)
    r = sandwich_approx(body, Fraction(args.eps), cfg)
    return RunReport([], _config_echo(cfg, args) | {"eps": args.eps}, [{"result": r}])


def _pair(args):
    a, b = _polytope(args.alpha), _polytope(args.beta)
    if a.dim != b.dim:
        raise InputError("--beta", "dimension differs from --alpha")
    return a, b


def cmd_diskant(args):
    a, b = _pair(args)
    tol = args.tol if args.tol is not None else 1e-9
    r = diskant_check(a, b, tol)
    rep = RunReport([], {"tol": tol}, [{"report": r}])
    if not r.holds:
        rep.violations.append({"slack": r.slack})
    if not r.s_ge_tau:
        rep.violations.append({"s": r.s, "tau": r.tau})
    return rep


def cmd_kt(args):
    a, b = _pair(args)
    r = kt_sequence(a, b)
    rep = RunReport([], {}, [{"sequence": r}])
    if not r.logconcave:
        rep.violations.append({"not_logconcave": [str(x) for x in r.e]})
    return rep


def cmd_siu(args):
    a, b = _pair(args)
    cfg = _config(args, a.dim)
    r = siu_ratio(a, b, cfg)
    rep = RunReport([], _config_echo(cfg, args), [{"report": r}])
    if not r.holds:
        rep.violations.append({"R": r.ratio, "bound": r.bound})
    return rep


def cmd_cln(args):
    alphas = [_polytope(p) for p in args.alphas]
    d = alphas[0].dim
    cfg = _config(args, d)
    if args.measure:
        gamma = _curve(args.measure)
    elif args.bodies:
        gamma = [_polytope(p) for p in args.bodies]
    else:
        raise InputError("--measure", "give --measure or --bodies for the complementary class")
    try:
        r = cln_check(alphas, gamma, cfg)
    except ValueError as exc:
        if isinstance(exc, NotBig):
            raise
        raise InputError("--alphas", str(exc)) from None
    rep = RunReport([], _config_echo(cfg, args), [{"report": r}])
    if not r.nonnegative:
        rep.violations.append({"negative_value": r.value})
    return rep


def _solve_one(job):
    path, tol, seed = job
    gamma = _curve(path)
    cfg = Config(gamma.dim, tol=tol) if tol is not None else None
    start = None
    if seed is not None:
        import numpy as np

        start = np.random.default_rng(seed)
    rep = minkowski_solve(gamma, cfg, tol=tol, start=start)
    return {"file": path, "report": rep}


def cmd_solve(args):
    start_seed = args.seed if args.random_start else None
    jobs = [(p, args.tol, start_seed) for p in args.measure]
    results = _pmap(_solve_one, jobs, args.jobs)
    rep = RunReport([], _config_echo(None, args), results)
    tol = args.tol if args.tol is not None else 1e-8
    for r in results:
        if r["report"].residual > tol:
            rep.violations.append({"file": r["file"], "residual": r["report"].residual})
    rep.summary = {"max_residual": max(r["report"].residual for r in results)}
    return rep


def cmd_volhat(args):
    gamma = _curve(args.measure)
    cfg = _config(args, gamma.dim)
    cands = [_polytope(p) for p in args.candidates] if args.candidates else None
    r = vol_hat(gamma, cfg, cands)
    return RunReport([], _config_echo(cfg, args), [{"functional": r, "mode": "candidates" if cands else "exact"}])


def cmd_lx(args):
    gamma = _curve(args.measure)
    cfg = _config(args, gamma.dim)
    R, _, echo = _model_or_schedule(args, gamma.dim)
    r = lx_on_model(gamma, R, cfg)
    return RunReport([], _config_echo(cfg, args) | echo, [{"decomposition": r}])


def _run_summary(rep: RunReport, runs, threshold):
    vals = [r.value for r in runs]
    dists = [r.relative_hausdorff for r in runs]
    rep.summary = {"values": vals, "relative_hausdorff": dists}
    if any(b > a * (1 + 1e-9) for a, b in zip(vals, vals[1:])):
        rep.violations.append({"values_not_monotone": vals})
    if threshold is not None and dists[-1] > threshold:
        rep.violations.append({"final_relative_hausdorff": dists[-1], "threshold": threshold})


def cmd_lx_run(args):
    gamma = _curve(args.measure)
    cfg = _config(args, gamma.dim)
    _, sched, echo = _model_or_schedule(args, gamma.dim)
    runs = lx_refinement_run(gamma, sched, cfg)
    rep = RunReport([], _config_echo(cfg, args) | echo, [{"decomposition": r} for r in runs])
    _run_summary(rep, runs, args.threshold)
    return rep


def cmd_mfun(args):
    gamma = _curve(args.measure)
    cfg = _config(args, gamma.dim)
    R, _, echo = _model_or_schedule(args, gamma.dim)
    r = m_functional(gamma, R, cfg)
    return RunReport([], _config_echo(cfg, args) | echo, [{"functional": r}])


def cmd_mv_run(args):
    gamma = _curve(args.measure)
    cfg = _config(args, gamma.dim)
    _, sched, echo = _model_or_schedule(args, gamma.dim)
    runs = mv_refinement_run(gamma, sched, cfg)
    rep = RunReport([], _config_echo(cfg, args) | echo, [{"decomposition": r} for r in runs])
    _run_summary(rep, runs, args.threshold)
    return rep


def cmd_bigcurve(args):
    results = []
    for p in args.measure:
        g = _curve(p)
        results.append({"file": p, "big": is_big_curve(g)})
    return RunReport([], {}, results)


def cmd_corpus(args):
    try:
        spec = CorpusSpec(args.seed, args.dim, args.count, args.family)
    except ValueError as exc:
        raise InputError("--family", str(exc)) from None
    names = write(spec, args.out)
    return RunReport([], {"seed": args.seed, "spec": spec.__dict__}, [{"directory": args.out, "files": names}], {"count": len(names)})


def cmd_suite(args):
    battery = acceptance.Battery(seed=args.seed if args.seed is not None else 2024, scale=args.scale)
    which = args.criteria or sorted(acceptance.CRITERIA)
    results = []
    rep = RunReport([], {"seed": battery.seed, "scale": battery.scale})
    for k in which:
        if k not in acceptance.CRITERIA:
            raise InputError("--criteria", f"unknown criterion {k}")
        r = acceptance.run_criterion(k, battery)
        print(r.line(), file=sys.stderr)
        results.append({"criterion": k, "name": r.name, "pass": r.passed, "summary": r.summary, "seconds": r.seconds})
        rep.violations.extend({"criterion": k, **v} for v in r.violations)
    rep.results = results
    rep.summary = {"passed": sum(r["pass"] for r in results), "total": len(results)}
    return rep


# ----------------------------------------------------------------------
# parser


def _add_common(p):
    p.add_argument("--seed", type=int, default=None, help="seed for every random choice")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--config", help="JSON file overriding Config defaults")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers across independent instances")
    p.add_argument("--tol", type=float, default=None, help="float tolerance")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_model(p, threshold=False):
    p.add_argument("--model", help="Model JSON file")
    p.add_argument("--schedule", choices=("2k-gon", "grid3d-r"), help="named refinement schedule")
    p.add_argument("--levels", type=int, default=4, help="number of schedule levels")
    if threshold:
        p.add_argument("--threshold", type=float, default=None, help="required final relative Hausdorff distance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bdiv", description="Convex-geometry realization of nef b-divisor intersection theory.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        _add_common(p)
        p.set_defaults(func=fn)
        return p

    add("hull", cmd_hull, "convex hull of points").add_argument("--points", required=True)
    add("sum", cmd_sum, "Minkowski sum of two polytopes").add_argument("--bodies", nargs=2, required=True)
    add("volume", cmd_volume, "exact volume and degree").add_argument("--body", nargs="+", required=True)
    p = add("mixed-volume", cmd_mixed_volume, "mixed volume of d bodies")
    p.add_argument("--bodies", nargs="+", required=True)
    _add_model(p)
    add("surface-measure", cmd_surface_measure, "surface-area measure of a polytope").add_argument("--body", nargs="+", required=True)
    p = add("inradius", cmd_inradius, "largest s with s*inner + m inside outer")
    p.add_argument("--outer", required=True)
    p.add_argument("--inner", required=True)
    p = add("circumscribe", cmd_circumscribe, "circumscribe a body along a model")
    p.add_argument("--body", required=True)
    _add_model(p)
    add("envelope", cmd_envelope, "nef envelope of ray-value data").add_argument("--weil", required=True)
    add("psef", cmd_psef, "pseudo-effectivity certificate").add_argument("--divisor", required=True)
    add("norm-omega", cmd_norm_omega, "norm relative to the reference body").add_argument("--divisor", required=True)
    p = add("pair", cmd_pair, "divisor/curve pairing")
    p.add_argument("--divisor", required=True, help="polytope, oracle or divisor class JSON")
    p.add_argument("--measure", required=True)
    p = add("intersect", cmd_intersect, "intersection number d! * mixed volume")
    p.add_argument("--bodies", nargs="+", required=True)
    _add_model(p)
    p = add("approx", cmd_approx, "decreasing approximation with certificates")
    p.add_argument("--body", required=True)
    _add_model(p)
    p = add("sandwich", cmd_sandwich, "certified (1-eps) sandwich polytope")
    p.add_argument("--body", required=True)
    p.add_argument("--eps", required=True)
    for name, fn, help_ in (("diskant", cmd_diskant, "Diskant inequality check"), ("kt", cmd_kt, "Khovanskii-Teissier sequence"), ("siu", cmd_siu, "Siu ratio probe")):
        p = add(name, fn, help_)
        p.add_argument("--alpha", required=True)
        p.add_argument("--beta", required=True)
    p = add("cln", cmd_cln, "Chern-Levine-Nirenberg check")
    p.add_argument("--alphas", nargs="+", required=True)
    p.add_argument("--measure")
    p.add_argument("--bodies", nargs="*")
    p = add("solve", cmd_solve, "Minkowski problem solver")
    p.add_argument("--measure", nargs="+", required=True)
    p.add_argument("--random-start", action="store_true", help="start from a random ellipsoid drawn from --seed")
    p = add("volhat", cmd_volhat, "vol-hat functional")
    p.add_argument("--measure", required=True)
    p.add_argument("--candidates", nargs="*")
    for name, fn, help_, run in (
        ("lx", cmd_lx, "restricted decomposition on a model", False),
        ("lx-run", cmd_lx_run, "decompositions along a schedule", True),
        ("mfun", cmd_mfun, "envelope functional on a model", False),
        ("mv-run", cmd_mv_run, "envelope functional along a schedule", True),
    ):
        p = add(name, fn, help_)
        p.add_argument("--measure", required=True)
        _add_model(p, threshold=run)
    add("bigcurve", cmd_bigcurve, "bigness of curve classes").add_argument("--measure", nargs="+", required=True)
    p = add("corpus", cmd_corpus, "generate a deterministic polytope corpus")
    p.add_argument("--family", choices=FAMILIES, default="random-hull")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--out", required=True)
    p = add("suite", cmd_suite, "run the acceptance battery")
    p.add_argument("--criteria", type=int, nargs="*")
    p.add_argument("--scale", type=float, default=1.0, help="shrink instance counts (quick runs)")
    return parser


# ----------------------------------------------------------------------
# output


def _flatten(prefix: str, x, out: dict):
    if isinstance(x, dict):
        for k, v in x.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(x, list) and any(isinstance(v, (dict, list)) for v in x):
        out[prefix] = json.dumps(x)
    elif isinstance(x, list):
        out[prefix] = json.dumps(x)
    else:
        out[prefix] = x


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(report)
    rows = []
    for r in report.get("results", []):
        flat: dict = {}
        _flatten("", r, flat)
        rows.append(flat)
    cols: list = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (f"{v:.17g}" if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue().rstrip("\n")


def main(argv: list | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if args.command != "suite" and args.seed is None:
        args.seed = 0
    code = EXIT_OK
    report: RunReport | None = None
    error: dict | None = None
    try:
        report = args.func(args)
        if report.violations:
            code = EXIT_VIOLATION
    except InputError as exc:
        print(f"bdiv: input error at {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (UnbalancedError, EmptyPolytopeError, UnboundedError) as exc:
        print(f"bdiv: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Infeasible as exc:
        report, code = exc.result, EXIT_NOTBIG
        report.status = "infeasible"
    except NotBig as exc:
        code, error = EXIT_NOTBIG, {"error": "NotBig", "message": str(exc)}
    except NonConvergence as exc:
        code = EXIT_NONCONV
        error = {"error": "NonConvergence", "message": str(exc), "state": {k: v for k, v in exc.state.items() if k != "trace"}}
    if report is None:
        report = RunReport([], {"seed": args.seed}, status="failed")
        report.violations.append(error)
    report.command = ["bdiv"] + argv
    if code == EXIT_NOTBIG and report.status == "ok":
        report.status = "notbig"
    elif code == EXIT_NONCONV:
        report.status = "nonconvergence"
    print(render(report.as_json(), args.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
