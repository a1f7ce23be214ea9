"""The acceptance battery: eleven numbered criteria, each run at its stated tolerance.

Every criterion returns a CriterionResult whose ``violations`` list is empty
exactly when it passes.  Corpora are deterministic given the seed.
"""

from __future__ import annotations

import logging
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable

import numpy as np

from .convex_core.measure import surface_area_measure
from .convex_core.mixed import inclusion_radius, mixed_volume_polytopes
from .convex_core.oracle import disk
from .convex_core.polytope import Polytope
from .corpus import CorpusSpec, generate, instance_rng, random_hexagon, random_pair
from .intersect import diskant_check, kt_sequence, siu_ratio, top_degree
from .metrics import hausdorff_translated
from .minkowski.functionals import lx_refinement_run, mv_refinement_run, vol_hat
from .minkowski.solver import minkowski_solve
from .oracles import inclusion_radius_by_grid, mixed_volumes_by_expansion, triangulation_volume
from .schedules import gon_rays, gon_schedule, octagon
from .toric import Config, Model, circumscribe

logger = logging.getLogger(__name__)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    summary: dict
    violations: list = field(default_factory=list)
    seconds: float = 0.0

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        parts = ", ".join(f"{k}={_short(v)}" for k, v in self.summary.items())
        return f"{verdict} [{self.number:2d}] {self.name}: {parts}"


def _short(v):
    if isinstance(v, float):
        return f"{v:.3g}"
    if isinstance(v, Fraction):
        return str(v)
    return v


@dataclass
class Battery:
    """Shared corpora and cached solves; ``scale`` shrinks instance counts for quick runs."""

    seed: int = 2024
    scale: float = 1.0
    _cache: dict = field(default_factory=dict)

    def n(self, count: int) -> int:
        return max(1, int(round(count * self.scale)))

    def roundtrip_corpus(self) -> list[Polytope]:
        key = "rt"
        if key not in self._cache:
            self._cache[key] = generate(CorpusSpec(self.seed, 2, self.n(100))) + generate(CorpusSpec(self.seed + 1, 3, self.n(30)))
        return self._cache[key]

    def hexagons(self) -> list[Polytope]:
        if "hex" not in self._cache:
            self._cache["hex"] = [random_hexagon(instance_rng(self.seed + 7, i)) for i in range(self.n(5))]
        return self._cache["hex"]

    def pairs(self, d: int, count: int, tag: int, homothetic: bool = False):
        return [random_pair(instance_rng(self.seed * 31 + tag, i), d, homothetic) for i in range(self.n(count))]


# ----------------------------------------------------------------------


def c1_roundtrip(b: Battery) -> CriterionResult:
    t0 = time.perf_counter()
    worst_res = worst_haus = 0.0
    bad = []
    for i, Q in enumerate(b.roundtrip_corpus()):
        rep = minkowski_solve(surface_area_measure(Q))
        dist, _ = hausdorff_translated(rep.body, Q)
        rel = dist / Q.diameter()
        worst_res = max(worst_res, rep.residual)
        worst_haus = max(worst_haus, rel)
        if rep.residual > 1e-6 or rel > 1e-6:
            bad.append({"instance": i, "dim": Q.dim, "residual": rep.residual, "hausdorff": rel})
    secs = time.perf_counter() - t0
    if secs > 60 * b.scale + 1e-9 and b.scale >= 1:
        bad.append({"runtime_seconds": secs})
    summary = {"instances": len(b.roundtrip_corpus()), "max_residual": worst_res, "max_rel_hausdorff": worst_haus, "seconds": secs}
    return CriterionResult(1, "Minkowski round trip", not bad, summary, bad)


def c2_root_identity(b: Battery) -> CriterionResult:
    worst = 0.0
    bad = []
    for i, Q in enumerate(b.roundtrip_corpus()):
        deg = float(top_degree(Q))
        v = vol_hat(surface_area_measure(Q)).value
        rel = abs(v - deg) / deg
        worst = max(worst, rel)
        if rel > 1e-6:
            bad.append({"instance": i, "vol_hat": v, "degree": deg})
    return CriterionResult(2, "root identity vol_hat(S(Q)) = d! vol(Q)", not bad, {"instances": len(b.roundtrip_corpus()), "max_rel_error": worst}, bad)


def c3_diskant(b: Battery) -> CriterionResult:
    bad = []
    worst_slack = math.inf
    count = 0
    for d, n, tag in ((2, 1000, 1), (3, 200, 2)):
        for i, (alpha, beta) in enumerate(b.pairs(d, n, tag)):
            r = diskant_check(alpha, beta)
            count += 1
            scale = max(1.0, abs(r.lhs))
            worst_slack = min(worst_slack, r.slack_lower / scale)
            if r.slack_lower < -1e-9 * scale or not r.s_ge_tau:
                bad.append({"dim": d, "instance": i, "slack": r.slack, "s": float(r.s), "tau": r.tau})
    worst_eq = 0.0
    for d, n, tag in ((2, 25, 3), (3, 25, 4)):
        for i, (alpha, beta) in enumerate(b.pairs(d, n, tag, homothetic=True)):
            r = diskant_check(alpha, beta)
            count += 1
            scale = max(1.0, abs(r.lhs))
            worst_eq = max(worst_eq, abs(r.slack) / scale)
            if not r.equality or not r.s_ge_tau:
                bad.append({"dim": d, "homothetic": i, "slack": r.slack, "s": float(r.s), "tau": r.tau})
    summary = {"pairs": count, "min_rel_slack": worst_slack, "max_homothetic_gap": worst_eq}
    return CriterionResult(3, "Diskant inequality and s >= tau", not bad, summary, bad)


def c4_kt(b: Battery) -> CriterionResult:
    bad = []
    n_affine_random = 0
    for d, tag in ((2, 5), (3, 6)):
        for i, (alpha, beta) in enumerate(b.pairs(d, 250, tag)):
            s = kt_sequence(alpha, beta)
            if not s.logconcave:
                bad.append({"dim": d, "instance": i, "e": [str(x) for x in s.e]})
            if s.affine:
                n_affine_random += 1
                bad.append({"dim": d, "instance": i, "affine_on_generic_pair": True})
    n_control = 0
    for d, tag in ((2, 7), (3, 8)):
        for i, (alpha, beta) in enumerate(b.pairs(d, 25, tag, homothetic=True)):
            s = kt_sequence(alpha, beta)
            n_control += 1
            if not (s.logconcave and s.affine):
                bad.append({"dim": d, "control": i, "affine": s.affine})
    summary = {"pairs": 2 * b.n(250), "controls": n_control, "affine_false_positives": n_affine_random}
    return CriterionResult(4, "Khovanskii-Teissier log-concavity", not bad, summary, bad)


def c5_disk(b: Battery) -> CriterionResult:
    bad = []
    D = disk()
    square = Polytope.box([0, 0], [1, 1])
    prev_area = prev_mv = math.inf
    worst = 0.0
    n_last = 0
    mv_last = None
    for k in range(2, 13):
        n = 2**k
        K = circumscribe(D, Model(tuple(gon_rays(n))))
        area = float(K.volume)
        err = abs(area - n * math.tan(math.pi / n))
        worst = max(worst, err)
        if err > 1e-9 or not area < prev_area:
            bad.append({"n": n, "area": area, "error": err})
        mv = mixed_volume_polytopes([K, square])
        if mv > prev_mv:
            bad.append({"n": n, "mixed_volume_increase": float(mv)})
        prev_area, prev_mv = area, mv
        n_last, mv_last = n, mv
    if abs(float(mv_last) - 2) > 1e-6:
        bad.append({"n": n_last, "mixed_volume": float(mv_last)})
    summary = {"max_area_error": worst, "last_n": n_last, "V(n-gon, square)": float(mv_last)}
    return CriterionResult(5, "circumscribed polygons of the disk", not bad, summary, bad)


def _nonincreasing(xs, rel=1e-9) -> bool:
    return all(b <= a + rel * max(1.0, abs(a)) for a, b in zip(xs, xs[1:]))


def c6_lx(b: Battery) -> CriterionResult:
    bad = []
    g = surface_area_measure(octagon())
    runs = lx_refinement_run(g, gon_schedule(2, 7))
    vals = [r.value for r in runs]
    if not _nonincreasing(vals):
        bad.append({"octagon_values": vals})
    exact = max(r.hausdorff for r in runs[1:])
    if exact > 1e-9:
        bad.append({"octagon_hausdorff_k>=3": exact})
    ortho = max(r.residual for r in runs)
    worst_hex = 0.0
    for i, H in enumerate(b.hexagons()):
        hr = lx_refinement_run(surface_area_measure(H), gon_schedule(2, 13))
        final = hr[-1].relative_hausdorff
        worst_hex = max(worst_hex, final)
        if final > 1e-3 or not _nonincreasing([r.value for r in hr]):
            bad.append({"hexagon": i, "final_rel_hausdorff": final, "values": [r.value for r in hr]})
        ortho = max(ortho, max(r.residual for r in hr))
    if ortho > 1e-8:
        bad.append({"orthogonality_residual": ortho})
    summary = {"octagon_values": f"{vals[0]:.6g}->{vals[-1]:.10g}", "octagon_exact_hausdorff": exact, "hexagon_final_rel_hausdorff": worst_hex, "max_orthogonality": ortho}
    return CriterionResult(6, "LX refinement convergence", not bad, summary, bad)


def c7_mfun(b: Battery) -> CriterionResult:
    bad = []
    worst = 0.0
    targets = [("octagon", octagon(), gon_schedule(2, 7))] + [(f"hexagon{i}", H, gon_schedule(2, 13)) for i, H in enumerate(b.hexagons())]
    for name, T, sched in targets:
        g = surface_area_measure(T)
        vh = vol_hat(g).value
        runs = mv_refinement_run(g, sched)
        vals = [r.value for r in runs]
        gap = abs(vals[-1] - vh) / vh
        worst = max(worst, gap)
        if gap > 1e-3 or not _nonincreasing(vals) or min(vals) < vh * (1 - 1e-9):
            bad.append({"target": name, "gap": gap, "values": vals, "vol_hat": vh})
    return CriterionResult(7, "M functional convergence", not bad, {"targets": len(targets), "max_final_gap": worst}, bad)


def c8_inradius(b: Battery) -> CriterionResult:
    bad = []
    worst = 0.0
    for i, (K, L) in enumerate(b.pairs(2, 50, 9)):
        s, m = inclusion_radius(K, L)
        g = inclusion_radius_by_grid(K, L)
        err = abs(float(s) - g)
        worst = max(worst, err)
        if err > 1e-6:
            bad.append({"instance": i, "lp": float(s), "grid": g})
    return CriterionResult(8, "inclusion radius LP vs grid search", not bad, {"instances": b.n(50), "max_abs_error": worst}, bad)


def c9_siu(b: Battery) -> CriterionResult:
    bad = []
    worst = 0.0
    for d, tag in ((2, 10), (3, 11)):
        cfg = Config(d)
        for i, (alpha, beta) in enumerate(b.pairs(d, 250, tag)):
            r = siu_ratio(alpha, beta, cfg)
            worst = max(worst, float(r.ratio / r.bound))
            if not r.holds:
                bad.append({"dim": d, "instance": i, "R": str(r.ratio), "bound": str(r.bound)})
    return CriterionResult(9, "Siu probe with C_d = d", not bad, {"pairs": 2 * b.n(250), "max_R_over_bound": worst}, bad)


def c10_exact(b: Battery) -> CriterionResult:
    bad = []
    polys = generate(CorpusSpec(b.seed + 3, 2, b.n(50))) + generate(CorpusSpec(b.seed + 4, 3, b.n(50)))
    for i, P in enumerate(polys):
        if triangulation_volume(P) != P.volume:
            bad.append({"instance": i, "volume": str(P.volume)})
    rng = instance_rng(b.seed + 5, 0)
    n_mixed = 0
    for i in range(b.n(100)):
        d = 2 if i % 2 == 0 else 3
        K, L = random_pair(rng, d)
        ref = mixed_volumes_by_expansion(K, L)
        for k in range(1, d):
            n_mixed += 1
            if mixed_volume_polytopes([K] * k + [L] * (d - k)) != ref[k]:
                bad.append({"pair": i, "k": k})
    n_bal = 0
    for P in polys + b.roundtrip_corpus():
        n_bal += 1
        if any(surface_area_measure(P).balance()):
            bad.append({"unbalanced": repr(P)})
    summary = {"volumes": len(polys), "mixed_volumes": n_mixed, "balance_checks": n_bal}
    return CriterionResult(10, "exact volumes, mixed volumes, balance", not bad, summary, bad)


def c11_uniqueness(b: Battery) -> CriterionResult:
    bad = []
    worst = 0.0
    targets = b.roundtrip_corpus()
    picks = [targets[i] for i in range(0, len(targets), max(1, len(targets) // b.n(20)))][: b.n(20)]
    for i, Q in enumerate(picks):
        g = surface_area_measure(Q)
        rng = np.random.default_rng(b.seed * 97 + i)
        bodies = [minkowski_solve(g, start=rng).body for _ in range(3)]
        for P1, P2 in combinations(bodies, 2):
            rel = hausdorff_translated(P1, P2)[0] / Q.diameter()
            worst = max(worst, rel)
            if rel > 1e-6:
                bad.append({"target": i, "rel_hausdorff": rel})
    return CriterionResult(11, "solver uniqueness from random starts", not bad, {"targets": len(picks), "max_rel_hausdorff": worst}, bad)


CRITERIA: dict[int, Callable[[Battery], CriterionResult]] = {
    1: c1_roundtrip,
    2: c2_root_identity,
    3: c3_diskant,
    4: c4_kt,
    5: c5_disk,
    6: c6_lx,
    7: c7_mfun,
    8: c8_inradius,
    9: c9_siu,
    10: c10_exact,
    11: c11_uniqueness,
}


def run_criterion(number: int, battery: Battery) -> CriterionResult:
    t0 = time.perf_counter()
    res = CRITERIA[number](battery)
    res.seconds = time.perf_counter() - t0
    return res


def run_all(battery: Battery | None = None, which=None) -> list[CriterionResult]:
    battery = battery or Battery()
    return [run_criterion(k, battery) for k in (which or sorted(CRITERIA))]
