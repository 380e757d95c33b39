"""Exit criteria of the package, runnable from the CLI (``verify``) and pytest.

Each check returns a :class:`CriterionResult`; runtimes are part of the
pass condition where a budget is stated.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .construction import ConstructionConfig, build, solve_equal_angle
from .disk import Arc
from .experiments import (
    cross_norm_run,
    en_areas,
    g_scan,
    nonexistence_run,
    parent_arc,
    perturbation_run,
    square_example,
)
from .instances import oracle_instances
from .norms import Combination, Scaled, lp
from .solver import (
    TraceDatum,
    brute_force,
    enumerate_noncrossing,
    objective,
    region_labels,
    solve_dp,
)

CROSS_THETA = math.radians(-60.0)  # chord directions around 30 degrees
QUADRANT_THETA = math.radians(45.0)


@dataclass
class CriterionResult:
    key: str
    title: str
    passed: bool
    detail: str
    seconds: float

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag} [{self.key}] {self.title} ({self.seconds:.2f} s): {self.detail}"


def _timed(fn):
    t0 = time.perf_counter()
    ok, detail = fn()
    return ok, detail, time.perf_counter() - t0


def criterion_1():
    def run():
        rows = {r["p"]: r for r in square_example(0.5, 0.4, (2.0, 3.0)).tables["square"]}
        r2, r3 = rows[2.0], rows[3.0]
        ok = (
            abs(r2["value_e1"] - 2.0 * math.sqrt(0.41)) <= 1e-9
            and abs(r2["value_e2"] - 1.2) <= 1e-9
            and r2["winner"] == "E2"
            and not r2["solution_exists"]
            and abs(r3["value_e1"] - 1.147758) <= 1e-6
            and abs(r3["value_e2"] - 1.2) <= 1e-9
            and r3["winner"] == "E1"
            and r3["solution_exists"]
        )
        return ok, f"p=2 ({r2['value_e1']:.9f}, {r2['value_e2']:.9f}) {r2['winner']}; p=3 ({r3['value_e1']:.9f}, {r3['value_e2']:.9f}) {r3['winner']}"

    ok, detail, sec = _timed(run)
    return CriterionResult("1", "square example", ok and sec < 1.0, detail, sec)


def criterion_2():
    def run():
        c = build(ConstructionConfig(lp(2), 0.1, 1.0, 16, "equality"))
        resid = float(np.nanmax(np.abs(c.h)))
        meas = c.measure(16)
        r = c.ratios()
        child = c.alpha[c.internal]
        r_ok = bool((r <= (2.0 / 3.0) * child**2).all())
        ok = resid <= 1e-10 and 0.099889 <= meas <= 0.1 and r_ok
        return ok, f"max|h|={resid:.2e}, H1(F16)={meas:.9f}, max r/alpha^2={float((r / child**2).max()):.4f}"

    ok, detail, sec = _timed(run)
    return CriterionResult("2", "equality construction l2 depth 16", ok and sec < 10.0, detail, sec)


def isotropic_root_oracle(width):
    """Root of the closed-form Euclidean trapezoid value (independent of the package geometry)."""

    def h(a):
        return 2 * math.sin(width / 2) + 2 * math.sin(width / 2 - a) - 4 * math.sin(a / 2)

    return brentq(h, 1e-9 * width, 0.5 * width * (1 - 1e-15), xtol=1e-16, rtol=1e-15)


def criterion_3():
    def run():
        parent = Arc(0.7, 1.0)
        a = solve_equal_angle(lp(2), parent)
        oracle = isotropic_root_oracle(1.0)
        scaled = [solve_equal_angle(Scaled(s, lp(2)), parent) for s in (0.5, 2.0, 10.0)]
        ok = abs(a - 0.4922) <= 1e-3 and abs(a - oracle) <= 1e-12 and all(abs(x - a) <= 1e-12 for x in scaled)
        return ok, f"alpha*={a:.12f}, oracle={oracle:.12f}, scaled spread={max(abs(x - a) for x in scaled):.1e}"

    ok, detail, sec = _timed(run)
    return CriterionResult("3", "equality root solve l2", ok and sec < 0.1, detail, sec)


def criterion_4a():
    def run():
        report, c = cross_norm_run(lp(3), lp(2), CROSS_THETA, 0.05, 12, solve_levels=0)
        dirs = np.degrees(c.chord_directions())
        in_window = bool(((dirs > 5.0) & (dirs < 40.0)).all())
        min_h = report.margins["min_h_phi2"]
        n_int = len(report.tables["nodes"])
        ok = in_window and min_h > 0 and report.verdicts["sign_certified"] is True and n_int == 2**12 - 1
        return ok, f"directions in [{dirs.min():.2f}, {dirs.max():.2f}] deg, min h_l2={min_h:.3e} over {n_int} internal nodes"

    ok, detail, sec = _timed(run)
    return CriterionResult("4a", "cross-norm sign certification l3 -> l2", ok and sec < 30.0, detail, sec)


def criterion_4b():
    def run():
        c = build(ConstructionConfig(lp(3), 0.05, CROSS_THETA, 0, "equality"))
        g = g_scan(lp(3), lp(2), parent_arc(c), grid=64)
        m = g.margins
        return g.verdicts["derivative_negative"], (
            f"{m['n_negative_dg']}/64 grid points with g'<0, first g'>=0 at alpha/w={m['first_nonnegative_alpha_fraction']}, "
            f"max g={m['max_g']:.3e}"
        )

    ok, detail, sec = _timed(run)
    return CriterionResult("4b", "g-scan derivative negative on the root trapezoid", ok and sec < 30.0, detail, sec)


def criterion_5():
    def run():
        counts = [len(enumerate_noncrossing(m)) for m in (2, 3, 4)]
        worst, mismatches, checked = 0.0, 0, 0
        for norm, angles in oracle_instances(100, 6):
            datum = TraceDatum.from_angles(angles)
            rep = solve_dp(norm, datum)
            bf = brute_force(norm, datum)
            worst = max(worst, abs(rep.optimal_value - bf[0].objective))
            if rep.uniqueness_gap > 1e-9:
                checked += 1
                mismatches += rep.optimal.pairs != bf[0].pairs
        ok = counts == [2, 5, 14] and worst <= 1e-12 and mismatches == 0
        return ok, f"Catalan {counts}, max |dp - brute|={worst:.1e}, {checked} gapped instances, {mismatches} mismatches"

    ok, detail, sec = _timed(run)
    return CriterionResult("5", "solver oracle equivalence", ok and sec < 5.0, detail, sec)


def criterion_6():
    def run():
        eq = build(ConstructionConfig(lp(2), 0.1, 1.0, 6, "equality"))
        st = build(ConstructionConfig(lp(2), 0.1, 1.0, 6, "equality_fraction", rho=0.8))
        worst_tie, eq_ok, st_ok, min_gap = 0.0, True, True, math.inf
        for n in range(0, 7):
            d = TraceDatum.from_angles(eq.transition_angles(n))
            rep = solve_dp(lp(2), d, tie_tol=1e-9)
            e = objective(lp(2), eq.en_pairs(n), d)
            ep = objective(lp(2), eq.eprime_pairs(n), d) if n else e
            worst_tie = max(worst_tie, abs(e - ep))
            eq_ok &= abs(e - ep) <= max(n, 1) * 1e-10 and max(e, ep) <= rep.optimal_value + 1e-9
            d = TraceDatum.from_angles(st.transition_angles(n))
            rep = solve_dp(lp(2), d, tie_tol=1e-9)
            st_ok &= rep.optimal.pairs == tuple(sorted(st.en_pairs(n))) and rep.uniqueness_gap > 0 and rep.n_ties == 1
            min_gap = min(min_gap, rep.uniqueness_gap)
        return eq_ok and st_ok, f"max |E_n - E'_n|={worst_tie:.1e}, strict min gap={min_gap:.3e}"

    ok, detail, sec = _timed(run)
    return CriterionResult("6", "tie vs uniqueness regimes", ok and sec < 10.0, detail, sec)


def criterion_7():
    def run():
        c = build(ConstructionConfig(lp(2), 0.1, 1.0, 10, "equality_fraction", rho=0.8))
        areas = en_areas(c)
        dec = all(b < a for a, b in zip(areas, areas[1:]))
        ratio = areas[-1] / areas[0]
        rep = nonexistence_run(c, lp(2))
        ok = dec and ratio <= 10.0 * 4.0**-10 and rep.verdicts["nonexistence_indicated"] is True
        return ok, f"area(E10)/area(E0)={ratio:.3e} (threshold {10 * 4.0**-10:.3e})"

    ok, detail, sec = _timed(run)
    return CriterionResult("7", "nonexistence indicator decay", ok and sec < 5.0, detail, sec)


def criterion_8():
    def run():
        rep, _ = perturbation_run(lp(2), 10, QUADRANT_THETA, 0.05, 12)
        m = rep.margins
        ok = m["linearity_residual"] <= 1e-12 and m["l1_identity_residual"] <= 1e-12 and m["min_h_phi2"] > 0
        return ok, f"linearity {m['linearity_residual']:.1e}, l1 identity {m['l1_identity_residual']:.1e}, min h={m['min_h_phi2']:.3e}"

    ok, detail, sec = _timed(run)
    return CriterionResult("8", "perturbation by an l1 term", ok and sec < 5.0, detail, sec)


def invariant_checks():
    """Named boolean checks for the invariant suite."""
    out = {}
    t = np.linspace(0.0, 2 * np.pi, 101)[:-1]
    v = np.stack([np.cos(3 * t) * (1 + t), np.sin(2 * t) - 0.5], axis=-1)
    scales = 0.1 + 3.0 * (np.arange(100) % 17) / 17.0
    norms = [lp(1), lp(2), lp(3), lp(1.5), Combination(((1.0, lp(2)), (0.1, lp(1))))]
    out["homogeneity"] = all(
        np.all(np.abs(n(scales[:, None] * v) - scales * n(v)) <= 1e-12 * n(scales[:, None] * v)) for n in norms
    )
    combo = Combination(((0.7, lp(2)), (0.3, lp(3)), (0.2, lp(1))))
    direct = 0.7 * lp(2)(v) + 0.3 * lp(3)(v) + 0.2 * lp(1)(v)
    out["combination_linearity"] = bool(np.all(np.abs(combo(v) - direct) <= 1e-15 * direct))

    c = build(ConstructionConfig(lp(3), 0.2, 0.4, 5, "equality"))
    h_combo = c.h_values(combo)
    h_parts = 0.7 * c.h_values(lp(2)) + 0.3 * c.h_values(lp(3)) + 0.2 * c.h_values(lp(1))
    out["h_linearity"] = bool(np.all(np.abs(h_combo - h_parts) <= 1e-12))
    signs = []
    for k in (0.5, 2.0, 10.0):
        hk = c.h_values(Scaled(k, lp(2)))
        signs.append(np.all(np.abs(hk - k * c.h_values(lp(2))) <= 1e-12) and np.array_equal(np.sign(hk), np.sign(c.h_values(lp(2)))))
    out["scaling_sign_invariance"] = bool(all(signs))

    consistent, partition = True, 0.0
    for norm, angles in oracle_instances(40, 5, seed=7):
        d = TraceDatum.from_angles(angles)
        for pairs in enumerate_noncrossing(d.m):
            reg = region_labels(pairs, d)
            consistent &= reg.consistent
            partition = max(partition, abs(reg.area_in + reg.area_out - math.pi))
    out["region_label_consistency"] = bool(consistent)
    out["disk_area_partition"] = partition <= 1e-9
    return out


def criterion_9():
    def run():
        checks = invariant_checks()
        failed = [k for k, v in checks.items() if not v]
        return not failed, "all green" if not failed else "failed: " + ", ".join(failed)

    ok, detail, sec = _timed(run)
    return CriterionResult("9", "invariant suite", ok, detail, sec)


CRITERIA = (
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4a,
    criterion_4b,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
)


def run_all(echo=print, criteria=None):
    results = []
    for fn in criteria or CRITERIA:
        res = fn()
        if echo:
            echo(res.line())
        results.append(res)
    return results
