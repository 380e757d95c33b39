"""Verification pipelines built on the construction and the matching solver.

Every run returns an :class:`ExperimentReport` whose verdict flags are
plain functions of the numbers stored in its tables, so a report can be
re-checked from its JSON dump alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .construction import ConstructionConfig, build, level_slice
from .disk import Arc, chord_lengths, segment_area, trapezoid_h_values
from .norms import (
    Combination,
    LpNorm,
    Scaled,
    circle_profile_curvature,
    circle_profile_derivative,
    format_norm,
    lp,
    rescale_to_match,
)
from .solver import TraceDatum, objective, region_labels, solve_dp

MAX_SOLVE_LEVEL = 8
WINDOW_PAD = math.radians(1.0)
DERIVATIVE_FLOOR = 1e-8
DECAY_FACTOR = 10.0


@dataclass
class ExperimentReport:
    name: str
    inputs: dict
    tables: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    margins: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        """False when any recorded verdict is False or inconclusive (None)."""
        return all(v is True for v in self.verdicts.values())

    def to_dict(self):
        return {
            "name": self.name,
            "inputs": self.inputs,
            "tables": self.tables,
            "verdicts": self.verdicts,
            "margins": self.margins,
            "notes": self.notes,
        }


# --- closed-form square comparison -----------------------------------------


def square_example(a=0.5, b=0.4, exponents=(2.0, 3.0)):
    """Two competitors on the unit square for data supported on two corner arcs.

    E1 uses the slanted chords ``(0, a)-(b, 0)`` and ``(1-b, 0)-(1, a)``;
    E2 uses the horizontal chords ``(0, a)-(1, a)`` and ``(b, 0)-(1-b, 0)``
    and violates the trace condition, so a solution exists only when E1 wins.
    """
    if not (0.0 < a < 1.0):
        raise ValueError(f"a must lie in (0, 1), got {a!r}")
    if not (0.0 < b < 0.5):
        raise ValueError(f"b must lie in (0, 1/2), got {b!r}")
    rows = []
    for p in exponents:
        norm = lp(p)
        e1 = norm((b, -a)) + norm((b, a))
        e2 = norm((1.0, 0.0)) + norm((1.0 - 2.0 * b, 0.0))
        winner = "E1" if e1 <= e2 else "E2"
        rows.append(
            {"p": float(p), "value_e1": e1, "value_e2": e2, "winner": winner, "solution_exists": winner == "E1"}
        )
    return ExperimentReport(
        name="square-example",
        inputs={"a": a, "b": b, "exponents": [float(p) for p in exponents]},
        tables={"square": rows},
        margins={"min_abs_difference": min(abs(r["value_e1"] - r["value_e2"]) for r in rows)},
    )


# --- helpers ---------------------------------------------------------------


def _wrap_half_pi(x):
    """Reduce an unoriented direction difference to ``[-pi/2, pi/2)``."""
    return np.mod(x + 0.5 * np.pi, np.pi) - 0.5 * np.pi


def direction_window(c, pad=WINDOW_PAD):
    """Interval of chord directions swept by the construction, widened by ``pad``."""
    dirs = c.chord_directions()
    ref = float(dirs[0])
    off = _wrap_half_pi(dirs - ref)
    return ref + float(off.min()) - pad, ref + float(off.max()) + pad


def level_datum(c, n):
    return TraceDatum.from_angles(c.transition_angles(n))


def en_areas(c):
    """Area of E_n for every level (sum of caps under the level-n chords)."""
    out = []
    for n in range(c.depth + 1):
        w = c.width[level_slice(n)]
        out.append(float(np.sum(0.5 * (w - np.sin(w)))))
    return out


def eprime_areas(c):
    """Area of E'_n for every level: the root cap minus all removed gap caps above level n."""
    out = [segment_area(c.config.alpha0)]
    for n in range(c.depth):
        s = level_slice(n)
        g = c.width[s] - 2.0 * c.alpha[s]
        out.append(out[-1] - float(np.sum(0.5 * (g - np.sin(g)))))
    return out


def isotropic_measure_bound(alpha0, n):
    """Lower bound ``alpha0 / prod_{k<=n} (1 + alpha0^2 / (3 * 4^k))`` for Euclidean equality constructions."""
    prod = 1.0
    for k in range(1, n + 1):
        prod *= 1.0 + alpha0**2 / (3.0 * 4.0**k)
    return alpha0 / prod


def general_measure_bound(alpha0, n):
    prod = 1.0
    for k in range(1, n + 1):
        prod *= 1.0 + 0.5**k
    return alpha0 / prod


def _is_euclidean(norm):
    atoms = list(norm.atoms())
    return all(a.p == 2.0 for _, a in atoms)


def in_open_first_quadrant(c):
    start = float(c.start[0])
    end = start + float(c.width[0])
    return 0.0 < start and end < 0.5 * math.pi


# --- cross-norm certification ----------------------------------------------


def derivative_scan(phi1, phi2, window, samples=257):
    """Profile derivative and curvature gaps of ``phi2 - phi1`` across ``window``.

    ``phi2`` must already be rescaled to match ``phi1``. The derivative gap
    is the quantity the existence argument compares; the relative curvature
    gap ``phi1''/phi1 - phi2''/phi2`` is what fixes the sign of
    ``h_phi2`` on an equality construction for ``phi1`` at small scales.
    """
    nu = np.linspace(window[0], window[1], samples)
    d_gap = np.array([circle_profile_derivative(phi2, t) - circle_profile_derivative(phi1, t) for t in nu])
    k_gap = np.array([circle_profile_curvature(phi1, t) - circle_profile_curvature(phi2, t) for t in nu])
    deriv_ok = bool((d_gap > DERIVATIVE_FLOOR).all() or (d_gap < -DERIVATIVE_FLOOR).all())
    if (k_gap > 0).all():
        orientation = "as-given"
    elif (k_gap < 0).all():
        orientation = "swapped"
    else:
        orientation = "mixed"
    return {
        "window": [float(window[0]), float(window[1])],
        "derivative_gap_min": float(d_gap.min()),
        "derivative_gap_max": float(d_gap.max()),
        "derivative_gap_constant_sign": deriv_ok,
        "curvature_gap_min": float(k_gap.min()),
        "curvature_gap_max": float(k_gap.max()),
        "orientation": orientation,
    }


def _solve_rows(c, norm, levels, tie_tol):
    rows = []
    for n in range(levels + 1):
        datum = level_datum(c, n)
        rep = solve_dp(norm, datum, tie_tol=tie_tol)
        e_val = objective(norm, c.en_pairs(n), datum)
        ep_val = objective(norm, c.eprime_pairs(n), datum) if n else e_val
        rows.append(
            {
                "level": n,
                "m": datum.m,
                "optimal_value": rep.optimal_value,
                "uniqueness_gap": rep.uniqueness_gap,
                "n_ties": rep.n_ties,
                "ties_truncated": rep.ties_truncated,
                "optimal_is_en": tuple(rep.optimal.pairs) == tuple(sorted(c.en_pairs(n))),
                "value_en": e_val,
                "value_eprime": ep_val,
                "area_in": region_labels(rep.optimal.pairs, datum).area_in,
            }
        )
    return rows


def cross_norm_run(phi1, phi2, theta_center, alpha0, depth, tol=1e-12, tie_tol=1e-9, solve_levels=MAX_SOLVE_LEVEL):
    """Build an equality construction for ``phi1`` and test the sign of ``h`` under ``phi2``."""
    c = build(ConstructionConfig(phi1, alpha0, theta_center, depth, "equality", tol=tol))
    root_dir = float(c.chord_directions()[0])
    scale = rescale_to_match(phi1, phi2, root_dir)
    phi2r = Scaled(scale, phi2)
    scan = derivative_scan(phi1, phi2r, direction_window(c))
    h1 = c.h_values(phi1)
    h2 = c.h_values(phi2r)
    rows = [
        {"node": i, "level": (i + 1).bit_length() - 1, "h_phi1": float(a), "h_phi2": float(b)}
        for i, (a, b) in enumerate(zip(h1, h2))
    ]
    levels = min(depth, solve_levels)
    min_h2 = float(h2.min()) if len(h2) else math.nan
    report = ExperimentReport(
        name="cross-norm",
        inputs={
            "phi1": format_norm(phi1),
            "phi2": format_norm(phi2),
            "theta_center": c.config.theta_center,
            "alpha0": alpha0,
            "depth": depth,
            "tol": tol,
            "tie_tol": tie_tol,
        },
        tables={
            "nodes": rows,
            "solve_phi1": _solve_rows(c, phi1, levels, tie_tol),
            "solve_phi2": _solve_rows(c, phi2r, levels, tie_tol),
        },
        margins={
            "rescale_factor": scale,
            "root_direction": root_dir,
            "max_abs_h_phi1": float(np.abs(h1).max()) if len(h1) else 0.0,
            "min_h_phi2": min_h2,
            "n_nonpositive_phi2": int(np.count_nonzero(h2 <= 0)),
            **{f"scan_{k}": v for k, v in scan.items()},
        },
    )
    if not scan["derivative_gap_constant_sign"]:
        report.verdicts["sign_certified"] = None
        report.notes.append("precondition scan failed: derivative gap is not bounded away from zero with constant sign")
    else:
        report.verdicts["sign_certified"] = bool(min_h2 > 0)
    return report, c


def g_scan(phi1, phi2, parent, grid=64):
    """``g(alpha) = h_phi1(alpha) - h_phi2(alpha)`` on a uniform grid of ``(0, w/2)``.

    ``phi2`` is rescaled to agree with ``phi1`` along the parent chord.
    ``dg`` is a centered finite difference with step one eighth of the grid spacing.
    """
    direction = parent.center + 0.5 * math.pi
    phi2r = Scaled(rescale_to_match(phi1, phi2, direction), phi2)
    spacing = 0.5 * parent.width / (grid + 1)
    alpha = spacing * np.arange(1, grid + 1)
    step = spacing / 8.0

    def g(a):
        return trapezoid_h_values(phi1, parent.start, parent.width, a) - trapezoid_h_values(
            phi2r, parent.start, parent.width, a
        )

    values = g(alpha)
    deriv = (g(alpha + step) - g(alpha - step)) / (2.0 * step)
    rows = [{"alpha": float(a), "g": float(v), "dg": float(d)} for a, v, d in zip(alpha, values, deriv)]
    neg = deriv < 0
    first_nonneg = int(np.argmin(neg)) if not neg.all() else None
    return ExperimentReport(
        name="g-scan",
        inputs={
            "phi1": format_norm(phi1),
            "phi2": format_norm(phi2),
            "parent_start": parent.start,
            "parent_width": parent.width,
            "grid": grid,
        },
        tables={"g": rows},
        verdicts={"derivative_negative": bool(neg.all())},
        margins={
            "max_g": float(values.max()),
            "min_g": float(values.min()),
            "max_dg": float(deriv.max()),
            "n_negative_dg": int(neg.sum()),
            "first_nonnegative_alpha_fraction": None if first_nonneg is None else float(alpha[first_nonneg] / parent.width),
        },
    )


# --- perturbation and l1 ---------------------------------------------------


def perturbation_run(phi1, k, theta_center, alpha0, depth, tol=1e-12):
    """Equality construction for ``phi1`` checked against ``phi1 + (1/k) l1``."""
    if not (isinstance(k, (int, np.integer)) and k >= 1):
        raise ValueError(f"k must be a positive integer, got {k!r}")
    c = build(ConstructionConfig(phi1, alpha0, theta_center, depth, "equality", tol=tol))
    if not in_open_first_quadrant(c):
        raise ValueError("the construction must lie in the open first quadrant")
    l1 = LpNorm(1.0)
    phi2 = Combination(((1.0, phi1), (1.0 / k, l1)))
    h1 = c.h_values(phi1)
    hl1 = c.h_values(l1)
    h2 = c.h_values(phi2)
    s = c.internal
    prime_l1 = chord_lengths(l1, c.start[s] + 0.5 * c.width[s], c.width[s] - 2.0 * c.alpha[s])
    lin = np.abs(h2 - h1 - hl1 / k)
    ident = np.abs(hl1 - 2.0 * prime_l1)
    rows = [
        {"node": i, "h_phi1": float(a), "h_l1": float(b), "h_phi2": float(d), "l1_prime": float(e)}
        for i, (a, b, d, e) in enumerate(zip(h1, hl1, h2, prime_l1))
    ]
    lin_max = float(lin.max()) if len(lin) else 0.0
    ident_max = float(ident.max()) if len(ident) else 0.0
    min_h2 = float(h2.min()) if len(h2) else math.nan
    return ExperimentReport(
        name="perturbation",
        inputs={"phi1": format_norm(phi1), "k": int(k), "theta_center": c.config.theta_center, "alpha0": alpha0, "depth": depth},
        tables={"nodes": rows},
        verdicts={"sign_certified": bool(lin_max <= 1e-12 and ident_max <= 1e-12 and min_h2 > 0)},
        margins={
            "linearity_residual": lin_max,
            "l1_identity_residual": ident_max,
            "min_h_phi2": min_h2,
            "sup_profile_distance": math.sqrt(2.0) / k,
        },
    ), c


def l1_quadrant_run(c):
    """Signs of ``h_l1`` on a first-quadrant construction, with the decay of ``area(E_n)``."""
    if not in_open_first_quadrant(c):
        raise ValueError("the construction must lie in the open first quadrant")
    l1 = LpNorm(1.0)
    hl1 = c.h_values(l1)
    areas = en_areas(c)
    ratio = areas[-1] / areas[0]
    threshold = DECAY_FACTOR * 4.0 ** (-c.depth)
    min_h = float(hl1.min()) if len(hl1) else math.inf
    return ExperimentReport(
        name="l1-quadrant",
        inputs={"construction": format_norm(c.config.norm), "alpha0": c.config.alpha0, "theta_center": c.config.theta_center, "depth": c.depth},
        tables={
            "nodes": [{"node": i, "h_l1": float(v)} for i, v in enumerate(hl1)],
            "levels": [{"level": n, "area_en": a} for n, a in enumerate(areas)],
        },
        verdicts={"nonexistence_indicated": bool(min_h > 0 and ratio <= threshold)},
        margins={"min_h_l1": min_h, "area_ratio": ratio, "area_threshold": threshold},
    )


# --- existence / nonexistence indicators ------------------------------------


def nonexistence_run(c, norm, tie_tol=1e-9, max_level=MAX_SOLVE_LEVEL):
    """Strict-regime indicator: unique optimum E_n at every solved level and decaying area."""
    levels = min(c.depth, max_level)
    solve_rows = _solve_rows(c, norm, levels, tie_tol)
    areas = en_areas(c)
    for row in solve_rows:
        row["area_en_closed_form"] = areas[row["level"]]
    unique_ok = all(r["optimal_is_en"] and r["uniqueness_gap"] > tie_tol for r in solve_rows)
    decreasing = all(b < a for a, b in zip(areas, areas[1:]))
    ratio = areas[-1] / areas[0]
    threshold = DECAY_FACTOR * 4.0 ** (-c.depth)
    report = ExperimentReport(
        name="nonexistence",
        inputs={"construction": _config_echo(c), "norm": format_norm(norm), "tie_tol": tie_tol},
        tables={"solve": solve_rows, "levels": [{"level": n, "area_en": a} for n, a in enumerate(areas)]},
        margins={
            "min_uniqueness_gap": min(r["uniqueness_gap"] for r in solve_rows),
            "area_ratio": ratio,
            "area_threshold": threshold,
            "solved_levels": levels,
        },
    )
    if not unique_ok:
        report.verdicts["nonexistence_indicated"] = None
        report.notes.append("some level has no unique E_n optimum beyond tie_tol; inconclusive")
    else:
        report.verdicts["nonexistence_indicated"] = bool(decreasing and ratio <= threshold)
    return report


def existence_run(c, norm, tie_tol=1e-9, agree_tol=1e-10, max_level=MAX_SOLVE_LEVEL):
    """Equality-regime indicator: E_n and E'_n tie, E'_n keeps positive area, F_n keeps measure."""
    levels = min(c.depth, max_level)
    solve_rows = _solve_rows(c, norm, levels, tie_tol)
    areas_p = eprime_areas(c)
    for row in solve_rows:
        n = row["level"]
        row["value_gap"] = abs(row["value_en"] - row["value_eprime"])
        row["agree"] = row["value_gap"] <= max(n, 1) * agree_tol
        row["both_optimal"] = max(row["value_en"], row["value_eprime"]) <= row["optimal_value"] + tie_tol
        if n:
            datum = level_datum(c, n)
            row["area_eprime"] = region_labels(c.eprime_pairs(n), datum).area_in
        else:
            row["area_eprime"] = areas_p[0]
    measures = [c.measure(n) for n in range(c.depth + 1)]
    if _is_euclidean(norm):
        bounds = [isotropic_measure_bound(c.config.alpha0, n) for n in range(c.depth + 1)]
        bound_kind = "isotropic"
    else:
        bounds = [general_measure_bound(c.config.alpha0, n) for n in range(c.depth + 1)]
        bound_kind = "general"
    # every future gap lies inside a level-depth arc, and a cap of width g has area <= g^3 / 12
    w_max = float(c.width[level_slice(c.depth)].max())
    tail = measures[-1] * w_max**2 / 12.0
    limit_lower = areas_p[-1] - tail
    nonincreasing = all(b <= a for a, b in zip(areas_p, areas_p[1:]))
    measure_ok = all(m >= b for m, b in zip(measures, bounds))
    ties_ok = all(r["agree"] and r["both_optimal"] for r in solve_rows)
    return ExperimentReport(
        name="existence",
        inputs={"construction": _config_echo(c), "norm": format_norm(norm), "tie_tol": tie_tol, "agree_tol": agree_tol},
        tables={
            "solve": solve_rows,
            "levels": [
                {"level": n, "measure": m, "measure_bound": b, "area_eprime": a}
                for n, (m, b, a) in enumerate(zip(measures, bounds, areas_p))
            ],
        },
        verdicts={"existence_indicated": bool(ties_ok and nonincreasing and limit_lower > 0 and measure_ok)},
        margins={
            "max_value_gap": max(r["value_gap"] for r in solve_rows),
            "area_eprime_limit_lower": limit_lower,
            "measure_bound_kind": bound_kind,
            "min_measure_slack": min(m - b for m, b in zip(measures, bounds)),
            "solved_levels": levels,
        },
    )


def _config_echo(c):
    cfg = c.config
    out = {
        "norm": format_norm(cfg.norm),
        "alpha0": cfg.alpha0,
        "theta_center": cfg.theta_center,
        "depth": cfg.depth,
        "mode": cfg.mode,
        "tol": cfg.tol,
    }
    if cfg.rho is not None:
        out["rho"] = cfg.rho
    return out


def parent_arc(c, i=0):
    return Arc(float(c.start[i]), float(c.width[i]))
