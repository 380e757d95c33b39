import math

import numpy as np
import pytest

from aniso_trace.construction import (
    ConstructionConfig,
    ConstructionError,
    build,
    level_slice,
    node_path,
    path_index,
    solve_equal_angle,
)
from aniso_trace.disk import Arc, trapezoid_h
from aniso_trace.norms import Scaled, lp, parse_norm


def iso_h(wbar, a):
    return 2 * math.sin(wbar / 2) + 2 * math.sin(wbar / 2 - a) - 4 * math.sin(a / 2)


def test_root_examples():
    a = solve_equal_angle(lp(2), Arc(0.3, 1.0))
    assert a == pytest.approx(0.4922, abs=1e-3)
    assert abs(iso_h(1.0, a)) < 1e-14
    for c in (0.5, 2.0, 10.0):
        assert abs(solve_equal_angle(Scaled(c, lp(2)), Arc(0.3, 1.0)) - a) <= 1e-12
    assert solve_equal_angle(lp(2), Arc(1.0, 0.01)) == pytest.approx(0.005, abs=1e-7)


def test_root_non_strict_norm_rejected():
    with pytest.raises(ConstructionError):
        build(ConstructionConfig(lp(1), 0.1, math.pi / 4, 2))


def test_depth_zero():
    c = build(ConstructionConfig(lp(3), 0.2, 1.0, 0))
    assert c.n_nodes == 1
    assert c.start[0] + 0.5 * c.width[0] == pytest.approx(1.0)
    assert c.measure(0) == pytest.approx(0.2)
    assert len(c.h_values(lp(2))) == 0


def test_fixed_ratio_halving():
    c = build(ConstructionConfig(lp(2), 0.1, 0.0, 5, "fixed_ratio", rho=0.5))
    for n in range(6):
        assert np.allclose(c.width[level_slice(n)], 0.1 / 4**n, rtol=1e-14)
    assert c.measure(5) == pytest.approx(0.1 / 2**5, rel=1e-14)


def test_fixed_ratio_one_keeps_measure():
    c = build(ConstructionConfig(lp(2), 0.1, 0.0, 4, "fixed_ratio", rho=1.0))
    assert all(c.measure(n) == pytest.approx(0.1) for n in range(5))
    assert np.all(c.ratios() == 0)


def test_equality_depth10_measure():
    c = build(ConstructionConfig(lp(2), 0.1, 0.0, 10))
    assert 0.099889 <= c.measure(10) <= 0.1
    m = [c.measure(n) for n in range(11)]
    assert all(b <= a for a, b in zip(m, m[1:]))


def test_ratio_bound(eq_l2):
    r = eq_l2.ratios()
    a = eq_l2.alpha[eq_l2.internal]
    assert np.all(r <= (2 / 3) * a**2)
    c = build(ConstructionConfig(lp(2), 1.0, 0.0, 1))
    assert c.ratios()[0] == pytest.approx((1 - 2 * 0.4922) / 0.4922, abs=2e-3)


def test_nesting_and_decay(eq_l2, ef_l2):
    for c in (eq_l2, ef_l2):
        for i in range(2 ** c.depth - 1):
            parent = c.node_arc(i)
            for k in (2 * i + 1, 2 * i + 2):
                assert parent.contains_arc(c.node_arc(k), atol=1e-15)
            assert c.width[i] - 2 * c.alpha[i] > 0
        for n in range(1, c.depth + 1):
            assert np.all(c.width[level_slice(n)] < c.config.alpha0 / 2**n)


def test_equality_residual(eq_l2):
    assert np.abs(eq_l2.h[eq_l2.internal]).max() <= eq_l2.config.tol
    rep = eq_l2.check_h_signs(lp(2))
    assert rep.max_abs_h <= eq_l2.config.tol
    assert eq_l2.check_h_signs(Scaled(2.0, lp(2))).max_abs_h <= 2 * eq_l2.config.tol


def test_equality_fraction_positive(ef_l2):
    assert np.all(ef_l2.h[ef_l2.internal] > 0)


def test_level_arcs(eq_l2):
    assert len(eq_l2.level_arcs(0)) == 1
    a1 = eq_l2.level_arcs(1)
    assert len(a1) == 2 and all(x.width == pytest.approx(eq_l2.alpha[0]) for x in a1)
    a3 = eq_l2.level_arcs(3)
    assert len(a3) == 8
    for arc, i in zip(a3, range(7, 15)):
        parent = (i - 1) // 2
        assert arc.width == pytest.approx(eq_l2.alpha[parent], abs=1e-12)
    with pytest.raises(ValueError):
        eq_l2.level_arcs(7)


def test_en_and_eprime_chords(eq_l2):
    assert len(eq_l2.en_chords(0)) == 1
    for n in range(1, 7):
        assert len(eq_l2.en_chords(n)) == len(eq_l2.eprime_chords(n)) == 2**n
    pts = eq_l2.transition_angles(1)
    e1 = eq_l2.eprime_pairs(1)
    assert e1 == [(0, 3), (1, 2)]
    assert pts[0] == pytest.approx(eq_l2.start[0])
    assert pts[3] == pytest.approx(eq_l2.start[0] + eq_l2.width[0])
    assert eq_l2.eprime_pairs(2) == [(0, 7), (3, 4), (1, 2), (5, 6)]
    with pytest.raises(ValueError):
        eq_l2.eprime_chords(0)
    ends = sorted((round(math.cos(a.start), 12), round(math.sin(a.end), 12)) for a in eq_l2.level_arcs(2))
    got = sorted((round(math.cos(ch.a), 12), round(math.sin(ch.b), 12)) for ch in eq_l2.en_chords(2))
    assert got == ends


def test_paths():
    assert node_path(0) == ""
    assert node_path(1) == "0" and node_path(2) == "1"
    assert node_path(13) == "110"
    for i in range(50):
        assert path_index(node_path(i)) == i


def test_equality_fraction_with_l1_term():
    norm = parse_norm("lp:2+0.1*lp:1")
    c = build(ConstructionConfig(norm, 0.1, 0.3, 3, "equality_fraction", rho=0.8))
    assert np.all(c.h_values(norm) > 0)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(alpha0=0.0),
        dict(alpha0=math.pi / 2),
        dict(depth=-1),
        dict(depth=21),
        dict(mode="bogus"),
        dict(mode="equality_fraction"),
        dict(mode="equality_fraction", rho=1.0),
        dict(mode="fixed_ratio", rho=0.0),
        dict(mode="equality", rho=0.5),
        dict(tol=0.0),
    ],
)
def test_config_preconditions(kwargs):
    base = dict(norm=lp(2), alpha0=0.1)
    base.update(kwargs)
    with pytest.raises(ConstructionError):
        ConstructionConfig(**base)


def test_h_matches_scalar(eq_l2):
    for i in (0, 3, 20):
        rep = trapezoid_h(lp(3), eq_l2.node_arc(i), eq_l2.alpha[i])
        assert rep.h == pytest.approx(eq_l2.h_values(lp(3))[i], abs=1e-15)
