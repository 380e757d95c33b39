import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aniso_trace.disk import Arc, ArcSet, chord_length, segment_area
from aniso_trace.experiments import level_datum
from aniso_trace.instances import LCG, oracle_instances
from aniso_trace.norms import lp, parse_norm
from aniso_trace.solver import (
    ENTER,
    EXIT,
    TraceDatum,
    brute_force,
    enumerate_noncrossing,
    locate,
    matching_nested_in,
    objective,
    region_labels,
    solve_dp,
    transition_points,
    validate_matching,
)

CATALAN = [1, 1, 2, 5, 14, 42, 132, 429, 1430]


@pytest.mark.parametrize("m", range(1, 9))
def test_catalan_counts(m):
    ms = enumerate_noncrossing(m)
    assert len(ms) == CATALAN[m]
    assert len(set(ms)) == len(ms)
    for pairs in ms:
        validate_matching(pairs, 2 * m)


def test_enumeration_limit():
    with pytest.raises(ValueError):
        enumerate_noncrossing(9)


def test_validate_matching_rejects():
    with pytest.raises(ValueError):
        validate_matching([(0, 2), (1, 3)], 4)
    with pytest.raises(ValueError):
        validate_matching([(0, 1)], 4)


def test_transition_points():
    d = transition_points(ArcSet((Arc(0.0, 0.5),)))
    assert d.angles == (0.0, 0.5) and d.tags == (ENTER, EXIT)
    d = transition_points(ArcSet((Arc(1.0, 0.5), Arc(3.0, 0.2))))
    assert d.m == 2 and d.tags == (ENTER, EXIT, ENTER, EXIT)


def test_transition_points_of_level(eq_l2):
    for n in range(4):
        d = level_datum(eq_l2, n)
        assert len(d.angles) == 2 ** (n + 1)
        assert np.allclose(d.angles, eq_l2.transition_angles(n))


def test_single_arc():
    d = TraceDatum.from_angles([0.2, 1.1])
    rep = solve_dp(lp(3), d)
    assert rep.unique and rep.optimal.pairs == ((0, 1),)
    assert rep.optimal_value == pytest.approx(chord_length(lp(3), 0.2, 1.1))
    reg = region_labels(rep.optimal.pairs, d)
    assert reg.area_in == pytest.approx(segment_area(0.9))


def test_lcg_reference():
    g = LCG(1)
    first = g.next_u64()
    assert first == (6364136223846793005 * 1 + 1442695040888963407) % 2**64
    u = LCG(1).uniform()
    assert 0.0 <= u < 1.0
    assert [LCG(5).uniform() for _ in range(3)] == [LCG(5).uniform() for _ in range(3)]


def test_dp_matches_brute_force():
    worst = 0.0
    for norm, angles in oracle_instances(100, 6):
        d = TraceDatum.from_angles(angles)
        rep = solve_dp(norm, d)
        bf = brute_force(norm, d)
        worst = max(worst, abs(rep.optimal_value - bf[0].objective))
        if rep.uniqueness_gap > 1e-9:
            assert rep.optimal.pairs == bf[0].pairs
        if len(bf) > 1:
            assert rep.uniqueness_gap == pytest.approx(bf[1].objective - bf[0].objective, abs=1e-12)
    assert worst <= 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32), st.sampled_from(["lp:2", "lp:1", "lp:3", "lp:2+0.5*lp:1"]))
def test_dp_matches_brute_force_random(m, seed, text):
    rng = np.random.default_rng(seed)
    angles = np.sort(rng.uniform(0, 2 * math.pi, 2 * m))
    if np.min(np.diff(angles)) < 1e-3 or angles[-1] - angles[0] > 2 * math.pi - 1e-3:
        return
    norm = parse_norm(text)
    d = TraceDatum.from_angles(angles)
    rep = solve_dp(norm, d)
    bf = brute_force(norm, d)
    assert abs(rep.optimal_value - bf[0].objective) <= 1e-12
    want = {b.pairs for b in bf if b.objective <= bf[0].objective + 1e-9}
    assert {t.pairs for t in rep.ties} <= {b.pairs for b in bf}
    assert want <= {t.pairs for t in rep.ties} | {rep.optimal.pairs} or rep.ties_truncated


def test_equality_level_one_ties(eq_l2):
    d = level_datum(eq_l2, 1)
    rep = solve_dp(lp(2), d)
    assert rep.n_ties == 2
    got = {t.pairs for t in rep.ties}
    assert got == {((0, 1), (2, 3)), ((0, 3), (1, 2))}
    vals = [t.objective for t in rep.ties]
    assert abs(vals[0] - vals[1]) <= 1e-9


def test_fraction_level_one_unique(ef_l2):
    d = level_datum(ef_l2, 1)
    rep = solve_dp(lp(2), d)
    assert rep.unique and rep.optimal.pairs == ((0, 1), (2, 3))
    assert rep.uniqueness_gap > 0
    bf = brute_force(lp(2), d)
    assert rep.uniqueness_gap == pytest.approx(bf[1].objective - bf[0].objective, abs=1e-14)


def test_objective_telescoping(eq_l2):
    for n in range(1, 7):
        d = level_datum(eq_l2, n)
        e = objective(lp(2), eq_l2.en_pairs(n), d)
        ep = objective(lp(2), eq_l2.eprime_pairs(n), d)
        assert abs(e - ep) <= n * 1e-10
        leaf = sum(chord_length(lp(2), ch.a, ch.b) for ch in eq_l2.en_chords(n))
        assert e == pytest.approx(leaf, abs=1e-15)


def test_ties_cap(eq_l2):
    rep = solve_dp(lp(2), level_datum(eq_l2, 4), max_ties=16)
    assert rep.n_ties == 16 and rep.ties_truncated
    assert rep.optimal in rep.ties


def test_region_labels_e_prime(eq_l2):
    d = level_datum(eq_l2, 1)
    reg = region_labels(eq_l2.eprime_pairs(1), d)
    ins = [f for f in reg.faces if f.label == "in"]
    assert len(ins) == 1 and set(ins[0].arcs) == {0, 2}
    assert reg.consistent
    assert reg.area_in + reg.area_out == pytest.approx(math.pi, abs=1e-12)


def test_region_partition_all_matchings():
    for norm, angles in oracle_instances(30, 5, seed=3):
        d = TraceDatum.from_angles(angles)
        for pairs in enumerate_noncrossing(d.m):
            reg = region_labels(pairs, d)
            assert reg.consistent
            assert reg.area_in + reg.area_out == pytest.approx(math.pi, abs=1e-9)
            assert all(f.area > 0 for f in reg.faces)


def test_locate():
    d = TraceDatum.from_angles([0.0, math.pi / 2])
    pairs = [(0, 1)]
    assert locate((0.6, 0.6), pairs, d) == "in"
    assert locate((0.0, 0.0), pairs, d) == "out"
    assert locate((-0.5, -0.5), pairs, d) == "out"


def test_nesting(ef_l2, eq_l2):
    for n in range(ef_l2.depth):
        assert matching_nested_in(ef_l2.en_pairs(n + 1), level_datum(ef_l2, n + 1), ef_l2.en_pairs(n), level_datum(ef_l2, n))
    for n in range(1, eq_l2.depth):
        assert matching_nested_in(
            eq_l2.eprime_pairs(n + 1), level_datum(eq_l2, n + 1), eq_l2.eprime_pairs(n), level_datum(eq_l2, n)
        )
    d = TraceDatum.from_angles([0.0, 0.5, 1.0, 1.5])
    big = TraceDatum.from_angles([0.0, 1.5])
    assert matching_nested_in([(0, 1), (2, 3)], d, [(0, 1)], big)
    assert not matching_nested_in([(0, 3), (1, 2)], d, [(0, 1)], TraceDatum.from_angles([0.0, 0.75]))


def test_datum_validation():
    with pytest.raises(ValueError):
        TraceDatum.from_angles([0.0])
    with pytest.raises(ValueError):
        TraceDatum.from_angles([0.0, 0.0])
    with pytest.raises(ValueError):
        TraceDatum.from_angles([0.0, 7.0])
    with pytest.raises(ValueError):
        TraceDatum((0.0, 1.0), (EXIT, ENTER))
