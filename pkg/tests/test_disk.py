import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from aniso_trace.disk import (
    Arc,
    ArcSet,
    Chord,
    DegenerateChordError,
    GeometryError,
    canonical_angle,
    chord_direction,
    chord_direction_mod_pi,
    chord_length,
    chord_vector,
    segment_area,
    trapezoid_h,
)
from aniso_trace.norms import Scaled, combine, lp


def iso_h(wbar, a):
    return 2 * math.sin(wbar / 2) + 2 * math.sin(wbar / 2 - a) - 4 * math.sin(a / 2)


def test_chord_examples():
    assert chord_length(lp(2), 0.0, math.pi) == pytest.approx(2.0)
    assert chord_length(lp(2), 0.3, 0.3 + math.pi / 3) == pytest.approx(1.0)
    assert chord_length(lp(1), 0.0, math.pi / 2) == pytest.approx(2.0)


def test_degenerate_chord():
    with pytest.raises(DegenerateChordError):
        chord_length(lp(2), 1.0, 1.0)
    with pytest.raises(DegenerateChordError):
        Chord(0.0, 2 * math.pi)


@given(st.floats(-10, 10), st.floats(1e-6, 6.0))
def test_chord_vector_matches_points(a, w):
    b = a + w
    dx, dy = chord_vector(a, b)
    assert dx == pytest.approx(math.cos(b) - math.cos(a), abs=1e-12)
    assert dy == pytest.approx(math.sin(b) - math.sin(a), abs=1e-12)


def test_tiny_chord_keeps_relative_precision():
    w = 1e-12
    assert chord_length(lp(2), 0.7, 0.7 + w) == pytest.approx(w, rel=1e-12)


def test_direction_examples():
    assert chord_direction(-math.pi / 3, math.pi / 3) == pytest.approx(math.pi / 2)
    assert chord_direction(0.0, math.pi) == pytest.approx(math.pi)
    for w in (0.01, 0.5, 2.0):
        assert chord_direction_mod_pi(math.pi / 4) == pytest.approx(3 * math.pi / 4)
        d = chord_direction(math.pi / 4 - w / 2, math.pi / 4 + w / 2)
        assert math.fmod(d, math.pi) == pytest.approx(3 * math.pi / 4)


def test_trapezoid_examples():
    parent = Arc(2.0, 1.0)
    assert trapezoid_h(lp(2), parent, 0.4).h == pytest.approx(iso_h(1.0, 0.4), abs=1e-12)
    assert iso_h(1.0, 0.4) == pytest.approx(0.363841, abs=1e-6)
    near = trapezoid_h(lp(2), parent, 0.5 - 1e-9).h
    assert near == pytest.approx(2 * math.sin(0.5) - 4 * math.sin(0.25), abs=1e-8)
    assert near < 0
    for norm in (lp(2), lp(3), lp(1), combine((1.0, lp(2)), (0.3, lp(1)))):
        rep = trapezoid_h(norm, parent, 1e-9)
        assert rep.h == pytest.approx(2 * rep.parent_len, rel=1e-6)


@given(st.floats(-7, 7), st.floats(0.01, 3.0), st.floats(0.01, 0.99))
def test_isotropic_closed_form(start, wbar, frac):
    a = frac * wbar / 2
    assert trapezoid_h(lp(2), Arc(start, wbar), a).h == pytest.approx(iso_h(wbar, a), abs=1e-12)


@given(st.floats(0.1, 10.0), st.floats(-3, 3), st.floats(0.01, 0.99))
def test_h_linear_in_norm(c, start, frac):
    parent = Arc(start, 0.8)
    a = frac * 0.4
    n1, n2 = lp(3), lp(1.5)
    h = trapezoid_h(combine((c, n1), (1.0, n2)), parent, a).h
    want = c * trapezoid_h(n1, parent, a).h + trapezoid_h(n2, parent, a).h
    assert h == pytest.approx(want, abs=1e-12 * (1 + c))
    assert trapezoid_h(Scaled(c, n1), parent, a).h == pytest.approx(c * trapezoid_h(n1, parent, a).h, abs=1e-13 * (1 + c))


def test_trapezoid_alpha_range():
    with pytest.raises(GeometryError):
        trapezoid_h(lp(2), Arc(0.0, 1.0), 0.5)
    with pytest.raises(GeometryError):
        trapezoid_h(lp(2), Arc(0.0, 1.0), 0.0)


def test_segment_area_examples():
    assert segment_area(math.pi) == pytest.approx(math.pi / 2)
    assert segment_area(0.0) == 0.0
    assert segment_area(1.0) == pytest.approx(0.079265, abs=1e-6)
    with pytest.raises(GeometryError):
        segment_area(-0.1)


def test_arc_and_arcset():
    a = Arc(-0.5, 0.4)
    assert 0 <= a.start < 2 * math.pi
    assert canonical_angle(-0.5) == pytest.approx(2 * math.pi - 0.5)
    s = ArcSet((Arc(3.0, 0.5), Arc(0.0, 1.0)))
    assert [x.start for x in s] == pytest.approx([0.0, 3.0])
    assert s.measure == pytest.approx(1.5)
    with pytest.raises(GeometryError):
        ArcSet((Arc(0.0, 1.0), Arc(0.5, 1.0)))
    with pytest.raises(GeometryError):
        ArcSet((Arc(0.0, 1.0), Arc(1.0, 1.0)))
    with pytest.raises(GeometryError):
        Arc(0.0, 0.0)
    assert Arc(0.0, 1.0).contains_arc(Arc(0.2, 0.3))
    assert not Arc(0.0, 1.0).contains_arc(Arc(0.9, 0.3))
    assert np.isclose(Arc(6.0, 0.5).gap_to(Arc(0.5, 0.1)), 0.5 - (6.5 - 2 * math.pi))
