"""Arcs, chords and the trapezoid functional on the unit circle.

Chord vectors are formed with the product-to-sum identity

    p(b) - p(a) = 2 sin((b - a) / 2) * (-sin m, cos m),   m = (a + b) / 2,

instead of subtracting point coordinates. Chords of width 1e-6 rad keep
full relative precision this way, which the equality construction needs
many levels down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


class GeometryError(ValueError):
    pass


class DegenerateChordError(GeometryError):
    pass


def canonical_angle(theta):
    """Reduce an angle to ``[0, 2*pi)``."""
    t = math.fmod(theta, TWO_PI)
    if t < 0:
        t += TWO_PI
    # fmod can land exactly on 2*pi after the shift
    return 0.0 if t >= TWO_PI else t


@dataclass(frozen=True)
class Arc:
    """Counterclockwise arc ``{start + t : 0 <= t <= width}``."""

    start: float
    width: float

    def __post_init__(self):
        if not (0.0 < self.width < TWO_PI):
            raise GeometryError(f"arc width must lie in (0, 2*pi), got {self.width!r}")
        object.__setattr__(self, "start", canonical_angle(float(self.start)))
        object.__setattr__(self, "width", float(self.width))

    @property
    def end(self):
        return self.start + self.width

    @property
    def center(self):
        return self.start + 0.5 * self.width

    def gap_to(self, other):
        """Counterclockwise angular gap from the end of ``self`` to ``other.start``."""
        return canonical_angle(other.start - self.end)

    def disjoint(self, other):
        # other must start after self ends and end before self starts again
        g = self.gap_to(other)
        return 0.0 < g and g + other.width < TWO_PI - self.width

    def contains_arc(self, other, atol=0.0):
        off = canonical_angle(other.start - self.start)
        if off > TWO_PI - atol:
            off -= TWO_PI
        return off >= -atol and off + other.width <= self.width + atol


@dataclass(frozen=True)
class ArcSet:
    """Pairwise disjoint arcs, sorted counterclockwise by start angle."""

    arcs: tuple

    def __post_init__(self):
        arcs = tuple(sorted(self.arcs, key=lambda a: a.start))
        if not arcs:
            raise GeometryError("an arc set needs at least one arc")
        total = sum(a.width for a in arcs)
        if total >= TWO_PI:
            raise GeometryError("arcs cover the whole circle")
        if len(arcs) > 1:
            for a, b in zip(arcs, arcs[1:] + arcs[:1]):
                if not a.gap_to(b) > 0 or a.gap_to(b) > TWO_PI - a.width - b.width:
                    raise GeometryError(f"arcs overlap or touch: {a} and {b}")
        object.__setattr__(self, "arcs", arcs)

    def __len__(self):
        return len(self.arcs)

    def __iter__(self):
        return iter(self.arcs)

    @property
    def measure(self):
        return sum(a.width for a in self.arcs)


@dataclass(frozen=True)
class Chord:
    a: float
    b: float

    def __post_init__(self):
        if _same_point(self.a, self.b):
            raise DegenerateChordError(f"chord endpoints coincide: {self.a!r}, {self.b!r}")

    @property
    def points(self):
        return (math.cos(self.a), math.sin(self.a)), (math.cos(self.b), math.sin(self.b))


@dataclass(frozen=True)
class TrapezoidReport:
    h: float
    parent_len: float
    prime_len: float
    child0_len: float
    child1_len: float


def _same_point(a, b):
    # sin(pi) is not exactly zero in floating point
    return abs(math.sin(0.5 * (b - a))) <= 1e-15 * max(1.0, abs(b - a))


def point(theta):
    return math.cos(theta), math.sin(theta)


def chord_vector(a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    s = 2.0 * np.sin(half)
    return -s * np.sin(mid), s * np.cos(mid)


def chord_lengths(norm, center, width):
    """Vectorized ``norm`` length of the chord spanning ``width`` around ``center``."""
    chord = 2.0 * np.abs(np.sin(0.5 * width))
    return chord * norm.evaluate_xy(-np.sin(center), np.cos(center))


def chord_length(norm, a, b):
    if _same_point(a, b):
        raise DegenerateChordError(f"chord endpoints coincide: {a!r}, {b!r}")
    return float(chord_lengths(norm, 0.5 * (a + b), b - a))


def chord_direction(a, b):
    """Angle in ``[0, 2*pi)`` of the unit vector from ``p(a)`` to ``p(b)``."""
    if _same_point(a, b):
        raise DegenerateChordError(f"chord endpoints coincide: {a!r}, {b!r}")
    mid = 0.5 * (a + b)
    d = mid + 0.5 * math.pi
    if math.sin(0.5 * (b - a)) < 0:
        d += math.pi
    return canonical_angle(d)


def chord_direction_mod_pi(center):
    """Unoriented direction in ``[0, pi)`` of a chord symmetric about ``center``."""
    return np.mod(np.asarray(center) + 0.5 * np.pi, np.pi)


def trapezoid_lengths(norm, start, width, alpha):
    """Vectorized lengths (parent, prime, child0, child1) for equal child angles."""
    center = start + 0.5 * width
    parent = chord_lengths(norm, center, width)
    prime = chord_lengths(norm, center, width - 2.0 * alpha)
    child0 = chord_lengths(norm, start + 0.5 * alpha, alpha)
    child1 = chord_lengths(norm, start + width - 0.5 * alpha, alpha)
    return parent, prime, child0, child1


def trapezoid_h_values(norm, start, width, alpha):
    parent, prime, child0, child1 = trapezoid_lengths(norm, start, width, alpha)
    return (parent + prime) - (child0 + child1)


def trapezoid_h(norm, parent, alpha):
    """Bases minus sides of the trapezoid cut from ``parent`` by two child arcs of width ``alpha``."""
    if not (0.0 < alpha < 0.5 * parent.width):
        raise GeometryError(f"child angle {alpha!r} outside (0, {0.5 * parent.width!r})")
    lens = [float(x) for x in trapezoid_lengths(norm, parent.start, parent.width, alpha)]
    h = (lens[0] + lens[1]) - (lens[2] + lens[3])
    return TrapezoidReport(h, *lens)


def segment_area(alpha):
    """Area between an arc of angle ``alpha`` and its chord."""
    if not (0.0 <= alpha <= TWO_PI):
        raise GeometryError(f"segment angle must lie in [0, 2*pi], got {alpha!r}")
    return 0.5 * (alpha - math.sin(alpha))
