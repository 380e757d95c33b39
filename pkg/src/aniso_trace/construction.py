"""Recursive Cantor-type arc families on the unit circle.

Level 0 is one arc of width ``alpha0``. Every arc of level n is split by
keeping an initial and a final sub-arc of a common width ``alpha`` and
discarding the middle. The common angle is chosen per node:

* ``equality``           -- the root of ``h(alpha) = 0`` (bisection);
* ``equality_fraction``  -- ``rho`` times that root, which forces ``h > 0``;
* ``fixed_ratio``        -- ``rho * width / 2`` with no constraint on ``h``.

Nodes live in flat arrays in heap order: node ``i`` has children
``2i + 1`` (initial sub-arc) and ``2i + 2`` (final sub-arc), so level ``n``
occupies indices ``2**n - 1 .. 2**(n+1) - 2`` in counterclockwise order.
Each node stores ``start``, ``width``, the child angle ``alpha`` and the
cached trapezoid value ``h`` (the last two are NaN on leaves).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .disk import Arc, ArcSet, Chord, canonical_angle, chord_direction_mod_pi, trapezoid_h_values
from .norms import NormSpec, strict_convexity_probe

MODES = ("equality", "equality_fraction", "fixed_ratio")
MAX_DEPTH = 20

BRACKET_REL = 1e-4
BRACKET_PUSHES = 40
FRACTION_GRID = 16


class ConstructionError(ValueError):
    pass


class BracketError(ConstructionError):
    """No sign change of ``h`` could be bracketed (non strictly convex norm?)."""


@dataclass(frozen=True)
class ConstructionConfig:
    norm: NormSpec
    alpha0: float
    theta_center: float = 0.0
    depth: int = 0
    mode: str = "equality"
    rho: float | None = None
    tol: float = 1e-12

    def __post_init__(self):
        if not (0.0 < self.alpha0 < 0.5 * math.pi):
            raise ConstructionError(f"alpha0 must lie in (0, pi/2), got {self.alpha0!r}")
        if not (isinstance(self.depth, (int, np.integer)) and 0 <= self.depth <= MAX_DEPTH):
            raise ConstructionError(f"depth must be an integer in [0, {MAX_DEPTH}], got {self.depth!r}")
        if self.mode not in MODES:
            raise ConstructionError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "equality":
            if self.rho is not None:
                raise ConstructionError("equality mode takes no rho")
        elif self.mode == "equality_fraction":
            if self.rho is None or not (0.0 < self.rho < 1.0):
                raise ConstructionError(f"equality_fraction needs rho in (0, 1), got {self.rho!r}")
        elif self.rho is None or not (0.0 < self.rho <= 1.0):
            # rho = 1 is allowed: touching sub-arcs, useful as a measure-preserving reference
            raise ConstructionError(f"fixed_ratio needs rho in (0, 1], got {self.rho!r}")
        if not self.tol > 0:
            raise ConstructionError("tol must be positive")
        object.__setattr__(self, "theta_center", canonical_angle(float(self.theta_center)))
        object.__setattr__(self, "depth", int(self.depth))


def _push_bracket(norm, start, width):
    """Per-node bracket ``[lo, hi]`` with ``h(lo) > 0 > h(hi)``."""
    lo_rel = np.full(width.shape, BRACKET_REL)
    hi_rel = np.full(width.shape, BRACKET_REL)
    for _ in range(BRACKET_PUSHES + 1):
        lo = lo_rel * width
        hi = 0.5 * width * (1.0 - hi_rel)
        bad_lo = ~(trapezoid_h_values(norm, start, width, lo) > 0)
        bad_hi = ~(trapezoid_h_values(norm, start, width, hi) < 0)
        if not (bad_lo.any() or bad_hi.any()):
            return lo, hi
        lo_rel = np.where(bad_lo, 0.5 * lo_rel, lo_rel)
        hi_rel = np.where(bad_hi, 0.5 * hi_rel, hi_rel)
    k = int(np.flatnonzero(bad_lo | bad_hi)[0])
    raise BracketError(
        f"no sign change of h in (0, w/2) for arc start={start[k]!r} width={width[k]!r}; "
        "the norm is probably not strictly convex in these directions"
    )


def solve_equal_angles(norm, start, width, tol=1e-12):
    """Vectorized root of ``h(alpha) = 0`` for every arc ``(start, width)``.

    Bisection runs until the bracket cannot shrink any further in floating
    point, then the endpoint with the smaller residual is returned.
    """
    start = np.asarray(start, dtype=float)
    width = np.asarray(width, dtype=float)
    lo, hi = _push_bracket(norm, start, width)
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        active = (mid > lo) & (mid < hi)
        if not active.any():
            break
        pos = trapezoid_h_values(norm, start, width, mid) > 0
        lo = np.where(active & pos, mid, lo)
        hi = np.where(active & ~pos, mid, hi)
    h_lo = trapezoid_h_values(norm, start, width, lo)
    h_hi = trapezoid_h_values(norm, start, width, hi)
    alpha = np.where(np.abs(h_lo) <= np.abs(h_hi), lo, hi)
    resid = np.minimum(np.abs(h_lo), np.abs(h_hi))
    if (resid > tol).any():
        k = int(np.argmax(resid))
        raise ConstructionError(f"equality residual {resid[k]!r} exceeds tol {tol!r} at width {width[k]!r}")
    return alpha


def solve_equal_angle(norm, parent, tol=1e-12):
    """Common child angle ``alpha`` in ``(0, parent.width / 2)`` with ``h = 0``."""
    if not (0.0 < parent.width < 0.5 * math.pi):
        raise ConstructionError(f"parent width must lie in (0, pi/2), got {parent.width!r}")
    return float(solve_equal_angles(norm, np.array([parent.start]), np.array([parent.width]), tol)[0])


def level_slice(n):
    return slice(2**n - 1, 2 ** (n + 1) - 1)


def node_path(i):
    """Binary path string of heap index ``i`` (root is ``""``)."""
    level = (i + 1).bit_length() - 1
    if level == 0:
        return ""
    return format(i + 1 - 2**level, f"0{level}b")


def path_index(path):
    return 2 ** len(path) - 1 + (int(path, 2) if path else 0)


@dataclass
class HSignReport:
    min_h: float
    max_abs_h: float
    n_nonpositive: int
    values: np.ndarray = field(repr=False)


@dataclass
class Construction:
    config: ConstructionConfig
    start: np.ndarray
    width: np.ndarray
    alpha: np.ndarray
    h: np.ndarray

    @property
    def depth(self):
        return self.config.depth

    @property
    def n_nodes(self):
        return len(self.start)

    @property
    def internal(self):
        return slice(0, 2**self.depth - 1)

    def _check_level(self, n, allow_zero=True):
        if not isinstance(n, (int, np.integer)) or n < 0 or n > self.depth:
            raise ConstructionError(f"level {n!r} outside 0..{self.depth}")
        if not allow_zero and n == 0:
            raise ConstructionError("level must be at least 1")

    def node_arc(self, i):
        return Arc(self.start[i], self.width[i])

    def level_arcs(self, n):
        self._check_level(n)
        s = level_slice(n)
        return ArcSet(tuple(Arc(a, w) for a, w in zip(self.start[s], self.width[s])))

    def transition_angles(self, n):
        """The ``2**(n+1)`` endpoints of level ``n`` in counterclockwise order (unreduced radians)."""
        self._check_level(n)
        s = level_slice(n)
        out = np.empty(2 ** (n + 1))
        out[0::2] = self.start[s]
        out[1::2] = self.start[s] + self.width[s]
        return out

    def en_pairs(self, n):
        """Index pairs into :meth:`transition_angles` for the leaf chords of ``E_n``."""
        self._check_level(n)
        return [(2 * j, 2 * j + 1) for j in range(2**n)]

    def eprime_pairs(self, n):
        """Index pairs for ``E'_n``: the root chord plus every inner chord above level ``n``."""
        self._check_level(n, allow_zero=False)
        pairs = [(0, 2 ** (n + 1) - 1)]
        for k in range(n):
            span = 2 ** (n - k - 1)
            for q in range(2**k):
                last = (2 * q + 1) * span - 1
                pairs.append((2 * last + 1, 2 * last + 2))
        return pairs

    def _chords(self, pairs, n):
        pts = self.transition_angles(n)
        return [Chord(float(pts[i]), float(pts[j])) for i, j in pairs]

    def en_chords(self, n):
        return self._chords(self.en_pairs(n), n)

    def eprime_chords(self, n):
        return self._chords(self.eprime_pairs(n), n)

    def measure(self, n):
        """Total width of the level-``n`` arcs."""
        self._check_level(n)
        return float(np.sum(self.width[level_slice(n)]))

    def ratios(self):
        """Removed-to-kept ratio ``(w - 2 alpha) / alpha`` at every internal node."""
        s = self.internal
        return (self.width[s] - 2.0 * self.alpha[s]) / self.alpha[s]

    def chord_directions(self):
        """Unoriented directions in ``[0, pi)`` of every node's chord."""
        return chord_direction_mod_pi(self.start + 0.5 * self.width)

    def h_values(self, norm):
        s = self.internal
        return trapezoid_h_values(norm, self.start[s], self.width[s], self.alpha[s])

    def check_h_signs(self, other):
        return check_h_signs(self, other)


def check_h_signs(c, other):
    """Evaluate the trapezoid functional under ``other`` at every internal node."""
    values = c.h_values(other)
    if len(values) == 0:
        return HSignReport(math.nan, 0.0, 0, values)
    return HSignReport(
        min_h=float(values.min()),
        max_abs_h=float(np.abs(values).max()),
        n_nonpositive=int(np.count_nonzero(values <= 0)),
        values=values,
    )


def build(config):
    norm = config.norm
    if config.mode != "fixed_ratio" and config.depth > 0:
        probe = strict_convexity_probe(norm)
        if not probe.passed:
            raise ConstructionError(
                f"norm {norm} failed the strict convexity probe (margin {probe.worst_margin:.3g}); "
                f"{config.mode} mode needs a strictly convex norm"
            )
    n_nodes = 2 ** (config.depth + 1) - 1
    start = np.full(n_nodes, np.nan)
    width = np.full(n_nodes, np.nan)
    alpha = np.full(n_nodes, np.nan)
    h = np.full(n_nodes, np.nan)
    start[0] = config.theta_center - 0.5 * config.alpha0
    width[0] = config.alpha0

    for n in range(config.depth):
        s = level_slice(n)
        st, w = start[s], width[s]
        if config.mode == "fixed_ratio":
            a = config.rho * 0.5 * w
        else:
            a = solve_equal_angles(norm, st, w, config.tol)
            if config.mode == "equality_fraction":
                grid = np.arange(1, FRACTION_GRID + 1) / (FRACTION_GRID + 1)
                below = trapezoid_h_values(norm, st[:, None], w[:, None], a[:, None] * grid[None, :])
                if not (below > 0).all():
                    raise ConstructionError(f"h is not positive below the equality root at level {n}")
                a = config.rho * a
        hv = trapezoid_h_values(norm, st, w, a)
        if config.mode == "equality_fraction" and not (hv > 0).all():
            raise ConstructionError(f"equality_fraction produced h <= 0 at level {n}")
        if config.mode != "fixed_ratio" and not (w - 2.0 * a > 0).all():
            raise ConstructionError(f"removed gap collapsed at level {n}")
        alpha[s] = a
        h[s] = hv
        kids = level_slice(n + 1)
        child_start = np.empty(2 ** (n + 1))
        child_start[0::2] = st
        child_start[1::2] = st + w - a
        start[kids] = child_start
        width[kids] = np.repeat(a, 2)
    return Construction(config, start, width, alpha, h)
