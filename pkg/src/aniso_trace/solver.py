"""Exact discrete least gradient solver for data ``chi_F``, ``F`` a finite union of arcs.

Competitors are non-crossing perfect matchings of the transition points of
``F`` (the endpoints of its arcs) by straight chords; the cost of a matching
is the sum of the anisotropic chord lengths. The minimum is found with an
interval dynamic program over the circular order of the points, and
:func:`enumerate_noncrossing` provides a brute-force oracle for small sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .disk import ArcSet, GeometryError, chord_lengths, segment_area

ENTER, EXIT = "enter", "exit"


@dataclass(frozen=True)
class TraceDatum:
    """Transition points of ``chi_F`` in counterclockwise order.

    ``angles`` are unreduced and strictly increasing over less than one turn;
    tags alternate ``enter``/``exit`` starting with ``enter``, so the
    boundary piece from point ``2k`` to ``2k + 1`` lies in ``F``.
    """

    angles: tuple
    tags: tuple

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=float)
        if len(a) == 0 or len(a) % 2:
            raise GeometryError("a trace datum needs a positive even number of points")
        if not (np.diff(a) > 0).all() or not a[-1] - a[0] < 2 * math.pi:
            raise GeometryError("transition points must be distinct and increase within one turn")
        want = tuple(ENTER if i % 2 == 0 else EXIT for i in range(len(a)))
        if tuple(self.tags) != want:
            raise GeometryError("transition tags must alternate enter/exit")
        object.__setattr__(self, "angles", tuple(float(x) for x in a))
        object.__setattr__(self, "tags", tuple(self.tags))

    @classmethod
    def from_angles(cls, angles):
        return cls(tuple(angles), tuple(ENTER if i % 2 == 0 else EXIT for i in range(len(angles))))

    @property
    def m(self):
        return len(self.angles) // 2

    def gap_after(self, i):
        """Angular width of the boundary piece from point ``i`` to point ``i + 1``."""
        n = len(self.angles)
        if i == n - 1:
            return self.angles[0] + 2 * math.pi - self.angles[-1]
        return self.angles[i + 1] - self.angles[i]


def transition_points(arcs):
    """Tagged transition points of an :class:`ArcSet`."""
    arcs = arcs if isinstance(arcs, ArcSet) else ArcSet(tuple(arcs))
    angles = []
    for a in arcs:
        angles += [a.start, a.start + a.width]
    return TraceDatum.from_angles(angles)


@dataclass(frozen=True)
class ChordMatching:
    pairs: tuple
    objective: float

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(sorted((min(p), max(p)) for p in self.pairs)))


def validate_matching(pairs, n_points):
    """Raise ``ValueError`` unless ``pairs`` is a perfect non-crossing matching."""
    seen = sorted(i for p in pairs for i in p)
    if seen != list(range(n_points)):
        raise ValueError("matching is not perfect")
    norm_pairs = [(min(p), max(p)) for p in pairs]
    for i, j in norm_pairs:
        if (j - i - 1) % 2:
            raise ValueError(f"pair {(i, j)} encloses an odd number of points")
    for a, (i, j) in enumerate(norm_pairs):
        for k, l in norm_pairs[a + 1 :]:
            nested_or_disjoint = (i < k < l < j) or (k < i < j < l) or j < k or l < i
            if not nested_or_disjoint:
                raise ValueError(f"pairs {(i, j)} and {(k, l)} cross")


def cost_matrix(norm, datum):
    """All pairwise chord lengths, computed once per (norm, datum)."""
    a = np.asarray(datum.angles)
    ai, aj = np.meshgrid(a, a, indexing="ij")
    cost = chord_lengths(norm, 0.5 * (ai + aj), aj - ai)
    np.fill_diagonal(cost, np.inf)
    return cost


def objective(norm, pairs, points):
    """Total anisotropic length of the chords ``pairs`` between ``points`` (angles)."""
    pts = np.asarray(points.angles if isinstance(points, TraceDatum) else points, dtype=float)
    if len(pairs) == 0:
        return 0.0
    idx = np.asarray(pairs)
    a, b = pts[idx[:, 0]], pts[idx[:, 1]]
    return float(np.sum(chord_lengths(norm, 0.5 * (a + b), b - a)))


def enumerate_noncrossing(m):
    """All non-crossing perfect matchings of ``2m`` points in convex position.

    Brute-force recursion: point 0 pairs with an odd ``k``; the points
    strictly between and those after ``k`` are matched independently.
    """
    if m > 8:
        raise ValueError("brute-force enumeration is limited to m <= 8")

    def rec(lo, hi):
        if lo >= hi:
            yield ()
            return
        for k in range(lo + 1, hi, 2):
            for inner in rec(lo + 1, k):
                for outer in rec(k + 1, hi):
                    yield ((lo, k),) + inner + outer

    return list(rec(0, 2 * m))


def brute_force(norm, datum):
    """Every matching with its value, sorted by value (oracle for small ``m``)."""
    cost = cost_matrix(norm, datum)
    out = []
    for pairs in enumerate_noncrossing(datum.m):
        out.append(ChordMatching(pairs, float(sum(cost[i, j] for i, j in pairs))))
    out.sort(key=lambda mt: mt.objective)
    return out


@dataclass
class SolveReport:
    optimal_value: float
    optimal: ChordMatching
    ties: list
    uniqueness_gap: float
    ties_truncated: bool = False
    datum: TraceDatum | None = field(default=None, repr=False)

    @property
    def n_ties(self):
        return len(self.ties)

    @property
    def unique(self):
        return len(self.ties) == 1 and self.uniqueness_gap > 0


def _dp_tables(cost):
    """Best and second-best values over half-open intervals ``[i, j)`` of even length."""
    n = cost.shape[0]
    best = np.full((n + 1, n + 1), np.inf)
    second = np.full((n + 1, n + 1), np.inf)
    idx = np.arange(n + 1)
    best[idx, idx] = 0.0
    for length in range(2, n + 1, 2):
        i = np.arange(0, n - length + 1)[:, None]
        k = i + np.arange(1, length, 2)[None, :]
        j = i + length
        base = cost[i, k]
        b_in, s_in = best[i + 1, k], second[i + 1, k]
        b_out, s_out = best[k + 1, j], second[k + 1, j]
        cand = base + b_in + b_out
        alt = base + np.minimum(s_in + b_out, b_in + s_out)
        order = np.sort(cand, axis=1)
        ii = i[:, 0]
        best[ii, ii + length] = order[:, 0]
        runner = order[:, 1] if order.shape[1] > 1 else np.full(len(ii), np.inf)
        second[ii, ii + length] = np.minimum(runner, alt.min(axis=1))
    return best, second


def _reconstruct(cost, best, lo, hi):
    pairs = []
    stack = [(lo, hi)]
    while stack:
        a, b = stack.pop()
        if a >= b:
            continue
        ks = np.arange(a + 1, b, 2)
        vals = cost[a, ks] + best[a + 1, ks] + best[ks + 1, b]
        k = int(ks[np.argmin(vals)])
        pairs.append((a, k))
        stack += [(a + 1, k), (k + 1, b)]
    return pairs


def _within(cost, best, lo, hi, budget, limit):
    """Matchings of ``[lo, hi)`` with value <= budget, as (value, pairs), at most ``limit``."""
    if lo >= hi:
        yield 0.0, ()
        return
    count = 0
    for k in range(lo + 1, hi, 2):
        base = cost[lo, k]
        if base + best[lo + 1, k] + best[k + 1, hi] > budget:
            continue
        for v_in, p_in in _within(cost, best, lo + 1, k, budget - base - best[k + 1, hi], limit):
            for v_out, p_out in _within(cost, best, k + 1, hi, budget - base - v_in, limit):
                yield base + v_in + v_out, ((lo, k),) + p_in + p_out
                count += 1
                if count >= limit:
                    return


def solve_dp(norm, datum, tie_tol=1e-9, max_ties=256):
    """Minimal non-crossing chord matching of the transition points of ``datum``.

    Runs in O(n^3) for n = 2m points (vectorized over the split point). The
    report lists every matching within ``tie_tol`` of the optimum (at most
    ``max_ties``, see ``ties_truncated``) and the gap to the second-best
    matching.
    """
    if not isinstance(datum, TraceDatum):
        datum = transition_points(datum)
    n = len(datum.angles)
    cost = cost_matrix(norm, datum)
    best, second = _dp_tables(cost)
    opt = float(best[0, n])
    pairs = _reconstruct(cost, best, 0, n)
    optimal = ChordMatching(pairs, float(sum(cost[i, j] for i, j in pairs)))
    # the slack absorbs summation-order differences between the DP and the enumeration
    budget = opt + tie_tol + 1e-13 * max(1.0, abs(opt))
    ties = [ChordMatching(p, v) for v, p in _within(cost, best, 0, n, budget, max_ties + 1)]
    truncated = len(ties) > max_ties
    ties = sorted(ties[:max_ties], key=lambda t: (t.objective, t.pairs))
    if not any(t.pairs == optimal.pairs for t in ties):
        ties = [optimal] + ties[: max_ties - 1]
    return SolveReport(
        optimal_value=opt,
        optimal=optimal,
        ties=ties,
        # a tied runner-up can round a hair below the optimum
        uniqueness_gap=max(0.0, float(second[0, n] - opt)),
        ties_truncated=truncated,
        datum=datum,
    )


# --- faces of a chord diagram ----------------------------------------------


@dataclass
class Face:
    points: tuple  # vertex indices in counterclockwise order
    arcs: tuple  # boundary piece indices i (from point i to i + 1)
    label: str  # "in", "out" or "conflict"
    area: float


@dataclass
class RegionReport:
    faces: list
    area_in: float
    area_out: float
    conflicts: list

    @property
    def consistent(self):
        return not self.conflicts


def region_labels(pairs, datum):
    """Split the disk along the chords of ``pairs`` and label each face.

    A face touching only pieces of ``F`` is "in", one touching only gaps is
    "out", anything else is a conflict. Face areas are the straight-edge
    shoelace area plus the circular segments cut off by its arcs.
    """
    n = len(datum.angles)
    validate_matching(pairs, n)
    partner = np.empty(n, dtype=int)
    for i, j in pairs:
        partner[i], partner[j] = j, i
    ang = np.asarray(datum.angles)
    xy = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    visited = np.zeros(n, dtype=bool)
    faces = []
    for s in range(n):
        if visited[s]:
            continue
        arcs, verts = [], []
        i = s
        while not visited[i]:
            visited[i] = True
            arcs.append(i)
            nxt = (i + 1) % n
            verts += [i, nxt]
            i = int(partner[nxt])
        kinds = {datum.tags[a] == ENTER for a in arcs}
        label = "conflict" if len(kinds) > 1 else ("in" if kinds.pop() else "out")
        poly = xy[verts]
        x, y = poly[:, 0], poly[:, 1]
        shoelace = 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
        area = shoelace + sum(segment_area(datum.gap_after(a)) for a in arcs)
        faces.append(Face(tuple(verts), tuple(arcs), label, area))
    area_in = sum(f.area for f in faces if f.label == "in")
    area_out = sum(f.area for f in faces if f.label == "out")
    return RegionReport(faces, area_in, area_out, [f for f in faces if f.label == "conflict"])


def face_interior_point(face, datum):
    """A point strictly inside a (convex) face: mean of its vertices and arc midpoints."""
    pts = []
    for a in face.arcs:
        t0 = datum.angles[a]
        mid = t0 + 0.5 * datum.gap_after(a)
        pts += [(math.cos(t0), math.sin(t0)), (math.cos(mid), math.sin(mid))]
    return tuple(np.mean(pts, axis=0))


def locate(point, pairs, datum, region=None):
    """Label of the face containing ``point`` (a point of the open disk)."""
    region = region or region_labels(pairs, datum)
    ang = np.asarray(datum.angles)
    px, py = point
    for face in region.faces:
        inside = True
        # chord edges run from the end of one arc to the start of the next one
        for a, b in zip(face.arcs, face.arcs[1:] + face.arcs[:1]):
            e = (a + 1) % len(ang)
            x0, y0 = math.cos(ang[e]), math.sin(ang[e])
            x1, y1 = math.cos(ang[b]), math.sin(ang[b])
            if (x1 - x0) * (py - y0) - (y1 - y0) * (px - x0) < 0:
                inside = False
                break
        if inside:
            return face.label
    raise ValueError(f"point {point} lies in no face")


def matching_nested_in(inner_pairs, inner_datum, outer_pairs, outer_datum):
    """True when every in-face of the inner diagram sits inside an in-face of the outer one."""
    inner = region_labels(inner_pairs, inner_datum)
    outer = region_labels(outer_pairs, outer_datum)
    for face in inner.faces:
        if face.label != "in":
            continue
        if locate(face_interior_point(face, inner_datum), outer_pairs, outer_datum, outer) != "in":
            return False
    return True
