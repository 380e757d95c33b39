"""Planar anisotropic norms built from l_p atoms.

A norm is an immutable expression tree with three node kinds:

* :class:`LpNorm` -- ``(|x|^p + |y|^p)^(1/p)`` for a finite ``p >= 1``;
* :class:`Combination` -- a positive linear combination of norms;
* :class:`Scaled` -- a norm multiplied by a positive factor.

Every node evaluates on scalars or numpy arrays of coordinates, so whole
levels of a construction can be processed in one call.

Text form (used by the CLI and JSON dumps)::

    norm  := term ( '+' term )*
    term  := [ coef '*' ] atom
    atom  := 'lp:' float  |  'scale:' float '*' '(' norm ')'
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np


class NormError(ValueError):
    """Raised for an invalid norm expression or norm string."""


class NormSpec:
    """Base class for norm expression nodes."""

    def evaluate_xy(self, x, y):
        raise NotImplementedError

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        out = self.evaluate_xy(v[..., 0], v[..., 1])
        return float(out) if np.ndim(out) == 0 else out

    def atoms(self):
        """Yield ``(weight, LpNorm)`` pairs whose weighted sum equals this norm."""
        raise NotImplementedError

    def __str__(self):
        return format_norm(self)


@dataclass(frozen=True)
class LpNorm(NormSpec):
    p: float

    def __post_init__(self):
        object.__setattr__(self, "p", float(self.p))
        if not (math.isfinite(self.p) and self.p >= 1.0):
            raise NormError(f"l_p exponent must be a finite real >= 1, got {self.p!r}")

    def evaluate_xy(self, x, y):
        ax = np.abs(x)
        ay = np.abs(y)
        if self.p == 1.0:
            return ax + ay
        if self.p == 2.0:
            return np.hypot(ax, ay)
        # factor out the larger coordinate so large p neither over- nor underflows
        big = np.maximum(ax, ay)
        safe = np.where(big > 0, big, 1.0)
        with np.errstate(invalid="ignore", divide="ignore"):
            inner = (ax / safe) ** self.p + (ay / safe) ** self.p
        return np.where(big > 0, big * inner ** (1.0 / self.p), 0.0)

    def atoms(self):
        yield 1.0, self


@dataclass(frozen=True)
class Combination(NormSpec):
    terms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        terms = tuple((float(c), n) for c, n in self.terms)
        if not terms:
            raise NormError("a combination needs at least one term")
        for c, n in terms:
            if not (math.isfinite(c) and c > 0):
                raise NormError(f"combination coefficients must be positive, got {c!r}")
            if not isinstance(n, NormSpec):
                raise NormError(f"combination term is not a norm: {n!r}")
        object.__setattr__(self, "terms", terms)

    def evaluate_xy(self, x, y):
        total = 0.0
        for c, n in self.terms:
            total = total + c * n.evaluate_xy(x, y)
        return total

    def atoms(self):
        for c, n in self.terms:
            for w, atom in n.atoms():
                yield c * w, atom


@dataclass(frozen=True)
class Scaled(NormSpec):
    factor: float
    base: NormSpec

    def __post_init__(self):
        object.__setattr__(self, "factor", float(self.factor))
        if not (math.isfinite(self.factor) and self.factor > 0):
            raise NormError(f"scale factor must be positive, got {self.factor!r}")
        if not isinstance(self.base, NormSpec):
            raise NormError(f"scaled base is not a norm: {self.base!r}")

    def evaluate_xy(self, x, y):
        return self.factor * self.base.evaluate_xy(x, y)

    def atoms(self):
        for w, atom in self.base.atoms():
            yield self.factor * w, atom


def lp(p):
    return LpNorm(float(p))


def combine(*terms):
    """``combine((1.0, lp(2)), (0.1, lp(1)))``"""
    return Combination(tuple(terms))


def evaluate(norm, v):
    """Value of ``norm`` at the planar vector ``v`` (or a stack of them)."""
    return norm(v)


def circle_profile(norm, theta):
    """Restriction of the norm to the unit circle, ``norm((cos t, sin t))``."""
    out = norm.evaluate_xy(np.cos(theta), np.sin(theta))
    return float(out) if np.ndim(out) == 0 else out


def circle_profile_derivative(norm, theta, step=1e-6):
    if step <= 0:
        raise ValueError("step must be positive")
    return (circle_profile(norm, theta + step) - circle_profile(norm, theta - step)) / (2.0 * step)


def circle_profile_curvature(norm, theta, step=1e-4):
    """Relative second difference ``f''/f`` of the circle profile.

    This is the quantity that decides the sign of the trapezoid functional
    for small arcs (the first-order terms cancel between the two sides).
    """
    f0 = circle_profile(norm, theta)
    f2 = circle_profile(norm, theta + step) - 2.0 * f0 + circle_profile(norm, theta - step)
    return f2 / (step * step) / f0


def rescale_to_match(phi1, phi2, theta):
    """Factor ``c`` with ``c * phi2 == phi1`` in direction ``theta``."""
    return circle_profile(phi1, theta) / circle_profile(phi2, theta)


@dataclass(frozen=True)
class ConvexityProbe:
    passed: bool
    worst_margin: float
    worst_pair: tuple
    sample_count: int


def strict_convexity_probe(norm, sample_count=64, threshold=1e-12):
    """Midpoint test on pairs of unit-sphere samples.

    For all sampled pairs ``u != +-v`` with ``norm(u) = norm(v) = 1`` the
    relative slack ``1 - norm((u + v) / 2)`` must exceed ``threshold``.
    """
    if sample_count < 8:
        raise ValueError("sample_count must be at least 8")
    t = 2.0 * np.pi * np.arange(sample_count) / sample_count
    dirs = np.stack([np.cos(t), np.sin(t)], axis=-1)
    unit = dirs / norm(dirs)[:, None]
    i, j = np.triu_indices(sample_count, k=1)
    # skip antipodal pairs, their midpoint is the origin
    keep = (j - i) * 2 != sample_count
    i, j = i[keep], j[keep]
    mid = 0.5 * (unit[i] + unit[j])
    slack = 1.0 - norm(mid)
    k = int(np.argmin(slack))
    worst = float(slack[k])
    return ConvexityProbe(
        passed=worst > threshold,
        worst_margin=worst,
        worst_pair=(float(t[i[k]]), float(t[j[k]])),
        sample_count=sample_count,
    )


# --- text form -------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<lp>lp:)|(?P<scale>scale:)|(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<op>[*+()]))"
)


def _tokenize(text):
    pos = 0
    tokens = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise NormError(f"unexpected input at position {pos}: {text[pos:]!r}")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self, kind, value=None):
        k, v = self.peek()
        if k != kind or (value is not None and v != value):
            want = value or kind
            raise NormError(f"expected {want!r} in norm string {self.text!r}")
        self.i += 1
        return v

    def norm(self):
        terms = [self.term()]
        while self.peek() == ("op", "+"):
            self.i += 1
            terms.append(self.term())
        if len(terms) == 1 and terms[0][0] is None:
            return terms[0][1]
        return Combination(tuple((1.0 if c is None else c, n) for c, n in terms))

    def term(self):
        coef = None
        if self.peek()[0] == "num":
            coef = float(self.take("num"))
            if not coef > 0:
                raise NormError(f"coefficient must be positive in {self.text!r}")
            self.take("op", "*")
        return coef, self.atom()

    def atom(self):
        kind, _ = self.peek()
        if kind == "lp":
            self.i += 1
            return LpNorm(float(self.take("num")))
        if kind == "scale":
            self.i += 1
            factor = float(self.take("num"))
            self.take("op", "*")
            self.take("op", "(")
            inner = self.norm()
            self.take("op", ")")
            return Scaled(factor, inner)
        raise NormError(f"expected 'lp:' or 'scale:' in norm string {self.text!r}")


def parse_norm(text):
    """Parse the text form, e.g. ``"1.0*lp:2 + 0.1*lp:1"``."""
    parser = _Parser(text)
    out = parser.norm()
    if parser.i != len(parser.tokens):
        raise NormError(f"trailing input in norm string {text!r}")
    return out


def _num(x):
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def _atom_text(n):
    if isinstance(n, LpNorm):
        return f"lp:{_num(n.p)}"
    if isinstance(n, Scaled):
        return f"scale:{_num(n.factor)}*({format_norm(n.base)})"
    # a bare combination is not an atom; wrap it in a unit scale
    return f"scale:1*({format_norm(n)})"


def format_norm(n):
    """Inverse of :func:`parse_norm` (shortest round-tripping numbers)."""
    if isinstance(n, Combination):
        return " + ".join(f"{_num(c)}*{_atom_text(t)}" for c, t in n.terms)
    return _atom_text(n)
