"""Deterministic pseudorandom arc sets for solver oracle checks.

A 64-bit linear congruential generator (seed 1, multiplier
6364136223846793005, increment 1442695040888963407); each draw keeps the
top 53 bits of the state, so the stream is identical on every platform.
"""

from __future__ import annotations

import math

from .norms import combine, lp

_MASK = (1 << 64) - 1
MULTIPLIER = 6364136223846793005
INCREMENT = 1442695040888963407


class LCG:
    def __init__(self, seed=1):
        self.state = seed & _MASK

    def next_u64(self):
        self.state = (self.state * MULTIPLIER + INCREMENT) & _MASK
        return self.state

    def uniform(self):
        """Float in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) / float(1 << 53)

    def integer(self, lo, hi):
        """Integer in [lo, hi] inclusive."""
        return lo + int(self.uniform() * (hi - lo + 1))


NORM_CYCLE = (
    lp(2),
    lp(3),
    lp(1.5),
    combine((1.0, lp(2)), (0.1, lp(1))),
    combine((0.5, lp(4)), (1.0, lp(1.25))),
)


def random_transition_angles(gen, m):
    """``2m`` increasing angles with random positive spacings, spanning under one turn."""
    steps = [0.05 + gen.uniform() for _ in range(2 * m)]
    total = sum(steps)
    offset = 2 * math.pi * gen.uniform()
    angles, acc = [], 0.0
    for s in steps:
        angles.append(offset + 2 * math.pi * acc / total)
        acc += s
    return angles


def oracle_instances(count=100, max_m=6, seed=1):
    """``count`` tuples ``(norm, angles)`` with ``1 <= m <= max_m``."""
    gen = LCG(seed)
    out = []
    for k in range(count):
        m = gen.integer(1, max_m)
        out.append((NORM_CYCLE[k % len(NORM_CYCLE)], random_transition_angles(gen, m)))
    return out
