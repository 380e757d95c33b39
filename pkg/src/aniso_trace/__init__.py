"""Anisotropic least gradient experiments on the unit disk.

Norms built from l_p atoms, Cantor-type arc constructions, an exact
non-crossing chord-matching solver and the experiments that tie them
together.
"""

from .construction import Construction, ConstructionConfig, build, check_h_signs, solve_equal_angle
from .disk import Arc, ArcSet, chord_length, trapezoid_h
from .norms import Combination, LpNorm, Scaled, combine, format_norm, lp, parse_norm
from .solver import TraceDatum, brute_force, region_labels, solve_dp, transition_points

__all__ = [
    "Arc",
    "ArcSet",
    "Combination",
    "Construction",
    "ConstructionConfig",
    "LpNorm",
    "Scaled",
    "TraceDatum",
    "brute_force",
    "build",
    "check_h_signs",
    "chord_length",
    "combine",
    "format_norm",
    "lp",
    "parse_norm",
    "region_labels",
    "solve_dp",
    "solve_equal_angle",
    "transition_points",
    "trapezoid_h",
]

__version__ = "0.1.0"
