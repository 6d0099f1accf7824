"""Counting centers of z^d + c: exact combinatorics, circle dynamics and numerics."""

from .circle import (
    RotationSet,
    angle_pair_count,
    build_arc_model,
    build_portrait,
    enumerate_itineraries,
    enumerate_rotation_sets,
    widest_gap,
)
from .dynamics import find_centers, gleason_poly
from .hcomp import HComposition, enumerate_hcompositions, identity_check, term_value
from .series import FormalPowerSeries, closed_form_series, g_series
from .verify import VerifyReport, run_checks

__version__ = "0.1.0"

__all__ = [
    "FormalPowerSeries",
    "HComposition",
    "RotationSet",
    "VerifyReport",
    "angle_pair_count",
    "build_arc_model",
    "build_portrait",
    "closed_form_series",
    "enumerate_hcompositions",
    "enumerate_itineraries",
    "enumerate_rotation_sets",
    "find_centers",
    "g_series",
    "gleason_poly",
    "identity_check",
    "run_checks",
    "term_value",
    "widest_gap",
]
