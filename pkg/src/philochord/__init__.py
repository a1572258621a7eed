"""Extremal chords of convex bodies through a fixed pivot."""
from .bodies import (
    Angle2D,
    Ball,
    Body,
    Chord,
    Ellipse2D,
    Polygon2D,
    PolytopeH,
    Position,
    SimplexV,
    Strip2D,
    chord,
    classify_point,
    face_dimension,
)
from .bodyfile import load_body, dump_body
from .chord_scan import Kind, angle_f, angle_g, find_extrema, sweep
from .cpp import cpp_residual_2d, cpp_residual_nd, verify_extremum
from .nd_search import find_local_extrema_nd, global_extremum, verify_nd_theorems
from .philo import construct, right_angle_closed_form
from .polytope import far_field_audit, far_field_constants, l9_bound_check

__version__ = "0.1.0"

__all__ = [
    "Angle2D", "Ball", "Body", "Chord", "Ellipse2D", "Polygon2D", "PolytopeH", "Position", "SimplexV",
    "Strip2D", "chord", "classify_point", "face_dimension", "load_body", "dump_body", "Kind", "angle_f",
    "angle_g", "find_extrema", "sweep", "cpp_residual_2d", "cpp_residual_nd", "verify_extremum",
    "find_local_extrema_nd", "global_extremum", "verify_nd_theorems", "construct",
    "right_angle_closed_form", "far_field_audit", "far_field_constants", "l9_bound_check",
]
