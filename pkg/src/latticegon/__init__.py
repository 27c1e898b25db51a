"""Minimal-perimeter convex lattice polygons under a general norm.

The package covers radial-function geometry of convex bodies, exact integer
lattice tools, three polygon constructions (exact, greedy, shape-guided), the
variational problem whose solution gives the limit shape and asymptotic constant,
and a small experiment harness with a command-line front end.
"""

from .errors import NumericError, ValidationError
from .geometry import (
    ConvexBody,
    DiskBody,
    EllipseFocusBody,
    PolygonBody,
    RadialBody,
    RadialFunction,
    body_from_json,
    scale_to_unit_area,
    unit_area_disk,
)
from .lattice import LatticePolygon, Vec, increasing_slope_construct
from .minimizer import MinimizerResult, exact_minimizer, greedy_polygon, shape_guided_polygon
from .variational import VPSolution, alpha_two_ways, is_circle_limit, limit_polygon, solve_vp

__version__ = "0.1.0"

__all__ = [
    "ConvexBody",
    "DiskBody",
    "EllipseFocusBody",
    "LatticePolygon",
    "MinimizerResult",
    "NumericError",
    "PolygonBody",
    "RadialBody",
    "RadialFunction",
    "VPSolution",
    "ValidationError",
    "Vec",
    "alpha_two_ways",
    "body_from_json",
    "exact_minimizer",
    "greedy_polygon",
    "increasing_slope_construct",
    "is_circle_limit",
    "limit_polygon",
    "scale_to_unit_area",
    "shape_guided_polygon",
    "solve_vp",
    "unit_area_disk",
]
