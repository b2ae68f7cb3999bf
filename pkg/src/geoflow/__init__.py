"""Geodesic flow bundles from Gaussian curvature fields in faithful normal coordinates."""

from .curvature_field import CurvatureField, make_field
from .curved_trig import law_c, law_sc
from .errors import BranchError, ConvergenceError, DegenerateTriangleError, DomainError, GeoflowError
from .fundamental_solution import FundamentalResult, TriangleSpec, fundamental_solution
from .triangulation import triangulate

__all__ = [
    "CurvatureField",
    "make_field",
    "law_c",
    "law_sc",
    "TriangleSpec",
    "FundamentalResult",
    "fundamental_solution",
    "triangulate",
    "GeoflowError",
    "DomainError",
    "DegenerateTriangleError",
    "BranchError",
    "ConvergenceError",
]

__version__ = "0.1.0"
