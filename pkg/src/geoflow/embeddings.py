"""Rotation-symmetric immersions of two-dimensional geometries into three-space.

A relation ``l(r)`` between geodesic distance ``l`` and embedding radius ``r``
fixes a height profile ``h`` with ``l'^2 = 1 + h'^2``.  The surface of
revolution ``(r cos phi, r sin phi, h(r))`` then carries the metric
``dl^2 + r(l)^2 dphi^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .curvature_field import lambert_w0
from .errors import DomainError
from .integration import QuadratureConfig, quad

__all__ = [
    "ArclengthRelation",
    "lambert_relation",
    "flat_relation",
    "profile_slope",
    "profile_from_arclength",
    "profile_second_derivative",
    "ProfileCache",
    "immerse",
    "immersed_arclength",
    "polyline_length",
]

E = math.e
PROFILE_CFG = QuadratureConfig(abs_tol=1e-13, rel_tol=1e-13)
SLOPE_TOL = 1e-12


@dataclass(frozen=True)
class ArclengthRelation:
    """``l(r)``, ``l'(r)`` and the inverse ``r(l)``; ``l_second`` is optional."""

    l_of_r: Callable
    l_prime: Callable
    r_of_l: Callable
    l_second: Optional[Callable] = None
    name: str = "custom"

    def f(self, r):
        """Radial metric factor ``f(r) = l'(r)^2`` of ``ds^2 = f dr^2 + r^2 dphi^2``."""
        return np.asarray(self.l_prime(r), dtype=float) ** 2


def lambert_relation() -> ArclengthRelation:
    """``l = (e+r) ln(e+r) - e - r`` with inverse ``r = l/W0(l/e) - e``."""

    def l_of_r(r):
        s = E + np.asarray(r, dtype=float)
        return s * np.log(s) - s

    def r_of_l(l):
        l = np.asarray(l, dtype=float)
        # l/W0(l/e) = e exp(W0(l/e)), exact at l = 0
        return E * np.expm1(lambert_w0(l / E))

    return ArclengthRelation(
        l_of_r,
        lambda r: np.log(E + np.asarray(r, dtype=float)),
        r_of_l,
        lambda r: 1.0 / (E + np.asarray(r, dtype=float)),
        "lambert",
    )


def flat_relation() -> ArclengthRelation:
    ident = lambda r: np.asarray(r, dtype=float) * 1.0
    return ArclengthRelation(ident, lambda r: np.ones_like(np.asarray(r, dtype=float)), ident,
                             lambda r: np.zeros_like(np.asarray(r, dtype=float)), "flat")


def profile_slope(rel: ArclengthRelation, r, sign: float = -1.0):
    """``h'(r) = sign * sqrt(l'(r)^2 - 1)``."""
    lp = np.asarray(rel.l_prime(r), dtype=float)
    if np.any(lp < 1.0 - SLOPE_TOL):
        raise DomainError("arclength relation has l'(r) < 1")
    return sign * np.sqrt(np.maximum(lp * lp - 1.0, 0.0))


def profile_from_arclength(rel: ArclengthRelation, r: float, cfg: QuadratureConfig = PROFILE_CFG,
                           sign: float = -1.0) -> float:
    """``h(r) = sign * int_0^r sqrt(l'^2 - 1)``, integrated in ``rho = r u^2``.

    The substitution removes the square-root behaviour of the integrand
    where ``l'`` touches one.
    """
    if r < 0:
        raise DomainError("radius must be non-negative")
    if r == 0:
        return 0.0
    return quad(lambda u: profile_slope(rel, r * u * u, sign) * 2.0 * r * u, 0.0, 1.0, cfg, vectorized=True)


def profile_second_derivative(rel: ArclengthRelation, r, sign: float = -1.0):
    """``h''(r) = sign * l' l'' / sqrt(l'^2 - 1)``; finite differences when ``l''`` is absent."""
    r = np.asarray(r, dtype=float)
    if rel.l_second is None:
        step = 1e-5 * np.maximum(r, 1e-3)
        return (profile_slope(rel, r + step, sign) - profile_slope(rel, r - step, sign)) / (2.0 * step)
    lp = np.asarray(rel.l_prime(r), dtype=float)
    root = np.sqrt(lp * lp - 1.0)
    with np.errstate(divide="ignore"):
        return sign * lp * np.asarray(rel.l_second(r), dtype=float) / root


@dataclass
class ProfileCache:
    """Profile tabulated once on ``[0, r_max]`` and interpolated by cubic Hermite pieces.

    Nodes are quadratically graded towards the origin where ``h`` is least
    smooth.  Values and slopes at the nodes are exact up to quadrature.
    """

    rel: ArclengthRelation
    r_max: float
    nodes: int = 401
    sign: float = -1.0
    _spline: CubicHermiteSpline = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.r_max <= 0:
            raise DomainError("r_max must be positive")
        r = self.r_max * np.linspace(0.0, 1.0, self.nodes) ** 2
        h = np.array([profile_from_arclength(self.rel, float(t), sign=self.sign) for t in r])
        self._spline = CubicHermiteSpline(r, h, profile_slope(self.rel, r, self.sign))

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < 0) or np.any(r > self.r_max * (1 + 1e-12)):
            raise DomainError("radius outside the cached range")
        out = self._spline(r)
        return out if np.ndim(out) else float(out)


def immerse(rel: ArclengthRelation, r, phi, cfg: QuadratureConfig = PROFILE_CFG,
            sign: float = -1.0, cache: Optional[ProfileCache] = None) -> Tuple:
    """Point ``(r cos phi, r sin phi, h(r))`` on the surface of revolution."""
    r_arr = np.asarray(r, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if cache is not None:
        h = cache(r_arr)
    elif r_arr.ndim == 0:
        h = profile_from_arclength(rel, float(r_arr), cfg, sign)
    else:
        h = np.vectorize(lambda t: profile_from_arclength(rel, float(t), cfg, sign))(r_arr)
    out = (r_arr * np.cos(phi), r_arr * np.sin(phi), np.asarray(h, dtype=float))
    if all(np.ndim(v) == 0 for v in out):
        return tuple(float(v) for v in out)
    return out


def immersed_arclength(rel: ArclengthRelation, r: float, cfg: QuadratureConfig = PROFILE_CFG,
                       sign: float = -1.0) -> float:
    """Length of the meridian ``rho -> (rho, h(rho))`` from 0 to ``r``: ``int sqrt(1 + h'^2)``."""
    if r <= 0:
        return 0.0
    return quad(lambda u: np.sqrt(1.0 + profile_slope(rel, r * u * u, sign) ** 2) * 2.0 * r * u,
                0.0, 1.0, cfg, vectorized=True)


def polyline_length(points: Sequence[Sequence[float]]) -> float:
    """Sum of Euclidean distances between consecutive 3-space points."""
    p = np.asarray(points, dtype=float)
    if p.shape[0] < 2:
        return 0.0
    return float(np.sum(np.linalg.norm(np.diff(p, axis=0), axis=1)))
