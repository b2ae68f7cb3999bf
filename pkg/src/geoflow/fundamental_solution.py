"""Second-order top line, top angle and opening angle of a geodesic triangle.

The triangle (o, q, p) has base line c from o to q and side line a leaving q
under the direction angle beta.  Its top line b runs from o to p, the opening
angle alpha sits at o and the top angle gamma at p.  The second-order terms are
linear functionals of the curvature field, written as nested integrals over
the index field ``K[i, j]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from .curvature_field import CurvatureField, GeometryHelpers, IndexField
from .curved_trig import law_c, law_sc
from .errors import DomainError
from .integration import DEFAULT, QuadratureConfig, quad

__all__ = [
    "TriangleSpec",
    "FundamentalResult",
    "zeroth_order",
    "top_line_b2",
    "top_angle_gamma2",
    "opening_angle_alpha2",
    "fundamental_solution",
    "sphere_closed_form",
    "geodesic_sample",
    "constant_curvature_sample",
]


@dataclass(frozen=True)
class TriangleSpec:
    a: float
    c: float
    beta: float
    base_point_phi: float = 0.0
    allow_unsafe_beta: bool = False

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.c > 0):
            raise DomainError("a and c must be positive")
        if not 0.0 <= self.beta < math.pi / 2 and not self.allow_unsafe_beta:
            raise DomainError("beta must lie in [0, pi/2); pass allow_unsafe_beta to override")


@dataclass
class FundamentalResult:
    b0: float
    b2: float
    gamma0: float
    gamma2: float
    alpha0: float
    alpha2: float
    diagnostics: dict = field(default_factory=dict)


def _zeroth(a: float, c: float, beta: float) -> Tuple[float, float, float]:
    b0 = math.sqrt(a * a + c * c + 2.0 * a * c * math.cos(beta))
    al0 = math.asin(max(-1.0, min(1.0, a * math.sin(beta) / b0)))
    g0 = math.asin(max(-1.0, min(1.0, c * math.sin(beta) / b0)))
    return b0, al0, g0


def zeroth_order(spec: TriangleSpec) -> Tuple[float, float, float]:
    """Euclidean ``(b0, alpha0, gamma0)``."""
    return _zeroth(spec.a, spec.c, spec.beta)


class _Integrals:
    """Nested integrals of one triangle; inner k-integrals are vectorized."""

    def __init__(self, fld: CurvatureField, a: float, c: float, beta: float, phi_p: float,
                 cfg: QuadratureConfig):
        self.K = IndexField(fld, a, c, beta, phi_p)
        self.g = GeometryHelpers(a, c, beta)
        self.a, self.cfg = a, cfg

    def G(self, t):
        """``int_0^1 k^2 K[k, t] dk`` for an array of ``t``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return quad(lambda k: (k * k)[:, None] * self.K(k[:, None], t[None, :]),
                    0.0, 1.0, self.cfg, vectorized=True)

    def H(self, n, j: float):
        """``n^-2 int_0^n k^2 K[k, j] dk`` written as ``n int_0^1 u^2 K[n u, j] du``."""
        n = np.atleast_1d(np.asarray(n, dtype=float))
        return n * quad(lambda u: (u * u)[:, None] * self.K(u[:, None] * n[None, :], j),
                        0.0, 1.0, self.cfg, vectorized=True)

    def _q(self, f, lo, hi):
        return quad(f, lo, hi, self.cfg, vectorized=True)

    def b2(self) -> float:
        g = self.g
        inner = self._q(lambda n: n * self.G(1.0 - n), 0.0, 1.0)
        return -g.f ** 2 / float(g.y(1.0)) * inner

    def gamma2(self) -> float:
        g = self.g
        y1 = float(g.y(1.0))
        w = self.a * g.z(1.0) / (y1 * y1)
        return g.f * self._q(lambda n: (1.0 - n * w) * self.G(1.0 - n), 0.0, 1.0)

    def alpha2(self) -> float:
        g, a = self.g, self.a
        f2 = g.f ** 2

        def outer(j: float) -> float:
            first = self._q(lambda n: self.H(n, j), 0.0, 1.0)
            y2 = float(g.y(j)) ** 2
            z = g.z(j)
            c0 = a * z / y2
            c1 = (f2 - a * a * z * z) / (y2 * y2)
            second = self._q(lambda n: (c0 + n * c1) * self.G(j - n), 0.0, j)
            return first + second

        return g.f * quad(outer, 0.0, 1.0, self.cfg)


def _second_order(fld: CurvatureField, a: float, c: float, beta: float, phi_p: float,
                  cfg: QuadratureConfig) -> Tuple[float, float, float]:
    if a == 0.0 or math.sin(beta) == 0.0:
        return 0.0, 0.0, 0.0
    I = _Integrals(fld, a, c, beta, phi_p, cfg)
    return I.b2(), I.gamma2(), I.alpha2()


def top_line_b2(fld: CurvatureField, spec: TriangleSpec, cfg: QuadratureConfig = DEFAULT) -> float:
    """``-f^2/y(1) int_0^1 n int_0^1 k^2 K[k, 1-n] dk dn``."""
    if math.sin(spec.beta) == 0.0:
        return 0.0
    return _Integrals(fld, spec.a, spec.c, spec.beta, spec.base_point_phi, cfg).b2()


def top_angle_gamma2(fld: CurvatureField, spec: TriangleSpec, cfg: QuadratureConfig = DEFAULT) -> float:
    """``f int_0^1 (1 - n a z(1)/y(1)^2) int_0^1 k^2 K[k, 1-n] dk dn``."""
    if math.sin(spec.beta) == 0.0:
        return 0.0
    return _Integrals(fld, spec.a, spec.c, spec.beta, spec.base_point_phi, cfg).gamma2()


def opening_angle_alpha2(fld: CurvatureField, spec: TriangleSpec, cfg: QuadratureConfig = DEFAULT) -> float:
    """Opening angle correction as a triple integral over ``j``, ``n`` and ``k``."""
    if math.sin(spec.beta) == 0.0:
        return 0.0
    return _Integrals(fld, spec.a, spec.c, spec.beta, spec.base_point_phi, cfg).alpha2()


def fundamental_solution(fld: CurvatureField, spec: TriangleSpec,
                         cfg: QuadratureConfig = DEFAULT) -> FundamentalResult:
    b0, al0, g0 = zeroth_order(spec)
    b2, g2, al2 = _second_order(fld, spec.a, spec.c, spec.beta, spec.base_point_phi, cfg)
    return FundamentalResult(b0, b2, g0, g2, al0, al2, {"abs_tol": cfg.abs_tol})


def sphere_closed_form(K: float, a: float, c: float, beta: float) -> Tuple[float, float, float]:
    """``(b2, gamma2, alpha2)`` for constant curvature ``K``."""
    sb, cb = math.sin(beta), math.cos(beta)
    y2 = a * a + c * c + 2.0 * a * c * cb
    y = math.sqrt(y2)
    b2 = -K * a * a * c * c * sb * sb / (6.0 * y)
    g2 = K * a * c * sb * (a * a + 2.0 * c * c + 3.0 * a * c * cb) / (6.0 * y2)
    al2 = K * a * c * sb * (2.0 * a * a + c * c + 3.0 * a * c * cb) / (6.0 * y2)
    return b2, g2, al2


def geodesic_sample(fld: CurvatureField, p: Tuple[float, float], beta: float, lam: float,
                    cfg: QuadratureConfig = DEFAULT, allow_unsafe_beta: bool = False) -> Tuple[float, float]:
    """Point ``(l, phi)`` reached after arclength ``lam`` from ``p`` under direction angle ``beta``.

    ``beta`` is measured against the continuation of the geodesic from o
    through p.  A negative ``lam`` walks the same geodesic backwards.
    """
    l_p, phi_p = p
    if not 0.0 <= beta < math.pi / 2 and not allow_unsafe_beta:
        raise DomainError("beta must lie in [0, pi/2); pass allow_unsafe_beta to override")
    if l_p <= 0:
        raise DomainError("base point must lie away from the origin")
    if lam == 0.0:
        return l_p, phi_p
    b0, al0, _ = _zeroth(lam, l_p, beta)
    b2, _, al2 = _second_order(fld, lam, l_p, beta, phi_p, cfg)
    return b0 + b2, phi_p + al0 + al2


def constant_curvature_sample(K: float, p: Tuple[float, float], beta: float, lam: float) -> Tuple[float, float]:
    """Exact counterpart of :func:`geodesic_sample` for a constant field."""
    l_p, phi_p = p
    if lam == 0.0:
        return l_p, phi_p
    s = 1.0 if lam > 0 else -1.0
    ang = math.pi - beta if lam > 0 else beta
    l = law_c(K, ang, abs(lam), l_p)
    if math.sin(beta) == 0.0:
        return l, phi_p
    # obtuse opening angles are not expected for the short steps used here
    return l, phi_p + s * law_sc(K, ang, abs(lam), l_p)
