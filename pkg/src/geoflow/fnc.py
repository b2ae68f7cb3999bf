"""Direction parametrization, angular solutions in three dimensions and metric reconstruction."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .curvature_field import CurvatureField
from .errors import DegenerateTriangleError, DomainError
from .fundamental_solution import constant_curvature_sample, geodesic_sample
from .integration import QuadratureConfig

__all__ = [
    "AngularParams",
    "PlaneParams",
    "MetricDiag",
    "omega",
    "omega_inverse",
    "angle_between",
    "rot_x",
    "rot_z",
    "solve_angles_3d",
    "solve_angles_3d_rotation",
    "plane_quadratic",
    "phi_K_branches",
    "curvature_plane",
    "curvature_plane_printed",
    "curvature_plane_rotation",
    "metric_from_solution",
    "gauss_from_metric",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class AngularParams:
    phi: float
    thetas: Tuple[float, ...] = ()

    @property
    def dim(self) -> int:
        return len(self.thetas) + 2


@dataclass(frozen=True)
class PlaneParams:
    phi_K: float
    theta_K: float
    tau: float


@dataclass(frozen=True)
class MetricDiag:
    g_ll: float
    g_phiphi: float
    g_thetatheta: Optional[float] = None


def omega(params: AngularParams) -> np.ndarray:
    """Unit direction vector of the nested angular parametrization."""
    phi, th = params.phi, params.thetas
    n = params.dim
    out = np.empty(n)
    sp = math.sin(phi)
    out[0] = math.cos(phi)
    prod = sp
    for m, t in enumerate(th):
        out[m + 2] = math.sin(t) * prod
        prod *= math.cos(t)
    out[1] = prod
    return out


def omega_inverse(v: Sequence[float]) -> AngularParams:
    """Angles with ``phi`` in [0, 2 pi) and every theta in (-pi/2, pi/2]."""
    v = np.asarray(v, dtype=float)
    n = v.size
    if n < 2:
        raise DomainError("need at least two components")
    phi = math.acos(max(-1.0, min(1.0, float(v[0]))))
    sgn = 1.0
    if v[1] < 0:
        # negative sin(phi) keeps every cosine of theta positive
        phi = TWO_PI - phi
        sgn = -1.0
    thetas = []
    for m in range(n - 2):
        rest = math.sqrt(v[1] ** 2 + float(np.sum(v[m + 3:] ** 2)))
        thetas.append(math.atan2(sgn * v[m + 2], rest))
    return AngularParams(phi % TWO_PI, tuple(thetas))


def angle_between(u: Sequence[float], v: Sequence[float]) -> float:
    """Great-circle angle ``acos(u . v)`` between two unit directions."""
    d = float(np.dot(u, v))
    return math.acos(max(-1.0, min(1.0, d)))


def rot_x(t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_z(t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _canonical(phi: float, theta: float) -> Tuple[float, float]:
    """Map ``(phi, theta)`` with theta in (-pi, pi] onto theta in (-pi/2, pi/2]."""
    if theta > math.pi / 2:
        theta -= math.pi
        phi = TWO_PI - phi
    elif theta <= -math.pi / 2:
        theta += math.pi
        phi = TWO_PI - phi
    return phi % TWO_PI, theta


def solve_angles_3d(omega_p: Sequence[float], alpha1: float, alpha2: float) -> Tuple[float, float]:
    """Direction ``(phi, theta)`` of the opening direction ``Omega(alpha1, alpha2)`` moved to ``Omega_p``."""
    p = omega_inverse(omega_p)
    phi_p, th_p = p.phi, p.thetas[0]
    ca = math.cos(alpha1) * math.cos(phi_p) - math.sin(alpha1) * math.sin(phi_p) * math.cos(alpha2)
    ct = math.cos(alpha1) * math.sin(phi_p) + math.sin(alpha1) * math.cos(phi_p) * math.cos(alpha2)
    s = math.sin(alpha1) * math.sin(alpha2)
    phi = math.atan2(math.sqrt(max(0.0, (1.0 - ca) * (1.0 + ca))), ca)
    theta = math.atan2(math.sin(th_p) * ct + math.cos(th_p) * s, math.cos(th_p) * ct - math.sin(th_p) * s)
    if math.sin(phi) == 0.0:
        return phi % TWO_PI, 0.0
    return _canonical(phi, theta)


def solve_angles_3d_rotation(omega_p: Sequence[float], alpha1: float, alpha2: float) -> Tuple[float, float]:
    """Rotation-matrix reference for :func:`solve_angles_3d`."""
    p = omega_inverse(omega_p)
    v = rot_x(p.thetas[0]) @ rot_z(p.phi) @ omega(AngularParams(alpha1, (alpha2,)))
    q = omega_inverse(v)
    return q.phi, q.thetas[0]


def _wrap_half(t: float) -> float:
    """Representative of ``t`` modulo pi in (-pi/2, pi/2]."""
    t = math.fmod(t, math.pi)
    if t > math.pi / 2:
        t -= math.pi
    elif t <= -math.pi / 2:
        t += math.pi
    return t


def _plane_normal(phi_K: float, theta_K: float) -> np.ndarray:
    st = math.sin(theta_K)
    return np.array([math.sin(phi_K) * st, -math.cos(phi_K) * st, math.cos(theta_K)])


def _tilted_frame(phi_p: float, theta_p: float, alpha2: float):
    """``Omega_p`` and the unit tangent there at angle ``alpha2 - theta_p`` from the meridian."""
    sp, cp = math.sin(phi_p), math.cos(phi_p)
    st, ct = math.sin(theta_p), math.cos(theta_p)
    d = alpha2 - theta_p
    om = np.array([cp, ct * sp, st * sp])
    meridian = np.array([-sp, cp * ct, cp * st])
    side = np.array([0.0, -st, ct])
    return om, math.cos(d) * meridian + math.sin(d) * side


def plane_quadratic(phi_p: float, theta_p: float, alpha2: float) -> Tuple[float, float, float]:
    """Coefficients of ``A sin^2(phi_K) + B sin(2 phi_K) = C``."""
    sp = math.sin(phi_p)
    sd = math.sin(alpha2 - theta_p)
    A = math.sin(theta_p) ** 2 / (sd * sd) + sp * sp * (math.cos(theta_p) ** 2 + 1.0) - 1.0
    B = 0.5 * math.sin(2.0 * phi_p) * math.cos(theta_p)
    return A, B, sp * sp


def phi_K_branches(phi_p: float, theta_p: float, alpha2: float) -> Tuple[float, float]:
    """Both roots in [0, pi); the first is the one selected by the sign of ``B``."""
    A, B, C = plane_quadratic(phi_p, theta_p, alpha2)
    root = math.sqrt(max(0.0, B * B + (A - C) * C))
    if B >= 0:
        first, second = math.atan2(C, B + root), math.atan2(C, B - root)
    else:
        first, second = math.atan2(C, B - root), math.atan2(C, B + root)
    return first % math.pi, second % math.pi


def curvature_plane(phi_p: float, theta_p: float, alpha2: float) -> PlaneParams:
    """Orientation ``(phi_K, theta_K)`` of the geodesic plane and the rotation length ``tau``.

    The plane is ``R_x(theta_p) R_z(phi_p) R_x(alpha2 - theta_p)`` applied to
    the original plane, rewritten as ``R_z(phi_K) R_x(theta_K)``.  The
    squared sine and cosine laws give two roots for ``phi_K`` and an arcsine
    for ``theta_K``; the candidate whose plane holds ``Omega_p`` together with
    the tilted tangent there is returned.
    """
    om, t = _tilted_frame(phi_p, theta_p, alpha2)
    sp = math.sin(phi_p)
    sd = math.sin(alpha2 - theta_p)
    if abs(sp) < 1e-12 or abs(sd) < 1e-12:
        # one of the sine-law ratios is 0/0: read the plane off its normal
        n = np.cross(om, t)
        if n[2] < 0 or (n[2] == 0 and (n[0] < 0 or (n[0] == 0 and n[1] > 0))):
            n = -n
        st = math.hypot(n[0], n[1])
        theta_K = math.atan2(st, n[2])
        phi_K = math.atan2(n[0], -n[1]) if st > 0 else 0.0
        if phi_K < 0:
            phi_K += math.pi
            theta_K = -theta_K
        if phi_K >= math.pi:
            phi_K -= math.pi
            theta_K = -theta_K
        if theta_K <= -math.pi / 2:
            theta_K += math.pi
        candidates = [(phi_K, theta_K)]
    else:
        # angle cosine law at the foot of the plane keeps theta_K well conditioned near +-pi/2
        d = alpha2 - theta_p
        cos_K = abs(math.cos(theta_p) * math.cos(d) - math.sin(theta_p) * sd * math.cos(phi_p))
        candidates = []
        for phi_K in phi_K_branches(phi_p, theta_p, alpha2):
            s_phiK = math.sin(phi_K)
            if s_phiK == 0.0:
                continue
            th = math.atan2(abs(sp * sd / s_phiK), cos_K)
            candidates += [(phi_K, th), (phi_K, -th)]
    best = min(candidates, key=lambda c: abs(_plane_normal(*c) @ om) + abs(_plane_normal(*c) @ t))
    phi_K, theta_K = best
    if phi_K > math.pi - 1e-12:
        phi_K, theta_K = 0.0, -theta_K
    if theta_K <= -math.pi / 2 + 1e-15 and abs(math.cos(theta_K)) < 1e-15:
        theta_K = math.pi / 2
    q = np.array([math.cos(phi_K), math.sin(phi_K), 0.0])
    tau = math.atan2(float(q @ t), float(q @ om))
    return PlaneParams(phi_K, theta_K, tau)


def curvature_plane_printed(phi_p: float, theta_p: float, alpha2: float) -> PlaneParams:
    """Single-branch form: ``phi_K`` by the sign of ``B``, principal arcsine, sign-adjusted ``tau``."""
    phi_K = phi_K_branches(phi_p, theta_p, alpha2)[0]
    sp, sd = math.sin(phi_p), math.sin(alpha2 - theta_p)
    s_phiK = math.sin(phi_K)
    theta_K = math.asin(max(-1.0, min(1.0, sp * sd / s_phiK)))
    sgn = math.copysign(1.0, theta_p * alpha2)
    tau = sgn * math.asin(max(-1.0, min(1.0, math.sin(theta_p) * s_phiK / sd)))
    return PlaneParams(phi_K, theta_K, tau)


def curvature_plane_rotation(phi_p: float, theta_p: float, alpha2: float) -> Tuple[float, float]:
    """Rotation-matrix reference: the plane normal read back as ``(phi_K, theta_K)``."""
    n = rot_x(theta_p) @ rot_z(phi_p) @ rot_x(alpha2 - theta_p) @ np.array([0.0, 0.0, 1.0])
    # R_z(phi) R_x(theta) e3 = (sin(phi) sin(theta), -cos(phi) sin(theta), cos(theta)), up to sign
    best = None
    for sgn in (1.0, -1.0):
        m = sgn * n
        theta = math.acos(max(-1.0, min(1.0, m[2])))
        for th in (theta, -theta):
            if not -math.pi / 2 < th <= math.pi / 2 + 1e-15:
                continue
            s = math.sin(th)
            phi = math.atan2(m[0] / s, -m[1] / s) if abs(s) > 1e-15 else 0.0
            if -1e-15 <= phi < math.pi:
                best = (max(phi, 0.0), th)
    if best is None:
        raise DegenerateTriangleError("plane normal not representable")
    return best


def _derivative(fun: Callable[[float], float], h: float) -> float:
    """Central difference with one Richardson level."""
    d1 = (fun(h) - fun(-h)) / (2.0 * h)
    d2 = (fun(h / 2) - fun(-h / 2)) / h
    return (4.0 * d2 - d1) / 3.0


def metric_from_solution(fld: CurvatureField, p: Tuple[float, float],
                         cfg: Optional[QuadratureConfig] = None, solution: str = "auto",
                         rel_step: float = 1e-4) -> MetricDiag:
    """``g_phiphi`` at ``p`` from the geodesic leaving ``p`` in increasing-phi direction.

    ``solution="exact"`` uses the constant-curvature laws (constant fields
    only); ``"series"`` uses the second-order fundamental solution; ``"auto"``
    picks the exact laws whenever the field is constant.
    """
    l_p, phi_p = p
    if l_p <= 0:
        raise DomainError("metric needs l_p > 0")
    if solution == "auto":
        solution = "exact" if fld.constant is not None else "series"
    if solution == "exact":
        if fld.constant is None:
            raise DomainError("exact solution requires a constant field")
        K = fld.constant

        def sample(lam):
            return constant_curvature_sample(K, p, math.pi / 2, lam)
    elif solution == "series":
        cfg = cfg or QuadratureConfig(abs_tol=1e-13, rel_tol=1e-13)

        def sample(lam):
            return geodesic_sample(fld, p, math.pi / 2, lam, cfg, allow_unsafe_beta=True)
    else:
        raise ValueError(f"unknown solution {solution!r}")
    h = rel_step * max(1.0, l_p)
    cache = {}

    def s(lam):
        if lam not in cache:
            cache[lam] = sample(lam)
        return cache[lam]

    ldot = _derivative(lambda t: s(t)[0], h)
    phidot = _derivative(lambda t: s(t)[1], h)
    if abs(phidot) < 1e-12:
        raise DegenerateTriangleError("angular velocity vanishes")
    return MetricDiag(1.0, (1.0 - ldot * ldot) / (phidot * phidot))


def gauss_from_metric(g_phiphi_profile: Callable[[float], float], l: float, h: float = 1e-3) -> float:
    """``K = -r''/r`` with ``r = sqrt(g_phiphi)``, second derivative by central differences."""
    r = lambda x: math.sqrt(g_phiphi_profile(x))
    r0 = r(l)
    if abs(r0) < 1e-14:
        raise DegenerateTriangleError("radius function vanishes")
    d2 = (r(l + h) - 2.0 * r0 + r(l - h)) / (h * h)
    return -d2 / r0
