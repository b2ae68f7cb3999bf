"""Cosine and sine laws on surfaces of constant curvature and their small-scale expansions.

The generalized trigonometric functions are

    cos_K(a) = cos(sqrt(K) a),            sin_K(a) = sin(sqrt(K) a) / sqrt(K)       (K > 0)
    cos_K(a) = cosh(sqrt(-K) a),          sin_K(a) = sinh(sqrt(-K) a) / sqrt(-K)    (K < 0)

with the common power series used whenever |K| a^2 is tiny.  The cosine law
reads ``cos_K c = cos_K a cos_K b + K sin_K a sin_K b cos(gamma)``.

The expansions treat every input as a truncated series in a global scale
parameter ``eps``: ``a = a1 eps + a2 eps^2 + a3 eps^3`` and likewise for ``b``
and ``gamma = gamma0 + gamma1 eps + gamma2 eps^2``.  The outputs are the
coefficients of ``c = c1 eps + c2 eps^2 + c3 eps^3`` and of the angle
``alpha = alpha0 + alpha1 eps + alpha2 eps^2`` opposite ``a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

from .errors import BranchError, DegenerateTriangleError, DomainError

__all__ = [
    "SERIES_SWITCH",
    "CLAMP_TOL",
    "ExpansionInputs",
    "ExpansionResult",
    "cos_k",
    "sin_k",
    "law_c",
    "law_sc",
    "expand",
    "c_expand",
    "sc_expand",
    "series_value",
    "asin_series",
]

# Below this value of |K| * length^2 the power series branch is used.
SERIES_SWITCH = 1e-6
# Overshoot of an inverse trig argument that is silently clamped.
CLAMP_TOL = 1e-12
# Smallest admissible leading side length y of an expanded triangle.
DEGENERATE_TOL = 1e-14

Branch = Literal["principal", "side"]


def _use_series(K: float, *lengths: float) -> bool:
    scale = max((abs(x) for x in lengths), default=0.0)
    return abs(K) * scale * scale < SERIES_SWITCH


def cos_k(K: float, a: float) -> float:
    """Generalized cosine ``cos_K(a)``; the sign of ``K`` selects the branch."""
    if _use_series(K, a):
        t = -K * a * a
        return 1.0 + t / 2.0 * (1.0 + t / 12.0 * (1.0 + t / 30.0 * (1.0 + t / 56.0)))
    if K > 0:
        return math.cos(math.sqrt(K) * a)
    return math.cosh(math.sqrt(-K) * a)


def sin_k(K: float, a: float) -> float:
    """Generalized sine ``sin_K(a)``; equals ``a`` in the flat limit."""
    if _use_series(K, a):
        t = -K * a * a
        return a * (1.0 + t / 6.0 * (1.0 + t / 20.0 * (1.0 + t / 42.0 * (1.0 + t / 72.0))))
    if K > 0:
        r = math.sqrt(K)
        return math.sin(r * a) / r
    r = math.sqrt(-K)
    return math.sinh(r * a) / r


def _clamp_unit(x: float, what: str) -> float:
    if x > 1.0:
        if x - 1.0 > CLAMP_TOL:
            raise DomainError(f"{what}: argument {x!r} exceeds 1")
        return 1.0
    if x < -1.0:
        if -1.0 - x > CLAMP_TOL:
            raise DomainError(f"{what}: argument {x!r} below -1")
        return -1.0
    return x


def _asin_k(K: float, s: float) -> float:
    """Inverse of ``sin_K`` on its principal range."""
    if _use_series(K, s):
        t = K * s * s
        return s * (1.0 + t / 6.0 + 3.0 * t * t / 40.0 + 5.0 * t ** 3 / 112.0)
    if K > 0:
        r = math.sqrt(K)
        return math.asin(_clamp_unit(r * s, "law_c")) / r
    r = math.sqrt(-K)
    return math.asinh(r * s) / r


def law_c(K: float, gamma: float, a: float, b: float) -> float:
    """Side opposite the angle ``gamma`` enclosed by sides ``a`` and ``b``.

    Evaluated in haversine form, ``V(c) = V(a - b) + 2 sin_K a sin_K b sin^2(gamma/2)``
    with ``V(x) = (1 - cos_K x) / K = 2 sin_K(x/2)^2``.  This is algebraically
    the cosine law but stays accurate for thin triangles and small ``K``.
    """
    if a < 0 or b < 0:
        raise DomainError("law_c: side lengths must be non-negative")
    if K > 0:
        limit = math.pi / math.sqrt(K) * (1.0 + CLAMP_TOL)
        if a > limit or b > limit:
            raise DomainError("law_c: side longer than half a great circle")
    h = sin_k(K, (a - b) / 2.0)
    v = 2.0 * h * h + 2.0 * sin_k(K, a) * sin_k(K, b) * math.sin(gamma / 2.0) ** 2
    if v < 0:
        if v < -CLAMP_TOL * max(1.0, a * a + b * b):
            raise DomainError("law_c: negative haversine")
        v = 0.0
    return 2.0 * _asin_k(K, math.sqrt(v / 2.0))


def law_sc(K: float, gamma: float, a: float, b: float, branch: Branch = "principal") -> float:
    """Angle opposite ``a`` in the triangle with sides ``a``, ``b`` enclosing ``gamma``.

    ``branch="principal"`` returns the arcsine value in ``[0, pi/2]``;
    ``branch="side"`` returns its supplement.
    """
    if branch not in ("principal", "side"):
        raise ValueError(f"unknown branch {branch!r}")
    sg = math.sin(gamma)
    if abs(sg) < 1e-15:
        raise DomainError("law_sc: gamma must not be a multiple of pi")
    c = law_c(K, gamma, a, b)
    sc = sin_k(K, c)
    sa = sin_k(K, a)
    if sa == 0.0:
        angle = 0.0
    else:
        if sc == 0.0:
            raise DegenerateTriangleError("law_sc: opposite side vanishes")
        angle = math.asin(_clamp_unit(sa * sg / sc, "law_sc"))
    return angle if branch == "principal" else math.pi - angle


@dataclass(frozen=True)
class ExpansionInputs:
    """Series coefficients of the two sides and the enclosed angle."""

    a_coeffs: Sequence[float]
    b_coeffs: Sequence[float]
    gamma0: float
    gamma_coeffs: Sequence[float] = (0.0, 0.0)
    K: float = 1.0
    epsilon: float = 1.0

    def __post_init__(self) -> None:
        if len(self.a_coeffs) != 3 or len(self.b_coeffs) != 3 or len(self.gamma_coeffs) != 2:
            raise ValueError("expected three side coefficients and two angle coefficients")


@dataclass(frozen=True)
class ExpansionResult:
    c_coeffs: tuple[float, float, float]
    alpha_coeffs: tuple[float, float, float]
    diagnostics: dict = field(default_factory=dict)


def _cos_coeffs(p: ExpansionInputs) -> tuple[float, float, float, float]:
    """Leading side ``y`` and the reduced coefficients ``x = C3/K``, ``z = C4/K``."""
    a1, a2, a3 = p.a_coeffs
    b1, b2, b3 = p.b_coeffs
    g1, g2 = p.gamma_coeffs
    K = p.K
    cg, sg = math.cos(p.gamma0), math.sin(p.gamma0)
    y2 = a1 * a1 + b1 * b1 - 2.0 * a1 * b1 * cg
    if y2 <= DEGENERATE_TOL ** 2:
        raise DegenerateTriangleError("expansion: leading side vanishes")
    y = math.sqrt(y2)
    x = -(b1 * b2 + a1 * a2 - (a1 * b2 + a2 * b1) * cg + a1 * b1 * g1 * sg)
    z = (
        K / 24.0 * (a1 ** 4 + 6.0 * a1 * a1 * b1 * b1 + b1 ** 4 - 4.0 * (a1 ** 3 * b1 + a1 * b1 ** 3) * cg)
        - 0.5 * (a2 * a2 + 2.0 * a1 * a3 + 2.0 * b1 * b3 + b2 * b2)
        + (a1 * b3 + a2 * b2 + a3 * b1 - 0.5 * a1 * b1 * g1 * g1) * cg
        - ((a1 * b2 + a2 * b1) * g1 + a1 * b1 * g2) * sg
    )
    return y, y2, x, z


def expand(p: ExpansionInputs, branch: Branch = "principal") -> ExpansionResult:
    """Coefficients of the cosine-law side and the sine-law angle opposite ``a``."""
    a1, a2, a3 = p.a_coeffs
    g1, g2 = p.gamma_coeffs
    K = p.K
    y, y2, x, z = _cos_coeffs(p)
    c1 = y
    c2 = -x / y
    c3 = y * (K * y2 / 24.0 - z / y2 - x * x / (2.0 * y2 * y2))

    cg, sg = math.cos(p.gamma0), math.sin(p.gamma0)
    q = a2 + a1 * x / y2
    s0 = a1 * sg / y
    s1 = (q * sg + a1 * g1 * cg) / y
    s2 = (
        K / 6.0 * (0.75 * a1 * y2 - a1 ** 3) * sg
        + (a1 * g2 + q * g1) * cg
        + (a3 + a2 * x / y2 + a1 * (z / y2 + 1.5 * x * x / (y2 * y2) - 0.5 * g1 * g1)) * sg
    ) / y
    w = 1.0 - s0 * s0
    if w <= 1e-14:
        raise BranchError("sc_expand: turning point, leading sine equals one")
    rw = math.sqrt(w)
    al0 = math.asin(s0)
    al1 = s1 / rw
    al2 = s2 / rw + s0 * s1 * s1 / (2.0 * w * rw)
    if branch == "side":
        al0, al1, al2 = math.pi - al0, -al1, -al2
    elif branch != "principal":
        raise ValueError(f"unknown branch {branch!r}")
    diag = {"y": y, "x": x, "z": z, "S0": s0, "S1": s1, "S2": s2}
    return ExpansionResult((c1, c2, c3), (al0, al1, al2), diag)


def c_expand(p: ExpansionInputs) -> tuple[float, float, float]:
    """``[c1, c2, c3]`` of the cosine-law side."""
    return expand(p).c_coeffs


def sc_expand(p: ExpansionInputs, branch: Branch = "principal") -> tuple[float, float, float]:
    """``[alpha0, alpha1, alpha2]`` of the angle opposite ``a``."""
    return expand(p, branch).alpha_coeffs


def series_value(coeffs: Sequence[float], eps: float, start: int) -> float:
    """Evaluate ``sum_n coeffs[n] * eps**(n + start)``."""
    return sum(cf * eps ** (n + start) for n, cf in enumerate(coeffs))


def asin_series(y: float, n_terms: int) -> float:
    """Partial sum of ``asin(y) = sum_k (2k)! / (4^k (k!)^2) * y^(2k+1) / (2k+1)``."""
    if abs(y) >= 1.0:
        raise DomainError("asin_series: |y| must be below 1")
    total = 0.0
    coef = 1.0  # (2k)! / (4^k (k!)^2)
    power = y
    for k in range(n_terms):
        total += coef * power / (2 * k + 1)
        coef *= (2 * k + 1) / (2 * k + 2)
        power *= y * y
    return total
