"""Finite-N spherical triangulation of a geodesic triangle.

The triangle (o, q, p) has base line ``c`` from o to q and side line ``a``
leaving q under the direction angle ``beta``.  It is cut into N slices
Sigma_j = (o, p_{j-1}, p_j) with p_0 = q; the side of every slice has length
``a/N``.  Each slice is cut into N segments of constant curvature by ribs that
stand perpendicular on the slice base.  Slice j has base line
``c^j = c0^j + c2^j eps^2`` and direction angle ``beta^j = beta0^j + beta2^j eps^2``
with ``eps = 1/N``; its top line and top angle are the base line and
direction angle of slice j+1.

All second-order quantities are linear in the curvature samples
``K[i, j]`` taken at the lower-left corner of segment i in slice j.  The
explicit solved forms of the intra-slice recursions are used for evaluation;
:func:`segment_pieces` re-derives every segment from the generic small-triangle
expansions and serves as the independent check.

Indexing convention: arrays indexed by a segment or rib number ``i`` have
length ``N + 1`` and ignore the entries that do not exist for that quantity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.special import digamma

from .curvature_field import CurvatureField
from .curved_trig import ExpansionInputs, expand
from .errors import DomainError
from .fundamental_solution import FundamentalResult, TriangleSpec, zeroth_order

__all__ = [
    "Substitutes",
    "SliceResult",
    "CrossSliceState",
    "substitutes",
    "harmonic_tail",
    "recursion_params",
    "recursion_params_direct",
    "rib_lines",
    "rib_lines_recursive",
    "zeroth_order_ribs",
    "slice_second_order",
    "segment_pieces",
    "solve_slice_reference",
    "delta_residual",
    "curvature_samples",
    "cross_slice",
    "oqvw_direct",
    "oqvw_explicit",
    "triangulate",
    "slice_geometry",
    "closure_mismatch",
    "closure_bound",
    "sphere_vertex_mismatch",
    "telescoping_product",
]


def _check_n(N: int) -> None:
    if N <= 3:
        raise DomainError("triangulation needs N > 3")


def harmonic_tail(N: int) -> float:
    """``I_N = sum_{i=2}^{N-2} 1/(i+1) = psi(N) + gamma_E - 3/2``."""
    return float(digamma(N) + np.euler_gamma - 1.5)


@dataclass(frozen=True)
class Substitutes:
    """Substitutes of slice j, all expressed through the original a, c, beta."""

    N: int
    j: int
    a: float
    c: float
    beta: float
    Y: float  # Y_N^j
    Y_prev: float  # Y_N^{j-1}
    Z: float  # Z_N^j
    X: float  # X_N^j
    e1: float  # e^{1j}
    X1: float  # X_1^j
    Y1: float  # Y_1^j
    c0: float  # c0^j
    beta0: float  # beta0^j
    I_N: float
    f_N: float
    Lambda_N: float
    L: float  # L_N^j

    def e(self, i: int) -> float:
        return i * self.e1

    def k2(self, i: int) -> float:
        """``(k_N^{ij})^2``."""
        return self.X * self.X + (i * self.e1) ** 2

    def k(self, i: int) -> float:
        return math.sqrt(self.k2(i))


def _Y(N: int, j: int, a: float, c: float, beta: float) -> float:
    return math.sqrt(j * j * a * a + N * N * c * c + 2.0 * j * N * a * c * math.cos(beta))


def substitutes(N: int, j: int, a: float, c: float, beta: float) -> Substitutes:
    """Substitutes of slice ``j`` in closed form."""
    _check_n(N)
    if not 1 <= j <= N + 1:
        raise DomainError(f"slice index {j} outside 1..{N + 1}")
    sb, cb = math.sin(beta), math.cos(beta)
    Y = _Y(N, j, a, c, beta)
    Yp = _Y(N, j - 1, a, c, beta)
    Z = j * a + N * c * cb
    Zp = Z - a
    L = Y * Y - a * Z
    X = L / Yp
    e1 = N * a * c * sb / Yp
    X1 = (Yp * Yp + N * a * Zp) / (N * Yp)
    Y1 = _Y(N, N + j - 1, a, c, beta) / N
    c0 = Yp / N
    beta0 = math.asin(min(1.0, N * c * sb / Yp))
    I_N = harmonic_tail(N)
    return Substitutes(
        N=N, j=j, a=a, c=c, beta=beta, Y=Y, Y_prev=Yp, Z=Z, X=X, e1=e1, X1=X1, Y1=Y1,
        c0=c0, beta0=beta0, I_N=I_N, f_N=N * c * a * sb,
        Lambda_N=N * I_N * c * c * (a * sb) ** 2, L=L,
    )


# ---------------------------------------------------------------------------
# intra-slice recursions
# ---------------------------------------------------------------------------


def _curv_terms(s: Substitutes, K: Sequence[float]):
    """``C^i`` (i = 1..N-2) and the segment terms ``calK^i`` (i = 2..N-2)."""
    N = s.N
    X2, Y2, e12 = s.X * s.X, s.Y * s.Y, s.e1 * s.e1
    calK = np.zeros(N + 1)
    for i in range(2, N - 1):
        r = X2 / s.k2(i)
        calK[i] = K[i] * (2 * i * X2 + i * (3.0 + r) * Y2 + (1.0 + i * (i * i - 1) * r) * e12)
    C = np.zeros(N + 1)
    C[1] = K[1] * (X2 + 2.0 * Y2)
    acc = 0.0
    for i in range(2, N - 1):
        acc += i * calK[i]
        C[i] = (2.0 * C[1] + acc) / (i + 1)
    return C, calK


def _as_samples(K_samples: Sequence[float], N: int) -> np.ndarray:
    """Curvature samples as a 1-based array of length N + 1."""
    K = np.asarray(K_samples, dtype=float)
    if K.shape == (N,):
        K = np.concatenate(([0.0], K))
    if K.shape != (N + 1,):
        raise DomainError(f"expected {N} curvature samples, got shape {K.shape}")
    return K


def recursion_params(N: int, j: int, a: float, c: float, beta: float, K_samples) -> dict:
    """Solved recursion parameters of slice ``j``.

    ``b^i = (i+1)/i``, ``A^i = i/(i+1)``, ``D^{ij} = e^{ij}/(i+1)`` and ``C^{ij}``
    from its explicit sum.  ``K_samples`` holds ``K_{1j} .. K_{Nj}``.
    """
    s = substitutes(N, j, a, c, beta)
    K = _as_samples(K_samples, N)
    idx = np.arange(N + 1, dtype=float)
    b = np.zeros(N + 1)
    A = np.zeros(N + 1)
    D = np.zeros(N + 1)
    b[2 : N - 1] = (idx[2 : N - 1] + 1) / idx[2 : N - 1]
    A[1 : N - 1] = idx[1 : N - 1] / (idx[1 : N - 1] + 1)
    D[1 : N - 1] = idx[1 : N - 1] * s.e1 / (idx[1 : N - 1] + 1)
    C, calK = _curv_terms(s, K)
    return {"b": b, "A": A, "D": D, "C": C, "calK": calK, "subs": s}


def recursion_params_direct(N: int, j: int, a: float, c: float, beta: float, K_samples) -> dict:
    """The same parameters from the unsolved recursion through ``B^i``.

    Kept as an independent oracle for :func:`recursion_params`.
    """
    s = substitutes(N, j, a, c, beta)
    K = _as_samples(K_samples, N)
    X2, Y2, e12 = s.X * s.X, s.Y * s.Y, s.e1 * s.e1
    A = np.zeros(N + 1)
    D = np.zeros(N + 1)
    B = np.zeros(N + 1)
    C = np.zeros(N + 1)
    b = np.zeros(N + 1)
    C[1] = K[1] * (X2 + 2.0 * Y2)
    A[1], D[1] = 0.5, s.e1 / 2.0
    for i in range(2, N - 1):
        k2 = s.k2(i)
        ei = s.e(i)
        B[i] = Y2 - A[i - 1] * X2 + D[i - 1] * ei + k2
        b[i] = B[i] / k2
        A[i] = (k2 * (X2 + (i + 1) * e12) / B[i] - i * e12) / X2
        D[i] = ei * (1.0 - k2 / B[i])
        C[i] = k2 / B[i] * C[i - 1] + i * K[i] * (
            (X2 * ((k2 + ei * ei) * A[i - 1] + ei * D[i - 1]) + k2 * (3.0 * Y2 + i * e12) + X2 * Y2) / B[i]
            + X2 - (i - 1) * e12
        )
    return {"b": b, "A": A, "D": D, "B": B, "C": C}


def telescoping_product(m: int, n: int) -> Fraction:
    """``prod_{l=m}^{n} 1/b^l`` in exact arithmetic, with ``b^l = (l+1)/l``."""
    out = Fraction(1)
    for l in range(m, n + 1):
        out *= Fraction(l, l + 1)
    return out


def _rib_factors(s: Substitutes, K: np.ndarray, C: np.ndarray):
    N = s.N
    X2, e12 = s.X * s.X, s.e1 * s.e1
    calKa = np.zeros(N + 1)
    for i in range(2, N - 1):
        Xi = ((5.0 - 1.0 / i) * X2 + i * i * (i + 3) * e12 * e12 / X2 + (5 * i * i + 3) * e12) / s.k2(i)
        Zi = 1.0 + 2.0 * (i + 1) * e12 / X2
        calKa[i] = C[i - 1] / X2 + i * K[i] * Xi + (i + 1) * K[i + 1] * Zi
    return calKa


def _last_rib(s: Substitutes, K: np.ndarray, C: np.ndarray) -> float:
    N, a, c0 = s.N, s.a, s.c0
    cb0 = math.cos(s.beta0)
    X2, Y2, e12 = s.X * s.X, s.Y * s.Y, s.e1 * s.e1
    kl2 = s.k2(N - 1)
    zeta = s.e1 / s.X1 * (2 * a * a + N * c0 * c0 + (2 * N + 1) * a * c0 * cb0)
    chi = (N - 1) * s.e1 / s.X * (a * a + N * c0 * c0 + (N + 1) * a * c0 * cb0 + s.X1 / s.X * Y2) + (
        Y2 * (kl2 + X2) / (kl2 * X2) + (N - 2) / kl2 * (X2 / (N - 1) + (2 * N - 1) * e12)
    ) * c0 * s.e(N - 1)
    pre = (N - 1) * c0 * c0 * s.X1 / (6.0 * s.X * ((N - 1) * c0 + s.X1))
    return pre * (c0 * s.e1 / X2 * C[N - 2] + K[N - 1] * chi + K[N] * zeta)


def rib_lines(N: int, j: int, a: float, c: float, beta: float, K_samples) -> np.ndarray:
    """Third-order rib coefficients ``a3^{ij}``, i = 2..N-1, from the explicit sums."""
    p = recursion_params(N, j, a, c, beta, K_samples)
    s = p["subs"]
    K = _as_samples(K_samples, N)
    calKa = _rib_factors(s, K, p["C"])
    a3 = np.zeros(N + 1)
    a3[N - 1] = _last_rib(s, K, p["C"])
    pre = s.c0 ** 3 * s.e1 / (6.0 * s.X)
    # suffix sums of calKa^n / (n+1)
    tail = 0.0
    for i in range(N - 2, 1, -1):
        tail += calKa[i] / (i + 1)
        a3[i] = pre * i * tail + i / (N - 1) * a3[N - 1]
    return a3


def rib_lines_recursive(N: int, j: int, a: float, c: float, beta: float, K_samples) -> np.ndarray:
    """Rib coefficients from ``a3^i = (pre * calKa^i + a3^{i+1}) / b^i``."""
    p = recursion_params(N, j, a, c, beta, K_samples)
    s = p["subs"]
    K = _as_samples(K_samples, N)
    calKa = _rib_factors(s, K, p["C"])
    a3 = np.zeros(N + 1)
    a3[N - 1] = _last_rib(s, K, p["C"])
    pre = s.c0 ** 3 * s.e1 / (6.0 * s.X)
    for i in range(N - 2, 1, -1):
        a3[i] = (pre * calKa[i] + a3[i + 1]) * i / (i + 1)
    return a3


def zeroth_order_ribs(N: int, a: float, c: float, beta: float) -> np.ndarray:
    """Leading rib coefficients ``a1^i = i c a sin(beta) / (N c + a cos(beta))``."""
    i = np.arange(N + 1, dtype=float)
    out = i * c * a * math.sin(beta) / (N * c + a * math.cos(beta))
    out[0] = out[N] = 0.0
    return out


# ---------------------------------------------------------------------------
# slice solution
# ---------------------------------------------------------------------------


@dataclass
class SliceResult:
    """Interior values and argument-correction coefficients of one slice.

    ``b2_interior`` is the top-line coefficient ``eps * sum_i b3^{ij}``; the
    physical correction of the top line is ``b2 * eps^2``.
    """

    j: int
    b2_interior: float
    gamma2_interior: float
    alpha2_interior: float
    coeff_b_c: float
    coeff_b_beta: float
    coeff_gamma_c: float
    coeff_gamma_beta: float
    coeff_alpha_c: float
    coeff_alpha_beta: float
    rib_a3: np.ndarray
    top_b3: np.ndarray
    C: np.ndarray
    subs: Substitutes
    coeff_b_c_printed: float = 0.0


def slice_second_order(N: int, j: int, a: float, c: float, beta: float, K_samples) -> SliceResult:
    """Second-order solution of slice ``j`` (interior values plus argument coefficients)."""
    p = recursion_params(N, j, a, c, beta, K_samples)
    s: Substitutes = p["subs"]
    K = _as_samples(K_samples, N)
    C = p["C"]
    a3 = rib_lines(N, j, a, c, beta, K_samples)
    c0, X, Y, e1 = s.c0, s.X, s.Y, s.e1
    X2, e12 = X * X, e1 * e1

    b3 = np.zeros(N + 1)
    b3[1] = -(e1 / Y) * (c0 ** 3 * e1 / X * (K[1] / 3.0 + K[2]) - a3[2])
    for i in range(2, N - 1):
        Xb = i + 5 + (i - 1) / i + (i + 3) * e12 / X2
        ei1 = s.e(i + 1)
        k2n = s.k2(i + 1)
        Zb = (i + 2 + e1 * ei1 / X2) * (1.0 + ei1 * ei1 / k2n) + ((i + 1) ** 2 * X2 + (2 * i + 1) * e1 * ei1) / (i * k2n)
        Kb = C[i - 1] / X2 + i * K[i] * Xb + (i + 1) * K[i + 1] * Zb
        b3[i] = -(e1 / ((i + 1) * Y)) * (c0 ** 3 * e1 / (6.0 * X) * i * Kb - a3[i + 1])
    b3[N - 1] = -(c0 * c0 * e12 / (6.0 * Y)) * (
        (N - 1) ** 2 * K[N - 1] * s.X1 / X + (2 * N - 1) * K[N] + 6.0 / (c0 * c0 * e1) * a3[N - 1]
    )
    b2 = b3.sum() / N

    alpha2 = X2 / (2.0 * Y * Y) * (
        c0 * c0 * e1 / (3.0 * X) * (K[1] * (3.0 + 4.0 * e12 / X2) + K[2] * s.k2(2) / X2) + a3[2] / c0
    )
    eN1 = s.e(N - 1)
    Y2, X1, Y1 = Y * Y, s.X1, s.Y1
    ahat = (
        c0 * eN1 / 6.0 * (
            K[N - 1] * X1 / X * (X1 * Y2 - c0 * eN1 * e1)
            + K[N] * c0 * e12 * ((N * c0 * c0 - s.a ** 2) / (Y1 * Y1) - 1.0)
        )
        + X2 * a3[N - 1]
    ) / (X1 * Y2)
    gam = K[N] / 6.0 * c0 * e1 * (Y1 * Y1 + c0 * X1) / (Y1 * Y1)

    cb0 = math.cos(s.beta0)
    return SliceResult(
        j=j,
        b2_interior=b2,
        gamma2_interior=ahat + gam,
        alpha2_interior=alpha2,
        # The exact linear response of the summed top line to c2 is X/Y.
        coeff_b_c=X / Y,
        coeff_b_beta=-c0 * e1 / Y,
        coeff_gamma_c=s.e(N) / Y2,
        coeff_gamma_beta=N * c0 * X / Y2,
        coeff_alpha_c=(s.a * cb0 - X) * e1 / (Y2 * c0),
        coeff_alpha_beta=s.a * s.Z / Y2,
        rib_a3=a3,
        top_b3=b3,
        C=C,
        subs=s,
        coeff_b_c_printed=(X + s.I_N * e12 / (N * X)) / Y,
    )


# ---------------------------------------------------------------------------
# segment-level reference (generic small-triangle expansions)
# ---------------------------------------------------------------------------


def _exp(a, b, g0, g2, K, branch="principal"):
    r = expand(ExpansionInputs(a, b, g0, (0.0, g2), K), branch)
    return (r.c_coeffs[0], r.c_coeffs[2]), (r.alpha_coeffs[0], r.alpha_coeffs[2])


def segment_pieces(N: int, a: float, c0: float, beta0: float, K_samples, a3=None,
                   c2: float = 0.0, beta2: float = 0.0) -> dict:
    """Evaluate every segment of a slice from the generic expansions.

    The ribs ``a3`` (index 2..N-1) are inputs; the result contains each
    segment's leading and third-order pieces as ``(value0, value2)`` pairs and
    the delta-equation residuals at zeroth and second order.
    """
    _check_n(N)
    K = _as_samples(K_samples, N)
    a1 = zeroth_order_ribs(N, a, c0, beta0)
    a3 = np.zeros(N + 1) if a3 is None else np.asarray(a3, dtype=float)
    base = (c0, 0.0, c2)
    d, al, om = {}, {}, {}
    d[N - 1], al[N - 1] = _exp((a, 0.0, 0.0), base, math.pi - beta0, -beta2, K[N])
    _, gam = _exp(base, (a, 0.0, 0.0), math.pi - beta0, -beta2, K[N])
    for i in range(2, N):
        rib = (a1[i], 0.0, a3[i])
        d[i - 1], al[i - 1] = _exp(rib, base, math.pi / 2, 0.0, K[i])
        _, om[i] = _exp(base, rib, math.pi / 2, 0.0, K[i])
    diag1 = (d[1][0], 0.0, d[1][1])
    top, ahat = {}, {}
    top[1], ahat[1] = _exp(base, diag1, math.pi - al[1][0], -al[1][1], K[1])
    _, open_ = _exp(diag1, base, math.pi - al[1][0], -al[1][1], K[1])
    dl = {}
    for i in range(2, N):
        rib = (a1[i], 0.0, a3[i])
        diag = (d[i][0], 0.0, d[i][1])
        g0, g2 = math.pi / 2 - al[i][0], -al[i][1]
        top[i], ahat[i] = _exp(rib, diag, g0, g2, K[i])
        _, dl[i] = _exp(diag, rib, g0, g2, K[i], "side")
    res0 = np.array([dl[i][0] + om[i][0] + ahat[i - 1][0] - math.pi for i in range(2, N)])
    res2 = np.array([dl[i][1] + om[i][1] + ahat[i - 1][1] for i in range(2, N)])
    return {
        "a1": a1, "a3": a3, "diag": d, "alpha": al, "omega": om, "delta": dl,
        "top": top, "ahat": ahat, "gamma_last": gam, "opening": open_,
        "res0": res0, "res2": res2,
        "b0": sum(top[i][0] for i in top) / N,
        "b2": sum(top[i][1] for i in top) / N,
        "gamma0": ahat[N - 1][0] + gam[0], "gamma2": ahat[N - 1][1] + gam[1],
        "alpha0": open_[0], "alpha2": open_[1],
    }


def solve_slice_reference(N: int, a: float, c0: float, beta0: float, K_samples,
                          c2: float = 0.0, beta2: float = 0.0) -> dict:
    """Solve the linear delta-equations of a slice segment by segment.

    Each second-order residual is affine in the third-order ribs and couples
    only neighbouring ribs, so the system is assembled column by column and
    solved densely.  Independent of the solved recursions.
    """
    n = N - 2
    base = segment_pieces(N, a, c0, beta0, K_samples, None, c2, beta2)
    r0 = base["res2"]
    M = np.zeros((n, n))
    for k in range(n):
        a3 = np.zeros(N + 1)
        a3[k + 2] = 1.0
        M[:, k] = segment_pieces(N, a, c0, beta0, K_samples, a3, c2, beta2)["res2"] - r0
    x = np.linalg.solve(M, -r0)
    a3 = np.zeros(N + 1)
    a3[2:N] = x
    return segment_pieces(N, a, c0, beta0, K_samples, a3, c2, beta2)


def delta_residual(N: int, j: int, i: int, state: dict) -> float:
    """Second-order mismatch of the two sides of the delta-equation at rib ``i``.

    ``state`` needs ``a``, ``c``, ``beta``, ``K_samples`` (slice ``j``) and the
    rib coefficients ``a3`` to test, e.g. from :func:`rib_lines`.
    """
    if not 2 <= i <= N - 1:
        raise DomainError("rib index must lie in 2..N-1")
    s = substitutes(N, j, state["a"], state["c"], state["beta"])
    pieces = segment_pieces(N, s.a, s.c0, s.beta0, state["K_samples"], state["a3"])
    return float(pieces["res2"][i - 2])


# ---------------------------------------------------------------------------
# recursion across slices
# ---------------------------------------------------------------------------


def curvature_samples(field: CurvatureField, N: int, a: float, c: float, beta: float,
                      phi_p: float = 0.0) -> np.ndarray:
    """``K[i, j] = K((i-1) c0^j / N, alpha_bar0^{j-1})`` as an (N+1, N+1) array."""
    _check_n(N)
    out = np.zeros((N + 1, N + 1))
    sb = math.sin(beta)
    for j in range(1, N + 1):
        c0 = _Y(N, j - 1, a, c, beta) / N
        abar = math.asin(min(1.0, (j - 1) * a * sb / _Y(N, j - 1, a, c, beta)))
        for i in range(1, N + 1):
            out[i, j] = field.evaluate((i - 1) * c0 / N, abar + phi_p)
    return out


@dataclass
class CrossSliceState:
    """Accumulated second-order arguments of every slice."""

    c2: np.ndarray  # c2^j, j = 1..N+1
    beta2: np.ndarray  # beta2^j, j = 1..N+1
    alpha2: np.ndarray  # alpha2^{0,j}, j = 1..N
    O: dict = field(default_factory=dict)
    Q: dict = field(default_factory=dict)
    V: dict = field(default_factory=dict)
    W: dict = field(default_factory=dict)


def _coeff_bc(r: SliceResult, lambda_term: bool) -> float:
    return r.coeff_b_c_printed if lambda_term else r.coeff_b_c


def cross_slice(N: int, a: float, c: float, beta: float, slice_results: Sequence[SliceResult],
                lambda_term: bool = False) -> CrossSliceState:
    """Chain the slices: ``c2^{j+1} = b2^j + b^{j,c} c2^j + b^{j,beta} beta2^j`` and likewise for beta2.

    ``slice_results[j-1]`` belongs to slice j.  The closed sums with the
    substitutes O/Q/V/W are evaluated alongside and stored on the state.
    ``lambda_term=True`` uses the top-line coefficient with the harmonic
    correction instead of the exact linear response.
    """
    if len(slice_results) != N:
        raise DomainError("need one slice result per slice")
    R = {r.j: r for r in slice_results}
    c2 = np.zeros(N + 2)
    b2 = np.zeros(N + 2)
    al = np.zeros(N + 1)
    for j in range(1, N + 1):
        r = R[j]
        al[j] = r.alpha2_interior + r.coeff_alpha_c * c2[j] + r.coeff_alpha_beta * b2[j]
        c2[j + 1] = r.b2_interior + _coeff_bc(r, lambda_term) * c2[j] + r.coeff_b_beta * b2[j]
        b2[j + 1] = r.gamma2_interior + r.coeff_gamma_c * c2[j] + r.coeff_gamma_beta * b2[j]
    state = CrossSliceState(c2=c2, beta2=b2, alpha2=al)
    O, Q, V, W = oqvw_direct(N, N, a, c, beta, N - 1, lambda_term)
    state.O, state.Q, state.V, state.W = O, Q, V, W
    return state


def _coeffs(N: int, j: int, a: float, c: float, beta: float, lambda_term: bool):
    """Argument coefficients ``(b^c, b^beta, gamma^c, gamma^beta)`` of slice j from substitutes."""
    s = substitutes(N, j, a, c, beta)
    Y2 = s.Y * s.Y
    bc = s.X / s.Y
    if lambda_term:
        bc = (s.X + s.I_N * s.e1 ** 2 / (N * s.X)) / s.Y
    return bc, -s.c0 * s.e1 / s.Y, s.e(N) / Y2, N * s.c0 * s.X / Y2


def oqvw_direct(N: int, j: int, a: float, c: float, beta: float, n_max: int,
                lambda_term: bool = False):
    """O/Q/V/W of slice j by the direct two-term recursion, n = 0..n_max."""
    if n_max > j - 1:
        raise DomainError("n must not exceed j - 1")
    O, Q, V, W = {0: 1.0}, {}, {}, {0: 1.0}
    bc, bb, gc, gb = _coeffs(N, j, a, c, beta, lambda_term)
    O[1], Q[1], V[1], W[1] = bc, bb, gc, gb
    for n in range(1, n_max):
        bc, bb, gc, gb = _coeffs(N, j - n, a, c, beta, lambda_term)
        O[n + 1] = O[n] * bc + Q[n] * gc
        Q[n + 1] = O[n] * bb + Q[n] * gb
        V[n + 1] = V[n] * bc + W[n] * gc
        W[n + 1] = V[n] * bb + W[n] * gb
    return O, Q, V, W


def oqvw_explicit(N: int, j: int, a: float, c: float, beta: float, n: int,
                  lambda_term: bool = False) -> tuple[float, float, float, float]:
    """O/Q/V/W of slice j from the nested-sum operators ``S_l`` and ``T_l``.

    The sums are expanded literally: every application of an operator opens
    two further summation layers until their ranges are empty.
    """
    if not 1 <= n <= j - 1:
        raise DomainError("n must lie in 1..j-1")
    sb = math.sin(beta)
    e1 = a * sb
    f = N * c * e1
    lam = N * harmonic_tail(N) * c * c * e1 * e1 if lambda_term else 0.0
    Ys = {m: _Y(N, j - m, a, c, beta) for m in range(0, n + 2)}

    def g(m: int) -> float:  # gamma^{j-m, beta}
        Z = (j - m) * a + N * c * math.cos(beta)
        return 1.0 - a * Z / Ys[m] ** 2

    def ghat(m: int) -> float:
        Z = (j - m) * a + N * c * math.cos(beta)
        Y2 = Ys[m] ** 2
        return 1.0 - a * Z / Y2 + lam / (Y2 * (Y2 - a * Z))

    def P(lo: int, hi: int) -> float:
        return math.prod(g(l) for l in range(lo, hi + 1))

    def Ph(lo: int, hi: int) -> float:
        return math.prod(ghat(l) for l in range(lo, hi + 1))

    def h(m: int) -> float:
        return Ys[0] / Ys[m] * Ph(0, m - 1)

    def O_(m: int) -> float:
        # h(m) plus the action of S on the remaining nested sums
        total = h(m)
        for m1 in range(1, m):
            inner = sum(P(m2 + 1, m1 - 1) / Ys[m2] * O_(m2) for m2 in range(0, m1))
            total -= f * f / Ys[m] * Ph(m1 + 1, m - 1) / Ys[m1] ** 2 * inner
        return total

    def W_(m: int) -> float:
        total = P(0, m - 1)
        for m1 in range(1, m):
            inner = sum(Ph(m2 + 1, m1 - 1) / Ys[m2] ** 2 * W_(m2) for m2 in range(0, m1))
            total -= c * e1 * P(m1 + 1, m - 1) / Ys[m1] * N * f / Ys[m1] * inner
        return total

    On = O_(n)
    Qn = -c * e1 * sum(P(m1 + 1, n - 1) / Ys[m1] * O_(m1) for m1 in range(0, n))
    Vn = N * f / Ys[n] * sum(Ph(m1 + 1, n - 1) / Ys[m1] ** 2 * W_(m1) for m1 in range(0, n))
    Wn = W_(n)
    return On, Qn, Vn, Wn


# ---------------------------------------------------------------------------
# full triangulation
# ---------------------------------------------------------------------------


def triangulate(field: CurvatureField, spec: TriangleSpec, N: int,
                lambda_term: bool = False) -> FundamentalResult:
    """Finite-N second-order solution of the whole triangle.

    The physical corrections are ``c2^{N+1} eps^2``, ``beta2^{N+1} eps^2`` and
    ``eps^2 sum_j alpha2^{0,j}``; the unscaled values are in ``diagnostics``.
    """
    _check_n(N)
    a, c, beta = spec.a, spec.c, spec.beta
    if a <= 0 or c <= 0:
        raise DomainError("a and c must be positive")
    if not 0.0 <= beta < math.pi / 2 and not spec.allow_unsafe_beta:
        raise DomainError("beta must lie in [0, pi/2)")
    b0, al0, g0 = zeroth_order(spec)
    if math.sin(beta) == 0.0:
        return FundamentalResult(b0, 0.0, g0, 0.0, al0, 0.0, {"N": N})
    Ks = curvature_samples(field, N, a, c, beta, spec.base_point_phi)
    results = [slice_second_order(N, j, a, c, beta, Ks[:, j]) for j in range(1, N + 1)]
    st = cross_slice(N, a, c, beta, results, lambda_term)
    eps2 = 1.0 / (N * N)
    diag = {
        "N": N,
        "c2_raw": float(st.c2[N + 1]),
        "beta2_raw": float(st.beta2[N + 1]),
        "alpha2_raw": float(st.alpha2[1:].sum()),
        "state": st,
        "slices": results,
    }
    return FundamentalResult(
        b0=b0, b2=st.c2[N + 1] * eps2,
        gamma0=g0, gamma2=st.beta2[N + 1] * eps2,
        alpha0=al0, alpha2=st.alpha2[1:].sum() * eps2,
        diagnostics=diag,
    )


# ---------------------------------------------------------------------------
# geometry of a slice
# ---------------------------------------------------------------------------


def _chart(l: float, phi: float) -> np.ndarray:
    return np.array([l * math.cos(phi), l * math.sin(phi)])


def slice_geometry(N: int, a: float, c: float, beta: float, K: float = 1.0) -> dict:
    """Vertices of the first slice in faithful normal coordinates, built two ways.

    The curvature is constant.  ``top`` places the vertices ``t_i`` on the
    top line by summing the segment top-line pieces; ``ribs`` reaches them
    from the baseline points ``q_i`` along the rib lines through the
    expanded laws of the triangle (o, q_i, t_i), and reaches the apex along
    the slice side.  Both use the second-order series at ``eps = 1/N``.
    Every vertex is a pair ``(l, phi)``.
    """
    eps = 1.0 / N
    Ks = np.full(N + 1, float(K))
    r = slice_second_order(N, 1, a, c, beta, Ks)
    pieces = segment_pieces(N, a, c, beta, Ks, r.rib_a3)
    a1 = zeroth_order_ribs(N, a, c, beta)
    op0, op2 = pieces["opening"]
    opening = op0 + op2 * eps ** 2
    top, ribs = {}, {}
    l0 = l2 = 0.0
    for i in range(2, N + 1):
        l0 += pieces["top"][i - 1][0]
        l2 += pieces["top"][i - 1][1]
        top[i] = (l0 * eps + l2 * eps ** 3, opening)
        if i < N:
            e = expand(ExpansionInputs((a1[i], 0.0, r.rib_a3[i]), (i * c, 0.0, 0.0), math.pi / 2, (0.0, 0.0), K))
        else:
            e = expand(ExpansionInputs((a, 0.0, 0.0), (N * c, 0.0, 0.0), math.pi - beta, (0.0, 0.0), K))
        ribs[i] = (e.c_coeffs[0] * eps + e.c_coeffs[2] * eps ** 3,
                   e.alpha_coeffs[0] + e.alpha_coeffs[2] * eps ** 2)
    base = {i: (i * c * eps, 0.0) for i in range(N + 1)}
    return {"base": base, "top": top, "ribs": ribs, "rib_lengths": {
        i: a1[i] * eps + r.rib_a3[i] * eps ** 3 for i in range(2, N)}}


def closure_mismatch(N: int, a: float, c: float, beta: float, K: float = 1.0) -> float:
    """Largest chart distance between the two constructions of :func:`slice_geometry`."""
    g = slice_geometry(N, a, c, beta, K)
    return max(float(np.linalg.norm(_chart(*g["top"][i]) - _chart(*g["ribs"][i]))) for i in g["top"])


def closure_bound(N: int, a: float, c: float) -> float:
    """Round-off allowance for :func:`closure_mismatch`: both constructions agree identically."""
    return 1e-11 * max(a, c) * N


def _sphere_point(l: float, phi: float) -> np.ndarray:
    """Point of the unit sphere at distance ``l`` from the pole in direction ``phi``."""
    return np.array([math.cos(l), math.sin(l) * math.cos(phi), math.sin(l) * math.sin(phi)])


def sphere_vertex_mismatch(N: int, a: float, c: float, beta: float, order: int = 2) -> float:
    """Distance on the unit sphere between rib endpoints and top-line vertices.

    Ribs are walked exactly at right angles from the base; the top-line
    vertices use the truncated pieces (``order`` 0 drops the third-order
    pieces).  The remainder is of fourth order in the slice size.
    """
    eps = 1.0 / N
    Ks = np.ones(N + 1)
    r = slice_second_order(N, 1, a, c, beta, Ks)
    pieces = segment_pieces(N, a, c, beta, Ks, r.rib_a3)
    a1 = zeroth_order_ribs(N, a, c, beta)
    w = 1.0 if order == 2 else 0.0
    op0, op2 = pieces["opening"]
    opening = op0 + w * op2 * eps ** 2
    worst = 0.0
    acc = 0.0
    normal = np.array([0.0, 0.0, 1.0])
    for i in range(2, N + 1):
        acc += pieces["top"][i - 1][0] * eps + w * pieces["top"][i - 1][1] * eps ** 3
        target = _sphere_point(acc, opening)
        if i < N:
            s = a1[i] * eps + w * r.rib_a3[i] * eps ** 3
            p = _sphere_point(i * c * eps, 0.0)
        else:
            p = _sphere_point(c, 0.0)
            fwd = np.array([-math.sin(c), math.cos(c), 0.0])
            normal = math.cos(beta) * fwd + math.sin(beta) * np.array([0.0, 0.0, 1.0])
            s = a * eps
        tip = p * math.cos(s) + normal * math.sin(s)
        worst = max(worst, float(np.linalg.norm(tip - target)))
    return worst
