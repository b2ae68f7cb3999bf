"""Quadrature, product integrals and layered integrals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import ConvergenceError, DomainError

__all__ = [
    "QuadratureConfig",
    "PrimitivePair",
    "quad",
    "quad_nested",
    "product_integral_numeric",
    "product_integral_exact",
    "nested_power_integral",
    "nested_integral_bruteforce",
    "layered_integral_J",
    "layered_identity_sum",
    "riemann_limit_check",
]


@dataclass(frozen=True)
class QuadratureConfig:
    """Composite Gauss-Legendre rule with dyadic refinement."""

    order: int = 8
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 4096

    def __post_init__(self) -> None:
        if self.order < 2:
            raise ValueError("quadrature order must be at least 2")
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")


DEFAULT = QuadratureConfig()


@lru_cache(maxsize=None)
def _nodes(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _rule(f, a, b, order, vectorized):
    x, w = _nodes(order)
    h = 0.5 * (b - a)
    pts = a + h * (x + 1.0)
    if vectorized:
        vals = np.asarray(f(pts), dtype=float)
    else:
        vals = np.array([f(float(t)) for t in pts], dtype=float)
    out = h * np.tensordot(w, vals, axes=1)
    return out if out.ndim else float(out)


def quad(f: Callable, a: float, b: float, cfg: QuadratureConfig = DEFAULT,
         vectorized: bool = False) -> float:
    """Integrate ``f`` over ``[a, b]``.

    An interval is accepted when one Gauss-Legendre panel agrees with the
    two half panels within the local share of the tolerance.  With
    ``vectorized=True`` the integrand receives the array of nodes; it may
    return extra trailing axes, which are integrated jointly.
    """
    if b < a:
        raise DomainError("quad: need a <= b")
    if a == b:
        return 0.0
    budget = [cfg.max_subdivisions]
    total = 0.0
    stack = [(a, b, _rule(f, a, b, cfg.order, vectorized), cfg.abs_tol)]
    while stack:
        lo, hi, whole, tol = stack.pop()
        mid = 0.5 * (lo + hi)
        left = _rule(f, lo, mid, cfg.order, vectorized)
        right = _rule(f, mid, hi, cfg.order, vectorized)
        both = left + right
        if np.max(np.abs(both - whole)) <= max(tol, cfg.rel_tol * np.max(np.abs(both))):
            total += both
            continue
        budget[0] -= 1
        if budget[0] <= 0:
            raise ConvergenceError(f"quad: no convergence on [{a}, {b}]")
        stack.append((mid, hi, right, tol / 2.0))
        stack.append((lo, mid, left, tol / 2.0))
    return total


def quad_nested(f: Callable, limits: Sequence, cfg: QuadratureConfig = DEFAULT) -> float:
    """Iterated integral ``int f(x1, ..., xm) dxm ... dx1``.

    ``limits[k]`` is a pair ``(lo, hi)`` for variable ``k`` (outermost first);
    each bound is a number or a callable of the outer variables.
    """
    limits = list(limits)

    def bound(v, outer):
        return float(v(*outer)) if callable(v) else float(v)

    def level(k, outer):
        lo, hi = limits[k]
        lo, hi = bound(lo, outer), bound(hi, outer)
        if k == len(limits) - 1:
            return quad(lambda t: f(*outer, t), lo, hi, cfg)
        return quad(lambda t: level(k + 1, outer + (t,)), lo, hi, cfg)

    return level(0, ())


def product_integral_numeric(f: Callable, a: float, b: float, N: int) -> float:
    """Left-endpoint product ``prod_n (1 + f(x_n) (b - a)/N)``."""
    if N < 1:
        raise DomainError("need N >= 1")
    h = (b - a) / N
    x = a + h * np.arange(N)
    vals = np.asarray(f(x), dtype=float) * np.ones(N)
    return float(np.prod(1.0 + vals * h))


@dataclass(frozen=True)
class PrimitivePair:
    """Product primitive ``F`` with ``F'/F = f`` and its derivative."""

    F: Callable
    F_prime: Callable

    def f(self, x):
        return self.F_prime(x) / self.F(x)


def product_integral_exact(p: PrimitivePair, a: float, b: float, check_points: int = 0) -> float:
    """``F(b)/F(a)``; optionally sample that ``F`` has no zero on ``[a, b]``."""
    Fa = p.F(a)
    if Fa == 0:
        raise DomainError("product primitive vanishes at the lower limit")
    if check_points:
        xs = np.linspace(a, b, check_points)
        vals = np.array([p.F(x) for x in xs])
        if np.any(vals == 0) or np.any(np.sign(vals) != np.sign(Fa)):
            raise DomainError("product primitive changes sign on the interval")
    return float(p.F(b) / Fa)


def nested_power_integral(F_at_x: float, n: int) -> float:
    """``F(x)^n / n!`` for a primitive normalised to ``F(0) = 0``."""
    if n < 1:
        raise DomainError("need n >= 1")
    return F_at_x ** n / math.factorial(n)


def nested_integral_bruteforce(f: Callable, x: float, n: int, cfg: QuadratureConfig = DEFAULT) -> float:
    """``int_0^x f(x_n) int_0^{x_n} f(x_{n-1}) ... dx_1 ... dx_n`` by repeated quadrature."""
    if n < 1:
        raise DomainError("need n >= 1")
    if n == 1:
        return quad(f, 0.0, x, cfg)
    return quad(lambda t: f(t) * nested_integral_bruteforce(f, t, n - 1, cfg), 0.0, x, cfg)


def layered_integral_J(p: PrimitivePair, x: float, iota: int) -> float:
    """Layered integral with lower limit zero expressed through ``F(x)`` and ``F(0)``."""
    if iota < 1:
        raise DomainError("need iota >= 1")
    F0, Fx = p.F(0.0), p.F(x)
    total = 0.0
    for s in range(1, iota + 1):
        k = iota - s
        total += (-1) ** k / math.factorial(k) * F0 ** k * (Fx ** s - F0 ** s) / math.factorial(s)
    return total


def layered_identity_sum(iota: int) -> float:
    """``sum_{s=1}^{iota} (-1)^{iota-s} / ((iota-s)! s!)``."""
    return sum((-1) ** (iota - s) / (math.factorial(iota - s) * math.factorial(s)) for s in range(1, iota + 1))


def riemann_limit_check(f: Callable, a: float, b: float, N_list: Sequence[int],
                        exact: float | None = None, cfg: QuadratureConfig = DEFAULT) -> list[float]:
    """Errors of the right-endpoint sums ``h sum_{n=1}^N f(a + n h)`` against the integral."""
    ref = quad(f, a, b, cfg) if exact is None else exact
    out = []
    for N in N_list:
        h = (b - a) / N
        x = a + h * np.arange(1, N + 1)
        out.append(abs(h * float(np.sum(f(x))) - ref))
    return out
