"""Gaussian curvature fields in faithful normal coordinates.

A field is a callable ``K(l, phi)`` together with a little metadata.  All
built-in fields accept numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError

__all__ = [
    "CurvatureField",
    "IndexField",
    "GeometryHelpers",
    "lambert_w0",
    "make_constant",
    "make_inverse_l",
    "make_wave",
    "make_lambert_hill",
    "make_field",
    "FIELD_NAMES",
]

E = math.e


def lambert_w0(x):
    """Principal branch of the Lambert W function (Halley iteration)."""
    x = np.asarray(x, dtype=float)
    if np.any(x < -1.0 / E - 1e-15):
        raise DomainError("lambert_w0: argument below -1/e")
    x = np.maximum(x, -1.0 / E)
    # seed: branch-point series near -1/e, log asymptotics for large x
    p = np.sqrt(np.maximum(2.0 * (E * x + 1.0), 0.0))
    w = np.where(x < 0.25, -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3, 0.0)
    big = x >= 3.0
    lx = np.log(np.where(big, x, 3.0))
    w = np.where(big, lx - np.log(lx), w)
    mid = (x >= 0.25) & ~big
    w = np.where(mid, np.log1p(np.where(mid, x, 0.0)) * 0.75, w)
    for _ in range(60):
        ew = np.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / np.where(wp1 == 0.0, 1.0, 2.0 * wp1)
        step = np.where(denom == 0.0, 0.0, f / np.where(denom == 0.0, 1.0, denom))
        w = w - step
        if np.all(np.abs(step) <= 1e-16 * (1.0 + np.abs(w))):
            break
    w = np.where(x == 0.0, 0.0, w)
    return w if w.ndim else float(w)


@dataclass(frozen=True)
class CurvatureField:
    """Immutable field ``K(l, phi)``.

    ``min_l`` is the smallest admissible radius; fields with a pole at the
    origin refuse evaluation below it.  ``constant`` holds the value of a
    constant field and ``None`` otherwise.
    """

    func: Callable
    name: str = "custom"
    min_l: float = 0.0
    central: bool = False
    positive: bool = True
    constant: Optional[float] = None
    params: tuple = ()

    def evaluate(self, l, phi):
        l_arr = np.asarray(l, dtype=float)
        if np.any(l_arr < self.min_l) or np.any(l_arr < 0):
            raise DomainError(f"{self.name}: radius below {self.min_l}")
        return self.func(l, phi)

    __call__ = evaluate

    def rotated(self, phi_p: float) -> "CurvatureField":
        """Field seen from a chart rotated by ``phi_p``."""
        if self.central or phi_p == 0.0:
            return self
        f = self.func
        return CurvatureField(lambda l, phi: f(l, phi + phi_p), self.name, self.min_l,
                              False, self.positive, self.constant, self.params)


@dataclass(frozen=True)
class GeometryHelpers:
    """``y(j)``, ``z(j)`` and ``f`` of the triangle with sides a, c and angle beta."""

    a: float
    c: float
    beta: float

    def y(self, j):
        a, c = self.a, self.c
        return np.sqrt(j * j * a * a + c * c + 2.0 * j * a * c * math.cos(self.beta))

    def z(self, j):
        return j * self.a + self.c * math.cos(self.beta)

    @property
    def f(self) -> float:
        return self.a * self.c * math.sin(self.beta)


@dataclass(frozen=True)
class IndexField:
    """The field reparametrized over the unit square, ``K[i, j]``."""

    field: CurvatureField
    a: float
    c: float
    beta: float
    phi_p: float = 0.0

    @property
    def geometry(self) -> GeometryHelpers:
        return GeometryHelpers(self.a, self.c, self.beta)

    def __call__(self, i, j):
        g = self.geometry
        y = g.y(j)
        ang = np.arcsin(np.clip(j * self.a * math.sin(self.beta) / y, -1.0, 1.0))
        return self.field.evaluate(i * y, ang + self.phi_p)


def _full(value, l, phi):
    return np.full(np.broadcast(np.asarray(l), np.asarray(phi)).shape, value, dtype=float)[()]


def make_constant(K0: float) -> CurvatureField:
    K0 = float(K0)
    return CurvatureField(lambda l, phi: _full(K0, l, phi), "constant", 0.0, True, K0 > 0, K0, (("K0", K0),))


def make_inverse_l(min_l: float = 1e-8) -> CurvatureField:
    """Central field ``K = 1/l``."""

    def f(l, phi):
        return 1.0 / np.asarray(l, dtype=float) + 0.0 * np.asarray(phi, dtype=float)

    return CurvatureField(f, "inverse_l", min_l, True, True, None, ())


def make_wave(kappa: float = 1.0, omega_t: float = 0.0) -> CurvatureField:
    """Outward travelling wave ``kappa/(l + 1/2) (1 + sin(2 pi l - omega t))``."""
    if kappa <= 0:
        raise DomainError("wave amplitude must be positive")

    def f(l, phi):
        l = np.asarray(l, dtype=float)
        return kappa / (l + 0.5) * (1.0 + np.sin(2.0 * np.pi * l - omega_t)) + 0.0 * np.asarray(phi, dtype=float)

    return CurvatureField(f, "wave", 0.0, True, True, None, (("kappa", kappa), ("omega_t", omega_t)))


def lambert_hill_l(l):
    """``W^2 / (l (1+W)^3 (l - e W))`` with ``W = W0(l/e)``.

    Evaluated as ``1/(r e^(1+W) (1+W)^3)`` with ``r = e expm1(W)``, which
    avoids the cancellation in ``l - e W`` near the origin.
    """
    l = np.asarray(l, dtype=float)
    w = lambert_w0(l / E)
    r = E * np.expm1(w)
    return 1.0 / (r * np.exp(1.0 + w) * (1.0 + w) ** 3)


def lambert_hill_r(r):
    """The same curvature expressed through the embedding radius ``r``."""
    r = np.asarray(r, dtype=float)
    return 1.0 / (r * (E + r) * np.log(E + r) ** 3)


def make_lambert_hill(min_l: float = 1e-8) -> CurvatureField:
    """Rotation-symmetric hill whose radius function involves the Lambert W function."""

    def f(l, phi):
        return lambert_hill_l(l) + 0.0 * np.asarray(phi, dtype=float)

    return CurvatureField(f, "lambert_hill", min_l, True, True, None, ())


FIELD_NAMES = ("constant", "inverse_l", "wave", "lambert_hill")


def make_field(name: str, **params) -> CurvatureField:
    """Build a named field; parameters are passed as keywords."""
    if name == "constant":
        return make_constant(float(params.get("K0", params.get("K", 1.0))))
    if name == "inverse_l":
        return make_inverse_l(float(params.get("min_l", 1e-8)))
    if name == "wave":
        return make_wave(float(params.get("kappa", 1.0)), float(params.get("omega_t", 0.0)))
    if name == "lambert_hill":
        return make_lambert_hill(float(params.get("min_l", 1e-8)))
    raise DomainError(f"unknown field {name!r}")
