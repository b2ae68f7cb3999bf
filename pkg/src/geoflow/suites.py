"""Self-contained validation suites shared by the command line and the tests.

Every check returns a dict with ``name``, ``passed`` and the measured
quantities, so failures are reported rather than raised.
"""

from __future__ import annotations

import math
from typing import Callable, Dict, List

import numpy as np

from .curvature_field import make_constant
from .embeddings import lambert_relation
from .fnc import (AngularParams, curvature_plane, curvature_plane_rotation, metric_from_solution,
                  omega, omega_inverse)
from .fundamental_solution import TriangleSpec, fundamental_solution, sphere_closed_form
from .integration import (PrimitivePair, layered_integral_J, nested_integral_bruteforce,
                          nested_power_integral, product_integral_exact, product_integral_numeric)
from .triangulation import triangulate

__all__ = ["SUITES", "run_suite", "sphere_grid"]

GRID_SIDES = (0.2, 0.5, 1.0)
GRID_ANGLES = (math.pi / 6, math.pi / 4, math.pi / 3)


def _check(name: str, passed: bool, **info) -> dict:
    return {"name": name, "passed": bool(passed), **{k: float(v) if isinstance(v, (float, np.floating)) else v
                                                    for k, v in info.items()}}


def sphere_grid(K: float = 1.0):
    """Largest deviation from the closed forms over the 27-point grid."""
    fld = make_constant(K)
    worst = 0.0
    for a in GRID_SIDES:
        for c in GRID_SIDES:
            for beta in GRID_ANGLES:
                r = fundamental_solution(fld, TriangleSpec(a, c, beta))
                ref = sphere_closed_form(K, a, c, beta)
                worst = max(worst, abs(r.b2 - ref[0]), abs(r.gamma2 - ref[1]), abs(r.alpha2 - ref[2]))
    return worst


def suite_sphere() -> List[dict]:
    worst = sphere_grid(1.0)
    return [_check("sphere_closed_form_grid", worst < 1e-7, max_error=worst, tol=1e-7)]


def suite_flat() -> List[dict]:
    fld = make_constant(0.0)
    worst = 0.0
    for a in GRID_SIDES:
        for beta in GRID_ANGLES:
            r = fundamental_solution(fld, TriangleSpec(a, 0.5, beta))
            worst = max(worst, abs(r.b2), abs(r.gamma2), abs(r.alpha2))
    t = triangulate(fld, TriangleSpec(0.5, 1.0, math.pi / 3), 8)
    exact_zero = t.b2 == 0.0 and t.gamma2 == 0.0 and t.alpha2 == 0.0
    return [
        _check("flat_limit_formulas", worst < 1e-12, max_abs=worst, tol=1e-12),
        _check("flat_triangulation_exact_zero", exact_zero, b2=t.b2, gamma2=t.gamma2, alpha2=t.alpha2),
    ]


def suite_integrals() -> List[dict]:
    out = []
    pairs = {
        "exp_x2": PrimitivePair(lambda x: np.exp(x * x), lambda x: 2.0 * x * np.exp(x * x)),
        "one_plus_x": PrimitivePair(lambda x: 1.0 + x, lambda x: np.ones_like(np.asarray(x, dtype=float))),
    }
    for name, p in pairs.items():
        exact = product_integral_exact(p, 0.0, 1.0)
        err = abs(product_integral_numeric(p.f, 0.0, 1.0, 1000) - exact)
        out.append(_check(f"product_integral_{name}", err * 1000 < 10.0, error=err, N=1000))
    f = lambda x: 1.0 / (1.0 + x * x)
    shifted = PrimitivePair(lambda x: np.arctan(x) + 1.0, f)
    for iota in (1, 2, 3):
        ref = nested_integral_bruteforce(f, 1.0, iota)
        val = layered_integral_J(shifted, 1.0, iota)
        out.append(_check(f"layered_J_iota{iota}", abs(val - ref) < 1e-8, value=val, reference=ref))
    val = nested_power_integral(0.5, 3)
    ref = nested_integral_bruteforce(lambda x: x, 1.0, 3)
    out.append(_check("nested_power_n3", abs(val - ref) < 1e-10, value=val, reference=ref))
    return out


def suite_roundtrip() -> List[dict]:
    out = []
    for c in (0.3, 0.7):
        g1 = metric_from_solution(make_constant(1.0), (c, 0.0)).g_phiphi
        g0 = metric_from_solution(make_constant(0.0), (c, 0.0)).g_phiphi
        out.append(_check(f"metric_sphere_c{c}", abs(g1 - math.sin(c) ** 2) < 1e-5, g=g1, ref=math.sin(c) ** 2))
        out.append(_check(f"metric_flat_c{c}", abs(g0 - c * c) < 1e-8, g=g0, ref=c * c))
    rel = lambert_relation()
    back = float(rel.r_of_l(rel.l_of_r(2.0)))
    out.append(_check("lambert_inverse", abs(back - 2.0) < 1e-10, value=back))
    rng = np.random.default_rng(7)
    worst_plane = worst_dir = 0.0
    for _ in range(200):
        php, thp = rng.uniform(0, 2 * math.pi), rng.uniform(-math.pi / 2, math.pi / 2)
        a2 = rng.uniform(-math.pi / 2, math.pi / 2)
        p = curvature_plane(php, thp, a2)
        o = curvature_plane_rotation(php, thp, a2)
        worst_plane = max(worst_plane, abs(p.phi_K - o[0]), abs(p.theta_K - o[1]))
        v = omega(AngularParams(php, (thp,)))
        worst_dir = max(worst_dir, float(np.max(np.abs(omega(omega_inverse(v)) - v))))
    out.append(_check("curvature_plane_oracle", worst_plane < 1e-10, max_error=worst_plane))
    out.append(_check("direction_roundtrip", worst_dir < 1e-12, max_error=worst_dir))
    return out


SUITES: Dict[str, Callable[[], List[dict]]] = {
    "sphere": suite_sphere,
    "flat": suite_flat,
    "integrals": suite_integrals,
    "roundtrip": suite_roundtrip,
}


def run_suite(name: str) -> dict:
    """Run one suite (or ``all``) and summarise."""
    names = list(SUITES) if name == "all" else [name]
    if any(n not in SUITES for n in names):
        raise KeyError(name)
    checks = []
    for n in names:
        for chk in SUITES[n]():
            checks.append({"suite": n, **chk})
    return {"suite": name, "passed": all(c["passed"] for c in checks), "checks": checks}
