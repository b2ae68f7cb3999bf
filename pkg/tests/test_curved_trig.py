import math

import pytest

from geoflow.curved_trig import (ExpansionInputs, asin_series, c_expand, cos_k, expand, law_c, law_sc,
                                 sc_expand, series_value, sin_k)
from geoflow.errors import BranchError, DegenerateTriangleError, DomainError


def _first_order(a, c, beta, K=1.0):
    return ExpansionInputs((a, 0.0, 0.0), (c, 0.0, 0.0), math.pi - beta, (0.0, 0.0), K)


@pytest.mark.parametrize("K,a,ref", [(1.0, 0.0, 1.0), (4.0, math.pi / 4, 0.0), (-1.0, 1.0, math.cosh(1.0))])
def test_cos_k(K, a, ref):
    assert cos_k(K, a) == pytest.approx(ref, abs=1e-15)


@pytest.mark.parametrize("K,a,ref", [(0.0, 2.5, 2.5), (1.0, math.pi / 2, 1.0), (-1.0, 1.0, math.sinh(1.0))])
def test_sin_k(K, a, ref):
    assert sin_k(K, a) == pytest.approx(ref, abs=1e-15)


def test_small_curvature_series_matches_closed_form():
    for K in (1e-7, -1e-7):
        s = math.sqrt(abs(K))
        ref = math.cos(s * 2.0) if K > 0 else math.cosh(s * 2.0)
        assert cos_k(K, 2.0) == pytest.approx(ref, abs=1e-15)


def test_law_c_examples():
    assert law_c(1.0, math.pi / 2, math.pi / 2, math.pi / 2) == pytest.approx(math.pi / 2, abs=1e-14)
    assert law_c(1e-9, math.pi / 3, 3.0, 4.0) == pytest.approx(math.sqrt(13.0), abs=1e-6)
    # acosh(cosh(1)^2), the hyperbolic right-angle case
    assert law_c(-1.0, math.pi / 2, 1.0, 1.0) == pytest.approx(1.513374, abs=1e-6)
    assert law_c(-1.0, math.pi / 2, 1.0, 1.0) == pytest.approx(math.acosh(math.cosh(1.0) ** 2), abs=1e-14)


def test_law_c_symmetry_and_collinear():
    for K in (1.0, 0.0, -0.5):
        assert law_c(K, 1.1, 0.4, 0.9) == pytest.approx(law_c(K, 1.1, 0.9, 0.4), abs=1e-14)
        assert law_c(K, 0.0, 0.4, 0.9) == pytest.approx(0.5, abs=1e-12)
        assert law_c(K, math.pi, 0.4, 0.9) == pytest.approx(1.3, abs=1e-12)


def test_law_c_flat_limit_monotone():
    flat = math.sqrt(0.3 ** 2 + 0.8 ** 2 - 2 * 0.3 * 0.8 * math.cos(1.0))
    errs = [abs(law_c(K, 1.0, 0.3, 0.8) - flat) for K in (1e-3, 1e-6, 1e-9)]
    assert errs[0] > errs[1] > errs[2] or errs[2] < 1e-14
    assert errs[2] < 1e-9


def test_law_c_domain_error():
    with pytest.raises(DomainError):
        law_c(1.0, 1.0, 4.0, 1.0)


def test_law_sc_examples():
    assert law_sc(1.0, math.pi / 2, math.pi / 2, math.pi / 2) == pytest.approx(math.pi / 2, abs=1e-7)
    assert law_sc(1e-9, math.pi / 2, 3.0, 4.0) == pytest.approx(math.asin(0.6), abs=1e-6)
    assert law_sc(1.0, math.pi / 2, 0.0, 1.0) == 0.0
    side = law_sc(1e-9, math.pi / 2, 3.0, 4.0, "side")
    assert side == pytest.approx(math.pi - math.asin(0.6), abs=1e-6)


def test_law_sc_rejects_gamma_zero():
    with pytest.raises(DomainError):
        law_sc(1.0, 0.0, 0.5, 0.5)


def test_c3_sphere_example():
    a, c, beta, K = 0.7, 1.1, 1.0, 1.3
    y = math.sqrt(a * a + c * c + 2 * a * c * math.cos(beta))
    c1, c2, c3 = c_expand(_first_order(a, c, beta, K))
    assert c1 == pytest.approx(y, rel=1e-15)
    assert c2 == 0.0
    assert c3 == pytest.approx(-K * a * a * c * c * math.sin(beta) ** 2 / (6 * y), rel=1e-13)


def test_alpha2_example():
    a, c, beta, K = 0.7, 1.1, 1.0, 1.3
    y2 = a * a + c * c + 2 * a * c * math.cos(beta)
    ref = (K * (a * a * (4 * c * c - 3 * y2) + y2 * (c * c + 3 * y2) + 2 * a * c * (a * a + c * c) * math.cos(beta))
           * a * math.sin(beta) / (24 * y2 * math.sqrt(y2 - a * a * math.sin(beta) ** 2)))
    al = sc_expand(_first_order(a, c, beta, K))
    assert al[0] == pytest.approx(math.asin(a * math.sin(beta) / math.sqrt(y2)), abs=1e-15)
    assert al[1] == 0.0
    assert al[2] == pytest.approx(ref, rel=1e-12)


def test_flat_expansion():
    r = expand(_first_order(0.7, 1.1, 1.0, 0.0))
    y = math.sqrt(0.49 + 1.21 + 2 * 0.77 * math.cos(1.0))
    assert r.c_coeffs == pytest.approx((y, 0.0, 0.0), abs=1e-15)
    assert r.alpha_coeffs[1:] == pytest.approx((0.0, 0.0), abs=1e-15)


def test_series_matches_exact_at_small_scale():
    d = 0.01
    coeffs = c_expand(ExpansionInputs((1.0, 0.0, 0.0), (1.0, 0.0, 0.0), math.pi / 2, (0.0, 0.0), 1.0))
    assert series_value(coeffs, d, 1) == pytest.approx(law_c(1.0, math.pi / 2, d, d), abs=1e-9)


def test_second_order_inputs_against_finite_perturbation():
    # sides and angle carry eps^2 and eps^3 corrections; compare with exact laws
    a, b, g = (0.8, 0.3, -0.4), (1.2, -0.5, 0.6), (0.9, 0.7)
    g0 = 1.2
    inp = ExpansionInputs(a, b, g0, g, 1.0)
    r = expand(inp)

    def exact(d):
        A = a[0] * d + a[1] * d ** 2 + a[2] * d ** 3
        B = b[0] * d + b[1] * d ** 2 + b[2] * d ** 3
        G = g0 + g[0] * d + g[1] * d ** 2
        return law_c(1.0, G, A, B), law_sc(1.0, G, A, B)

    errs = []
    for d in (0.02, 0.01):
        c, al = exact(d)
        errs.append((abs(series_value(r.c_coeffs, d, 1) - c), abs(series_value(r.alpha_coeffs, d, 0) - al)))
    assert errs[1][0] / errs[0][0] < 1 / 12
    assert errs[1][1] / errs[0][1] < 1 / 6
    assert errs[1][1] < 1e-5


def test_side_branch_mirrors_principal():
    p = _first_order(0.7, 1.1, 1.0)
    pr, sd = sc_expand(p), sc_expand(p, "side")
    assert sd[0] == pytest.approx(math.pi - pr[0])
    assert sd[2] == pytest.approx(-pr[2])


def test_degenerate_and_turning_point():
    with pytest.raises(DegenerateTriangleError):
        expand(ExpansionInputs((1.0, 0.0, 0.0), (1.0, 0.0, 0.0), 0.0))
    with pytest.raises(BranchError):
        expand(ExpansionInputs((1.0, 0.0, 0.0), (0.0, 0.0, 0.0), math.pi / 2))


def test_asin_series():
    assert asin_series(0.0, 5) == 0.0
    assert asin_series(0.5, 30) == pytest.approx(math.pi / 6, abs=1e-10)
    assert abs(asin_series(1 - 1e-6, 30) - math.asin(1 - 1e-6)) > 1e-3


def test_cos_k_series_against_symbolic():
    sp = pytest.importorskip("sympy")
    K, a = sp.symbols("K a")
    poly = sp.series(sp.cos(sp.sqrt(K) * a), a, 0, 12).removeO()
    for Kv in (3e-7, -3e-7):
        ref = float(poly.subs({K: Kv, a: 1.7}))
        assert cos_k(Kv, 1.7) == pytest.approx(ref, abs=1e-15)
