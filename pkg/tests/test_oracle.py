import numpy as np
import pytest

from curveortho.errors import ConditioningError, ResolutionError
from curveortho.curves import CurveSpec
from curveortho.oracle import (
    gram_matrix,
    inner_product,
    monic_orthogonal,
    orthonormal_eval,
)


def test_monomial_moments_unit_weight(circle, weight_one):
    for j, k in ((0, 0), (3, 3), (2, 5), (1, 0)):
        p = np.zeros(j + 1); p[j] = 1.0
        q = np.zeros(k + 1); q[k] = 1.0
        expect = 1.0 if j == k else 0.0
        assert inner_product(p, q, circle, weight_one) == pytest.approx(
            expect, abs=1e-14)


def test_hand_moments(circle, weight_half):
    assert inner_product([1], [1], circle, weight_half) == pytest.approx(1.25)
    assert inner_product([0, 1], [1], circle, weight_half) == pytest.approx(-0.5)


def test_inner_product_positivity_and_symmetry(circle, weight_half):
    rng = np.random.default_rng(0)
    p = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    q = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    pp = inner_product(p, p, circle, weight_half)
    assert pp.imag == pytest.approx(0.0, abs=1e-12)
    assert pp.real > 0
    assert inner_product(p, q, circle, weight_half) == pytest.approx(
        np.conj(inner_product(q, p, circle, weight_half)))


def test_inner_product_doubling_check(circle, weight_half):
    v = inner_product([0, 1], [0, 1], circle, weight_half, N=512, check=True)
    assert v == pytest.approx(1.25)


def test_monic_examples(circle, ellipse, weight_one, weight_half):
    p7 = monic_orthogonal(circle, weight_one, 7)
    assert np.abs(p7.coeffs[:-1]).max() < 1e-13
    assert p7.gamma == pytest.approx(1.0, rel=1e-13)
    p1 = monic_orthogonal(circle, weight_half, 1)
    assert p1.coeffs[0] == pytest.approx(0.4, abs=1e-12)
    assert p1.gamma == pytest.approx(1 / np.sqrt(1.05), rel=1e-12)
    pj = monic_orthogonal(ellipse, weight_one, 1)
    assert abs(pj.coeffs[0]) < 1e-13  # even curve symmetry kills the shift


def test_orthonormal_eval(circle, weight_one, weight_half):
    p3 = monic_orthogonal(circle, weight_one, 3)
    assert orthonormal_eval(p3, 2.0) == pytest.approx(8.0, rel=1e-12)
    p1 = monic_orthogonal(circle, weight_half, 1)
    assert orthonormal_eval(p1, 0.0) == pytest.approx(0.4 / np.sqrt(1.05), rel=1e-11)
    p0 = monic_orthogonal(circle, weight_half, 0)
    assert orthonormal_eval(p0, 0.3) == pytest.approx(1 / np.sqrt(1.25), rel=1e-12)


def test_orthonormality_matrix(circle, weight_sqrt_half):
    m = 15
    polys = [monic_orthogonal(circle, weight_sqrt_half, k, N=1024)
             for k in range(m + 1)]
    G = np.empty((m + 1, m + 1), complex)
    for a in range(m + 1):
        for b in range(m + 1):
            G[a, b] = (polys[a].gamma * polys[b].gamma
                       * inner_product(polys[a], polys[b], circle,
                                       weight_sqrt_half, N=1024))
    assert np.abs(G - np.eye(m + 1)).max() < 1e-8


def test_uniqueness_under_node_doubling(ellipse, weight_one):
    a = monic_orthogonal(ellipse, weight_one, 9, N=512)
    b = monic_orthogonal(ellipse, weight_one, 9, N=1024)
    assert np.abs(a.coeffs - b.coeffs).max() < 1e-10


def test_gamma_ratio_growth(circle, ellipse, weight_half, weight_one):
    # gamma_{n+1}/gamma_n approaches phi'(inf) for analytic weights
    for curve, weight in ((circle, weight_half), (ellipse, weight_one)):
        gammas = [monic_orthogonal(curve, weight, n, N=1024).gamma
                  for n in range(15, 19)]
        phi_inf = 1.0 / curve.c1
        for g0, g1 in zip(gammas, gammas[1:]):
            assert abs(g1 / g0 - phi_inf) <= 0.05


def test_extended_precision_path(circle, weight_sqrt_half):
    hp = monic_orthogonal(circle, weight_sqrt_half, 12, dtype=np.clongdouble)
    dd = monic_orthogonal(circle, weight_sqrt_half, 12)
    assert hp.coeffs.dtype == np.clongdouble
    assert np.abs(hp.coeffs.astype(complex) - dd.coeffs).max() < 1e-13
    assert hp.gamma == pytest.approx(dd.gamma, rel=1e-13)


def test_gram_slicing_consistency(circle, weight_sqrt_half):
    G = gram_matrix(circle, weight_sqrt_half, 10, N=1024)
    a = monic_orthogonal(circle, weight_sqrt_half, 6, gram=G[:8, :8])
    b = monic_orthogonal(circle, weight_sqrt_half, 6, N=1024)
    assert np.abs(a.coeffs - b.coeffs).max() < 1e-13


def test_ill_conditioned_gram_is_flagged(weight_one):
    tiny = CurveSpec(c1=0.25, c0=0.0, cneg=np.zeros(0, complex), rho_hat=0.0)
    try:
        with pytest.warns(UserWarning):
            monic_orthogonal(tiny, weight_one, 25)
    except ConditioningError:
        pass  # either outcome honors the contract
