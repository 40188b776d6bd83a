import numpy as np
import pytest

from curveortho.errors import ConfigError, ContourProximityError, ContractionError
from curveortho.oracle import inner_product, monic_orthogonal
from curveortho.transforms import (
    ContourPair,
    ExpansionConfig,
    TransformState,
    check_contraction,
    compute_bounds,
    expand_thm1,
    expand_thm2,
    f_even_step,
    f_odd_step,
    g_steps,
)

CFG = ExpansionConfig(N=256, tol=1e-13)


def test_bounds_circle_unit_weight(circle, circle_imap, pack_circle_one):
    b = compute_bounds(circle, circle_imap, pack_circle_one, r=0.5, N=256)
    assert b.lam == pytest.approx(1.0, rel=1e-10)
    assert b.lam_p == pytest.approx(1.0, rel=1e-10)
    assert b.m_r == pytest.approx(2 / 3, rel=1e-8)
    b8 = compute_bounds(circle, circle_imap, pack_circle_one, r=0.8, N=256)
    assert b8.m_r == pytest.approx(1 / (1.25 - 0.8), rel=1e-8)


def test_bounds_ellipse_density_stable(ellipse, ellipse_imap, pack_ellipse_one):
    b4 = compute_bounds(ellipse, ellipse_imap, pack_ellipse_one, r=0.75, N=256,
                        density=4)
    b8 = compute_bounds(ellipse, ellipse_imap, pack_ellipse_one, r=0.75, N=256,
                        density=8)
    assert b4.lam > 0 and b4.lam_p > 0 and np.isfinite(b4.m_r)
    assert b4.lam == pytest.approx(b8.lam, rel=1e-6)
    assert b4.m_r == pytest.approx(b8.m_r, rel=1e-3)


def test_contraction_arithmetic(circle, circle_imap, pack_circle_one):
    b = compute_bounds(circle, circle_imap, pack_circle_one, r=0.5, N=256)
    ok0, q0 = check_contraction(b, 0)
    assert ok0 and q0 == pytest.approx(1 * 1 * (2 / 3) / 1.5, rel=1e-8)
    ok1, q1 = check_contraction(b, 1)
    assert ok1 and q1 == pytest.approx(q0 * 0.25, rel=1e-8)


def test_odd_step_cauchy_formula(circle, circle_imap, pack_circle_one):
    # for h = 1 the first odd transform is a plain Cauchy integral:
    # -z^n inside L_r, 0 outside
    pair = ContourPair(circle, circle_imap, pack_circle_one, 0.5, 256)
    st = TransformState(pair, 3, "f")
    vals = f_odd_step(st, [0.2, 0.1 + 0.3j, 0.9, 1.7])
    assert vals[0] == pytest.approx(-0.008, abs=1e-15)
    assert vals[1] == pytest.approx(-(0.1 + 0.3j) ** 3, abs=1e-15)
    assert abs(vals[2]) < 1e-15 and abs(vals[3]) < 1e-15


def test_even_step_vanishes_for_unit_weight(circle, circle_imap, pack_circle_one):
    pair = ContourPair(circle, circle_imap, pack_circle_one, 0.5, 256)
    st = TransformState(pair, 5, "f")
    f_odd_step(st, None)
    vals = f_even_step(st, [3.0, 0.9])
    assert np.abs(vals).max() < 1e-15
    assert np.abs(st.even_on_inner).max() < 1e-15  # so the even sum stays 1


def test_g_steps_match_f_at_first_order(circle, circle_imap, pack_circle_one):
    pair = ContourPair(circle, circle_imap, pack_circle_one, 0.5, 256)
    sf = TransformState(pair, 4, "f")
    sg = TransformState(pair, 4, "g")
    vf = f_odd_step(sf, [0.2])
    vg, eg = g_steps(sg, odd_targets=[0.2], even_targets=[2.5])
    assert vg[0] == pytest.approx(vf[0], rel=1e-14)
    assert abs(eg[0]) < 1e-15


def test_state_requires_alternation(circle, circle_imap, pack_circle_one):
    pair = ContourPair(circle, circle_imap, pack_circle_one, 0.5, 256)
    st = TransformState(pair, 2, "f")
    with pytest.raises(ConfigError):
        st.even_step([2.0])


def test_expand_exact_circle(circle, circle_imap, pack_circle_one):
    targets = np.concatenate([
        0.35 * np.exp(1j * np.linspace(0, 5, 5)),
        np.exp(1j * np.linspace(0, 5, 5)),
        2.6 * np.exp(1j * np.linspace(0, 5, 5))])
    for n in (1, 6, 15):
        for routine in (expand_thm1, expand_thm2):
            res = routine(circle, circle_imap, pack_circle_one, CFG, n, targets)
            assert np.abs(res.values - targets ** n).max() < 1e-12
            assert res.gamma_n == pytest.approx(1.0, abs=1e-12)
            assert res.bounds_ok


def test_expand_matches_oracle_weighted(circle, circle_imap, pack_circle_half):
    cfg = ExpansionConfig(N=512, tol=1e-13, k_max=600)
    t = np.exp(1j * (np.arange(24) + 0.4) / 24 * 2 * np.pi)
    for n in (6, 11):
        pn = monic_orthogonal(circle, pack_circle_half.weight, n)
        scale = np.abs(pn.eval(t)).max()
        for routine in (expand_thm1, expand_thm2):
            res = routine(circle, circle_imap, pack_circle_half, cfg, n, t)
            assert np.abs(res.values - pn.eval(t)).max() < 1e-10 * scale
            assert res.gamma_n == pytest.approx(pn.gamma, rel=1e-11)


def test_contraction_gate(circle, circle_imap, pack_circle_half):
    cfg = ExpansionConfig(N=256, tol=1e-12)
    with pytest.raises(ContractionError) as exc:
        expand_thm1(circle, circle_imap, pack_circle_half, cfg, 1, [0.0])
    assert exc.value.n_min is not None and exc.value.n_min >= 2


def test_contour_proximity_guard(circle, circle_imap, pack_circle_one):
    with pytest.raises(ContourProximityError):
        expand_thm1(circle, circle_imap, pack_circle_one, CFG, 5, [0.5001])


def test_node_doubling_self_convergence(ellipse, ellipse_imap, pack_ellipse_one):
    z = np.array([0.0 + 0.3j])
    vals = []
    for N in (256, 512):
        pair = ContourPair(ellipse, ellipse_imap, pack_ellipse_one, 0.76, N)
        st = TransformState(pair, 5, "f")
        vals.append(st.odd_step(z)[0])
    assert abs(vals[0] - vals[1]) < 1e-12 * max(abs(vals[1]), 1.0)


def test_even_bound_literal(ellipse, ellipse_imap, pack_ellipse_one):
    # Eq-style majorants hold literally at all computed samples
    cfg = ExpansionConfig(N=256, tol=1e-12)
    t = ellipse.psi(np.exp(1j * np.linspace(0.2, 6.0, 8)))
    for n in (6, 9):
        for routine in (expand_thm1, expand_thm2):
            res = routine(ellipse, ellipse_imap, pack_ellipse_one, cfg, n, t)
            assert res.bounds_ok


def test_branch_agreement_two_radii(ellipse, ellipse_imap, pack_ellipse_one):
    # Remark-1 redundancy: the same point evaluated through different
    # region branches (by running two expansion radii) gives one value
    n = 14
    tol = 1e-12
    m_out, m_in = 1.2, 0.635
    z_out = ellipse.psi(m_out * np.exp(1j * np.linspace(0.3, 5.9, 7)))
    z_in = ellipse.psi(m_in * np.exp(1j * np.linspace(0.3, 5.9, 7)))
    cfg_a = ExpansionConfig(r=0.76, N=512, tol=tol)
    res_a = expand_thm1(ellipse, ellipse_imap, pack_ellipse_one, cfg_a, n,
                        np.concatenate([z_out, z_in]))
    assert set(res_a.branches[:7]) == {"annulus"}
    assert set(res_a.branches[7:]) == {"interior"}
    # run B: z_out becomes an exterior-branch point (1/r_b < m_out)
    cfg_b = ExpansionConfig(r=0.87, N=1024, tol=tol)
    res_b = expand_thm1(ellipse, ellipse_imap, pack_ellipse_one, cfg_b, n, z_out)
    assert set(res_b.branches) == {"exterior"}
    rel = np.abs(res_b.values - res_a.values[:7]) / np.abs(res_b.values).max()
    assert rel.max() < 10 * tol
    # run C: z_in becomes an annulus-branch point (r_c < m_in)
    cfg_c = ExpansionConfig(r=0.573, N=512, tol=tol)
    res_c = expand_thm1(ellipse, ellipse_imap, pack_ellipse_one, cfg_c, n, z_in)
    assert set(res_c.branches) == {"annulus"}
    rel = np.abs(res_c.values - res_a.values[7:]) / np.abs(res_c.values).max()
    assert rel.max() < 10 * tol


def test_monicity_contour_integral(ellipse, ellipse_imap, pack_ellipse_one):
    n = 7
    R, M = 10.0, 64
    w = R * np.exp(2j * np.pi * np.arange(M) / M)
    res = expand_thm1(ellipse, ellipse_imap, pack_ellipse_one, CFG, n,
                      ellipse.psi(w))
    lead = np.sum(res.values * ellipse.dpsi(w) * w
                  / ellipse.psi(w) ** (n + 1)) / M
    assert lead == pytest.approx(1.0, abs=1e-8)


def test_degree_growth_normalization(ellipse, ellipse_imap, pack_ellipse_one):
    # the subleading coefficient contributes O(|z|^-2) ~ 2e-6 at this radius
    w = 1e3 + 0j
    z = ellipse.psi(w)
    res = expand_thm1(ellipse, ellipse_imap, pack_ellipse_one, CFG, 9, [z])
    assert res.values[0] / z ** 9 == pytest.approx(1.0, abs=1e-5)


def test_orthogonality_residuals(ellipse, ellipse_imap, pack_ellipse_one,
                                 weight_one):
    n, N = 10, 512
    th = 2 * np.pi * np.arange(N) / N
    zb = ellipse.psi(np.exp(1j * th))
    res = expand_thm1(ellipse, ellipse_imap, pack_ellipse_one,
                      ExpansionConfig(N=512, tol=1e-13), n, zb)
    samples = res.values
    norm_p = np.sqrt(inner_product(lambda z: res.eval(z), lambda z: res.eval(z),
                                   ellipse, weight_one, N=N).real)
    for m in range(n):
        mono = np.zeros(m + 1); mono[m] = 1.0
        ip = inner_product(lambda z, s=samples: s, mono, ellipse, weight_one, N=N)
        norm_m = np.sqrt(inner_product(mono, mono, ellipse, weight_one, N=N).real)
        assert abs(ip) <= 1e-7 * norm_p * norm_m


def test_gamma_routes_cross_consistency(ellipse, ellipse_imap, pack_ellipse_one):
    for n in (6, 12):
        r1 = expand_thm1(ellipse, ellipse_imap, pack_ellipse_one, CFG, n, [])
        r2 = expand_thm2(ellipse, ellipse_imap, pack_ellipse_one, CFG, n, [])
        assert r1.gamma_n == pytest.approx(r2.gamma_n, rel=1e-8)


def test_invalid_radius_rejected(pack_circle_half):
    with pytest.raises(ConfigError):
        ExpansionConfig(r=0.4).resolve_r(pack_circle_half)  # r <= rho
    with pytest.raises(ConfigError):
        ExpansionConfig(r=1.1).resolve_r(pack_circle_half)
