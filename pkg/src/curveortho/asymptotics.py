"""Asymptotic formulas for the orthogonal polynomials and their validation.

Covers the exterior strong-asymptotics main term, the leading-coefficient
main term, the interior contour-integral representation that dominates
inside the curve, the fine two-term formulas for weights with algebraic
singularities on an interior level curve, and the standalone singular
contour-integral asymptotics

    (1/2 pi i) * integral over T_delta(rho) of (t-rho)^(-beta) t^n v(t) dt
        = binom(n, beta-1) v(rho) rho^(n-beta+1) + lower order,

with the branch of (t-rho)^(-beta) cut along (-infinity, rho].

All outputs are normalized to the monic polynomial scale: the raw
right-hand sides are divided by Delta_e(inf) * [phi'(inf)]^(n+1/2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, gammasgn

from .curves import CurveSpec, InteriorMap
from .errors import (
    BranchTrackingError,
    ConfigError,
    CutProximityError,
    DomainError,
    ResolutionError,
)
from .szego import SzegoPack

__all__ = [
    "SingularityData",
    "binom_general",
    "alpha_constants",
    "szego_exterior_formula",
    "gamma_asymptotic",
    "interior_integral_rep",
    "thm3_interior",
    "thm3_at_singularity",
    "proposition_I",
]


def binom_general(a: float, b: float) -> float:
    """Generalized binomial coefficient Gamma(a+1)/(Gamma(b+1) Gamma(a-b+1)).

    Computed through log-gamma with sign tracking.  A pole of the
    numerator raises; poles of the denominator give the limit value 0.
    """

    def _is_nonpos_int(x):
        return x <= 0.5 and abs(x - round(x)) < 1e-12

    if _is_nonpos_int(a + 1.0):
        raise DomainError(f"binom({a}, {b}) is infinite: Gamma pole in the numerator")
    if _is_nonpos_int(b + 1.0) or _is_nonpos_int(a - b + 1.0):
        return 0.0
    sign = gammasgn(a + 1.0) * gammasgn(b + 1.0) * gammasgn(a - b + 1.0)
    mag = gammaln(a + 1.0) - gammaln(b + 1.0) - gammaln(a - b + 1.0)
    return float(sign * np.exp(mag))


@dataclass
class SingularityData:
    """Per-singularity constants entering the fine interior asymptotics."""

    points: np.ndarray        # a_k
    lambdas: np.ndarray
    thetas: np.ndarray        # angles of phi(a_k)
    rho_k: np.ndarray         # phi(a_k) = rho e^(i Theta_k)
    alphas: np.ndarray        # branch-anchored limit constants
    delta_i_at_a: np.ndarray
    rho: float
    u_count: int
    imap: InteriorMap


def _limit_route_alpha(curve, pack, k, n_levels=7):
    """Audit route for alpha_k: Richardson extrapolation along a radial ray.

    The power (phi(z)/(z - a_k))^(-lambda_k) is branch-tracked along the
    approach path itself, independently of the split-log evaluation used
    by the closed form.
    """
    rho, theta = pack.rho, pack.thetas[k]
    lam = pack.lambdas[k]
    ak = pack.points[k]
    d0 = 0.3 * (1.0 - rho)
    ds = d0 * 0.5 ** np.arange(n_levels)
    e = np.exp(1j * theta)
    # continuity-tracked log of u(w) = w/(psi(w) - a_k) from a large radius
    path_r = np.concatenate([np.geomspace(64.0, rho + d0, 60), rho + ds[1:]])
    uvals = path_r * e / (curve.psi(path_r * e) - ak)
    logs = np.log(uvals[0]) + np.concatenate(
        [[0.0], np.cumsum(np.log(uvals[1:] / uvals[:-1]))])
    log_at_ds = logs[-n_levels:]
    w_at_ds = (rho + ds) * e
    brackets = pack.delta_e(w=w_at_ds) * np.exp(-lam * log_at_ds)
    # Neville extrapolation of the bracket to d = 0
    tab = list(brackets.astype(complex))
    x = list(ds.astype(float))
    for m in range(1, n_levels):
        tab = [(x[i + m] * tab[i] - x[i] * tab[i + 1]) / (x[i + m] - x[i])
               for i in range(n_levels - m)]
    dphi_pow = np.exp((lam - 0.5) * (-curve.log_dpsi(pack.rho_k[k])))
    return dphi_pow * tab[0]


def alpha_constants(curve: CurveSpec, pack: SzegoPack,
                    audit_tol=1e-6) -> SingularityData:
    """Constants alpha_k by closed form, audited against the limit route.

    Closed form:
        alpha_k = [phi'(a_k)]^(lambda_k - 1/2) * omega(a_k)
                  * prod_{j != k} (phi(a_k)/(a_k - a_j))^(lambda_j),
    with every power on the branch anchored positive at infinity.
    Disagreement between the routes is treated as a branch bug, never
    averaged away.
    """
    if pack.kind != "singular":
        raise ConfigError("alpha constants are defined for singular weights only")
    s = pack.points.size
    alphas = np.empty(s, dtype=complex)
    for k in range(s):
        log_dphi_ak = -curve.log_dpsi(pack.rho_k[k])
        val = np.exp((pack.lambdas[k] - 0.5) * log_dphi_ak)
        val = val * pack.weight.omega_eval(np.array([pack.points[k]]))[0]
        for j in range(s):
            if j == k:
                continue
            base_log = pack._log_base_factor(np.array([pack.rho_k[k]]), j)[0]
            val = val * np.exp(pack.lambdas[j] * base_log)
        alphas[k] = val
        audit = _limit_route_alpha(curve, pack, k)
        if abs(audit - val) > audit_tol * max(abs(val), 1e-300):
            raise BranchTrackingError(
                f"alpha_{k + 1} limit route {audit} disagrees with closed form {val}; "
                "audit the branch anchors")
    return SingularityData(
        points=pack.points.copy(), lambdas=pack.lambdas.copy(),
        thetas=pack.thetas.copy(), rho_k=pack.rho_k.copy(), alphas=alphas,
        delta_i_at_a=pack.delta_i(pack.points), rho=pack.rho,
        u_count=pack.weight.u_count, imap=pack.imap)


def _monic_denominator(curve, pack, n):
    return pack.delta_e_inf * curve.c1 ** -(n + 0.5)


def szego_exterior_formula(curve: CurveSpec, pack: SzegoPack, n: int, z,
                           r1: float | None = None):
    """Monic exterior main term Delta_e sqrt(phi') phi^n / normalization."""
    w = curve.phi(z)
    warr = np.atleast_1d(np.asarray(w, complex))
    floor = r1 if r1 is not None else pack.rho * (1.0 + 1e-10)
    if np.any(np.abs(warr) < floor):
        raise DomainError(f"exterior formula requires |phi(z)| >= r1 = {floor}")
    vals = (pack.delta_e(w=warr) / curve.sqrt_dpsi(warr) * warr ** n
            / _monic_denominator(curve, pack, n))
    return vals[0] if np.ndim(z) == 0 else vals.reshape(np.shape(z))


def gamma_asymptotic(curve: CurveSpec, pack: SzegoPack, n: int) -> float:
    """Leading-order gamma_n = Delta_e(inf) [phi'(inf)]^(n+1/2)."""
    return float(_monic_denominator(curve, pack, n))


def interior_integral_rep(curve: CurveSpec, imap: InteriorMap, pack: SzegoPack,
                          n: int, z, N=1024, check=True):
    """Dominant interior representation of monic P_n via an L_1 integral.

    Evaluates Delta_i(z)^(-1)/(2 pi i) * integral over L_1 of
    Delta_e Delta_i W(., z) sqrt(phi') phi^n, monic-normalized.
    """
    zarr = np.atleast_1d(np.asarray(z, complex))
    w, ok = curve.try_phi(zarr)
    s = np.where(ok, np.abs(w), 0.0)
    if np.any(s >= 1.0 - np.log(1e13) / N):
        raise DomainError("interior representation needs z strictly inside L_1 "
                          "(quadrature guard)")

    def _value(nodes):
        th = 2 * np.pi * np.arange(nodes) / nodes
        wb = np.exp(1j * th)
        zb = curve.psi(wb)
        base = (pack.delta_e(w=wb) * pack.delta_i(zb) * curve.sqrt_dpsi(wb)
                * wb ** (n + 1) / nodes)
        fz = imap.eval(zarr, w=np.where(ok, w, np.nan))
        sz = imap.sqrt_deriv(zarr, w=np.where(ok, w, np.nan))
        Wmat = (sz[None, :] * imap.sqrt_deriv(zb)[:, None]
                / (imap.eval(zb)[:, None] - fz[None, :]))
        integral = base @ Wmat
        return (pack.delta_i_inv(zarr, w=np.where(ok, w, np.nan)) * integral
                / _monic_denominator(curve, pack, n))

    vals = _value(N)
    if check:
        vals2 = _value(2 * N)
        scale = np.maximum(np.abs(vals2), 1e-300)
        if np.any(np.abs(vals - vals2) / np.maximum(scale, 1.0) > 1e-9):
            raise ResolutionError("interior integral not converged under N doubling")
        vals = vals2
    return vals[0] if np.ndim(z) == 0 else vals.reshape(np.shape(z))


def thm3_interior(curve: CurveSpec, imap: InteriorMap, pack: SzegoPack,
                  sdata: SingularityData, n: int, z, cut_guard_factor=0.02):
    """Two-term interior asymptotics for the singular family, monic scale.

    Returns (value, parts) where parts separates the region term (present
    on G_1 inside the analyticity region, absent deeper than L_sigma) from
    the singular main term carried by binom(n, lambda_1 - 1).
    """
    if pack.kind != "singular":
        raise ConfigError("Theorem-3 formulas require an algebraic-singularity weight")
    zarr = np.atleast_1d(np.asarray(z, complex))
    w, ok = curve.try_phi(zarr)
    s = np.where(ok, np.abs(w), 0.0)
    if np.any(s >= 1.0 - 1e-12):
        raise DomainError("interior formula is for z in G_1")
    guard = cut_guard_factor * pack.rho
    live = ok & (s > pack.sigma)
    if np.any(live):
        if np.any(pack._cut_distance(np.where(live, w, 2.0)) < guard):
            raise CutProximityError("target within the guard distance of the cut system")
    region = np.zeros(zarr.shape, dtype=complex)
    if np.any(live):
        wl = w[live]
        region[live] = (pack.delta_e(w=wl) / curve.sqrt_dpsi(wl) * wl ** n)
    u = sdata.u_count
    lam1 = sdata.lambdas[0]
    fz = imap.eval(zarr, w=np.where(ok, w, np.nan))
    sz = imap.sqrt_deriv(zarr, w=np.where(ok, w, np.nan))
    ssum = np.zeros(zarr.shape, dtype=complex)
    for k in range(u):
        Wk = (sz * imap.sqrt_deriv(sdata.points[k])
              / (imap.eval_inside(sdata.points[k]) - fz))
        ssum = ssum + (sdata.alphas[k] * sdata.delta_i_at_a[k] * Wk
                       * sdata.rho_k[k] ** (n + 1))
    singular = (binom_general(n, lam1 - 1.0)
                * pack.delta_i_inv(zarr, w=np.where(ok, w, np.nan)) * ssum)
    denom = _monic_denominator(curve, pack, n)
    value = (region + singular) / denom
    parts = {"region_term": region / denom, "singular_term": singular / denom}
    if np.ndim(z) == 0:
        return value[0], {k: v[0] for k, v in parts.items()}
    return value, parts


def thm3_at_singularity(curve: CurveSpec, imap: InteriorMap, pack: SzegoPack,
                        sdata: SingularityData, n: int, j: int):
    """Main terms of monic P_n at the singularity a_j (1-based index)."""
    s = sdata.points.size
    if not 1 <= j <= s:
        raise ConfigError(f"singularity index {j} outside 1..{s}")
    jj = j - 1
    aj = sdata.points[jj]
    dphi_aj = 1.0 / curve.dpsi(sdata.rho_k[jj])
    lead = (binom_general(n, sdata.lambdas[jj]) * sdata.alphas[jj] * dphi_aj
            * sdata.rho_k[jj] ** n)
    cross = 0.0 + 0j
    lam1 = sdata.lambdas[0]
    for k in range(sdata.u_count):
        if k == jj:
            continue
        Wk = (imap.sqrt_deriv(aj) * imap.sqrt_deriv(sdata.points[k])
              / (imap.eval_inside(sdata.points[k]) - imap.eval_inside(aj)))
        cross = cross + (sdata.alphas[k] * sdata.delta_i_at_a[k] * Wk
                         * sdata.rho_k[k] ** (n + 1))
    cross = binom_general(n, lam1 - 1.0) / sdata.delta_i_at_a[jj] * cross
    return complex((lead + cross) / _monic_denominator(curve, pack, n))


_leggauss_cache = {}


def proposition_I(v, beta: float, rho: float, delta: float, n: int,
                  mode="quadrature", n_nodes=512):
    """Singular contour integral around rho, or its asymptotic main term.

    ``v`` is a callable analytic on the closed disk of radius 2*delta
    about rho (a coefficient sequence is also accepted).  In quadrature
    mode the circle is parametrized by angle, which makes the branch
    (t - rho)^(-beta) = delta^(-beta) exp(-i beta theta), theta in
    (-pi, pi), explicit; Gauss-Legendre panels in theta keep spectral
    accuracy despite the integrand's jump across the cut at theta = pi.
    """
    if beta <= 0.5 and abs(beta - round(beta)) < 1e-12:
        raise DomainError("beta must avoid the nonpositive integers")
    if not callable(v):
        coeffs = np.asarray(v, dtype=complex)

        def v(t, _c=coeffs):
            acc = np.zeros_like(np.asarray(t, complex))
            for c in _c[::-1]:
                acc = acc * t + c
            return acc

    if mode == "asymptotic":
        return complex(binom_general(n, beta - 1.0) * v(rho) * rho ** (n - beta + 1))
    if mode != "quadrature":
        raise ConfigError(f"unknown mode {mode!r}")
    if n_nodes not in _leggauss_cache:
        _leggauss_cache[n_nodes] = np.polynomial.legendre.leggauss(n_nodes)
    x, wts = _leggauss_cache[n_nodes]
    theta = np.pi * x
    t = rho + delta * np.exp(1j * theta)
    integrand = np.exp(1j * (1.0 - beta) * theta) * t ** n * v(t)
    return complex(delta ** (1.0 - beta) / 2.0 * np.sum(wts * integrand))
