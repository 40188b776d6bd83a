"""Recursive integral-transform expansions of the monic polynomials.

Starting from the constant 1, two alternating sequences of contour
transforms are built: odd steps integrate over the inner level curve L_r
against Delta_e * Delta_i * W * sqrt(phi') * phi^n, even steps integrate
over the outer level curve L_{1/r} against the reciprocal weight pair and
the Cauchy-type kernel 1/(phi(zeta) - phi(z)).  Once the contraction
quantity

    q = Lambda_r * Lambda'_r * M_r * r^(2n) / (1/r - r)

drops below 1, the even and odd partial sums converge geometrically and
assemble the degree-n monic orthogonal polynomial in three region
branches (outside L_{1/r}, in the annulus, inside L_r), together with the
leading coefficient gamma_n in two independent ways (the f-route series
for 1/gamma^2 and the g-route series for gamma^2 read off at infinity).

All contour integrals are pulled back to w-plane circles before
discretization, so the trapezoid rule acts on periodic analytic
integrands and converges spectrally.  Every computed transform sample is
checked literally against its a-priori majorant; violations are recorded
on the state.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .curves import CurveSpec, InteriorMap, level_contour
from .errors import ConfigError, ContourProximityError, ContractionError
from .szego import SzegoPack

__all__ = [
    "ExpansionConfig",
    "Bounds",
    "ContourPair",
    "TransformState",
    "ExpansionResult",
    "compute_bounds",
    "check_contraction",
    "f_odd_step",
    "f_even_step",
    "g_steps",
    "expand_thm1",
    "expand_thm2",
]


@dataclass
class ExpansionConfig:
    """Knobs for one expansion run.

    ``r`` defaults to (1 + rho)/2; ``tol`` is the absolute truncation
    target for the transform sums (the polynomial values are O(|phi|^n)
    before normalization); ``k_max`` caps the number of odd/even rounds.
    """

    r: float | None = None
    N: int = 512
    tol: float = 1e-12
    k_max: int = 500
    adapt_nodes: bool = False
    N_cap: int = 2 ** 14

    def resolve_r(self, pack: SzegoPack) -> float:
        r = self.r if self.r is not None else 0.5 * (1.0 + pack.rho)
        if not (pack.rho < r < 1.0):
            raise ConfigError(f"need rho < r < 1 (rho={pack.rho}, r={r})")
        if r <= pack.curve.rho_hat:
            raise ConfigError(f"r={r} must exceed rho_hat={pack.curve.rho_hat}")
        return float(r)


@dataclass
class Bounds:
    lam: float      # max over L_r of |Delta_e Delta_i / sqrt(phi')|
    lam_p: float    # max over L_{1/r} of 1/|sqrt(phi') Delta_e Delta_i|
    m_r: float      # max over L_r x L_{1/r} of |W|
    r: float

    @property
    def prefactor(self):
        return self.lam * self.lam_p * self.m_r / (1.0 / self.r - self.r)


class ContourPair:
    """Precomputed node data on L_r and L_{1/r} shared by all degrees."""

    def __init__(self, curve: CurveSpec, imap: InteriorMap, pack: SzegoPack,
                 r: float, N: int):
        self.curve, self.imap, self.pack = curve, imap, pack
        self.r, self.N = float(r), int(N)
        self.inner = level_contour(curve, r, N)
        self.outer = level_contour(curve, 1.0 / r, N)
        ci, co = self.inner, self.outer
        self.ae_i = pack.delta_e(w=ci.nodes_w)
        self.ai_i = pack.delta_i(ci.nodes_z)
        self.ae_o = pack.delta_e(w=co.nodes_w)
        self.aii_o = pack.delta_i_inv(co.nodes_z, w=co.nodes_w)  # 1/Delta_i
        self.fint_i = imap.eval(ci.nodes_z, w=ci.nodes_w)
        self.sqd_i = imap.sqrt_deriv(ci.nodes_z, w=ci.nodes_w)
        self.fint_o = imap.eval(co.nodes_z, w=co.nodes_w)
        self.sqd_o = imap.sqrt_deriv(co.nodes_z, w=co.nodes_w)
        # odd-step node factor (without the w^(n+1) power)
        self.base_inner = self.ae_i * self.ai_i * ci.sqrt_dpsi / N
        # even-step node factor (without the t^(-n) power; one t from dzeta)
        self.base_outer = co.sqrt_dpsi * self.aii_o / self.ae_o / N
        # kernels between the two contours
        self.W_oi = (self.sqd_o[:, None] * self.sqd_i[None, :]
                     / (self.fint_i[None, :] - self.fint_o[:, None]))
        self.E_io = 1.0 / (co.nodes_w[None, :] - ci.nodes_w[:, None])
        self.maxW_rows = np.abs(self.W_oi).max(axis=1)
        self._bounds = None

    def bounds(self, density=4):
        if self._bounds is None:
            self._bounds = compute_bounds(self.curve, self.imap, self.pack,
                                          self.r, self.N, density=density)
        return self._bounds


def compute_bounds(curve, imap, pack, r=None, N=512, density=4, cfg=None) -> Bounds:
    """Sampled maxima of the three recursion majorants on dense grids."""
    if cfg is not None:
        r = cfg.resolve_r(pack)
        N = cfg.N
    M = density * N
    th = 2 * np.pi * np.arange(M) / M
    wi = r * np.exp(1j * th)
    wo = np.exp(1j * th) / r
    zi, zo = curve.psi(wi), curve.psi(wo)
    sq_i, sq_o = curve.sqrt_dpsi(wi), curve.sqrt_dpsi(wo)
    lam = float(np.max(np.abs(pack.delta_e(w=wi) * pack.delta_i(zi) * sq_i)))
    lam_p = float(np.max(np.abs(sq_o * pack.delta_i_inv(zo, w=wo) / pack.delta_e(w=wo))))
    fi = imap.eval(zi, w=wi)
    sdi = imap.sqrt_deriv(zi, w=wi)
    fo = imap.eval(zo, w=wo)
    sdo = imap.sqrt_deriv(zo, w=wo)
    m_r = 0.0
    for lo in range(0, M, 256):
        hi = min(lo + 256, M)
        block = np.abs(sdo[lo:hi, None] * sdi[None, :] / (fi[None, :] - fo[lo:hi, None]))
        m_r = max(m_r, float(block.max()))
    return Bounds(lam=lam, lam_p=lam_p, m_r=m_r, r=float(r))


def check_contraction(bounds: Bounds, n: int, cfg=None):
    """Evaluate the geometric-series gate; returns (holds, margin)."""
    q = bounds.prefactor * bounds.r ** (2 * n)
    return q < 1.0, q


def _smallest_admissible_n(bounds: Bounds) -> int:
    a = bounds.prefactor
    if a < 1.0:
        return 0
    return int(math.floor(math.log(a) / (-2.0 * math.log(bounds.r)))) + 1


# ----------------------------------------------------------------------
# transform state
# ----------------------------------------------------------------------

class TransformState:
    """Mutable per-degree state of the alternating transform recursion.

    ``variant`` selects the plain sequence ("f") or the modified one ("g")
    whose even step carries phi(z) * phi(zeta)^(-n-1).  The state keeps the
    per-round source vectors so that additional targets can be evaluated
    after the recursion has run.
    """

    def __init__(self, pair: ContourPair, n: int, variant="f"):
        if variant not in ("f", "g"):
            raise ConfigError("variant must be 'f' or 'g'")
        self.pair, self.n, self.variant = pair, int(n), variant
        p = pair
        self.pw_inner = p.inner.nodes_w ** (n + 1) * p.base_inner
        self.t_pow_neg_n = p.outer.nodes_w ** (-n) * p.base_outer
        self.even_on_inner = np.ones(p.N, dtype=complex)
        self.odd_on_outer = None
        self.k = 0                      # completed odd/even rounds
        self.gamma_terms = []           # f: Eq-74 series terms; g: g^(2k+2)(inf)
        self.bounds_ok = True
        self.bound_slack = 1e-8
        self.odd_history = []           # source vectors e * pw_inner per round
        self.even_history = []          # source vectors odd * t^(1-n) factors per round
        self._last_bound_residual = np.inf
        b = pair.bounds()
        self.q_f = b.prefactor * b.r ** (2 * n)
        self.q = self.q_f if variant == "f" else self.q_f * b.r ** 2
        self._b = b

    # -- kernel columns for ad-hoc targets --------------------------------
    def _w_columns(self, z, w=None):
        p = self.pair
        fz = p.imap.eval(z, w=w)
        sz = p.imap.sqrt_deriv(z, w=w)
        return sz[None, :] * p.sqd_i[:, None] / (p.fint_i[:, None] - fz[None, :])

    def odd_step(self, targets=None, w_targets=None, W_cols=None):
        """Produce the next odd transform; refresh outer-node samples.

        Returns samples at ``targets`` (points of G_{1/rho} off L_r) when
        given.  Must alternate with :meth:`even_step`.
        """
        p = self.pair
        src = self.even_on_inner * self.pw_inner
        self.odd_history.append(src)
        self.odd_on_outer = -(p.W_oi @ src)
        # literal Eq-70 / g-odd bound check at the refreshed samples
        bnd = (self._b.lam * self._b.r ** (self.n + 1) * self.q ** self.k
               * p.maxW_rows)
        worst = np.abs(self.odd_on_outer) - bnd * (1.0 + self.bound_slack) - 1e-250
        if np.any(worst > 0):
            self.bounds_ok = False
        out = None
        if targets is not None or W_cols is not None:
            cols = W_cols if W_cols is not None else self._w_columns(
                np.atleast_1d(np.asarray(targets, complex)), w_targets)
            out = -(src @ cols)
        # gamma series term: both routes integrate odd samples against
        # sqrt(phi') phi^(-n-1) / (Delta_e Delta_i) over the outer contour
        term = np.sum(self.odd_on_outer * self.t_pow_neg_n)
        self._pending_gamma = term if self.variant == "f" else -term
        return out

    def even_step(self, targets=None, w_targets=None):
        """Produce the next even transform; refresh inner-node samples.

        The f-route integrates against phi(zeta)^(-n), the g-route against
        phi(zeta)^(-n-1) with the extra phi(z) factor applied afterwards.
        """
        p = self.pair
        if self.odd_on_outer is None:
            raise ConfigError("even_step called before odd_step")
        osrc = self.odd_on_outer * self.t_pow_neg_n
        if self.variant == "f":
            osrc = osrc * p.outer.nodes_w
        self.even_history.append(osrc)
        self.even_on_inner = p.E_io @ osrc
        if self.variant == "g":
            self.even_on_inner = self.even_on_inner * p.inner.nodes_w
        self.gamma_terms.append(self._pending_gamma)
        self.k += 1
        # literal Eq-71 / g-even bound check at the refreshed samples
        b = self._b
        if self.variant == "f":
            bnd = (b.lam * b.lam_p * b.m_r * b.r ** (2 * self.n)
                   / (1.0 / b.r - b.r) * self.q ** (self.k - 1))
        else:
            bnd = (b.r * b.lam * b.lam_p * b.m_r * b.r ** (2 * self.n + 1)
                   / (1.0 / b.r - b.r) * self.q ** (self.k - 1))
        if np.any(np.abs(self.even_on_inner) > bnd * (1.0 + self.bound_slack) + 1e-250):
            self.bounds_ok = False
        if targets is not None:
            zt = np.atleast_1d(np.asarray(targets, complex))
            wt = (np.atleast_1d(np.asarray(w_targets, complex))
                  if w_targets is not None else self.pair.curve.phi(zt))
            cols = 1.0 / (p.outer.nodes_w[:, None] - wt[None, :])
            vals = osrc @ cols
            if self.variant == "g":
                vals = vals * wt
            return vals
        return None

    def even_at_infinity(self):
        """Value of the latest even transform at infinity (g-route only)."""
        if self.variant == "g":
            return self.gamma_terms[-1]
        return 0.0

    def next_bound(self, max_w_cols=None, min_outer_gap=None, max_abs_phi=None):
        """A-priori majorant for the terms of the upcoming round.

        Covers the odd/even values at the attached targets and the next
        term of the leading-coefficient series.
        """
        b = self._b
        mw = max_w_cols if max_w_cols is not None else float(self.pair.maxW_rows.max())
        odd_b = b.lam * b.r ** (self.n + 1) * self.q ** self.k * mw
        gap = min_outer_gap if min_outer_gap is not None else (1.0 / b.r - b.r)
        even_b = (b.lam * b.lam_p * b.m_r * b.r ** (2 * self.n) / gap
                  * self.q ** self.k)
        if self.variant == "g":
            s_max = max_abs_phi if max_abs_phi is not None else 1.0 / b.r
            even_b = even_b * s_max * b.r
        gamma_b = b.lam * b.lam_p * b.m_r * b.r ** (2 * self.n + 1) * self.q ** self.k
        return max(odd_b, even_b, gamma_b)


def f_odd_step(state: TransformState, targets):
    """Next odd transform of the plain sequence, sampled at ``targets``."""
    if state.variant != "f":
        raise ConfigError("state runs the g-sequence")
    return state.odd_step(targets)


def f_even_step(state: TransformState, targets):
    """Next even transform of the plain sequence, sampled at ``targets``."""
    if state.variant != "f":
        raise ConfigError("state runs the g-sequence")
    return state.even_step(targets)


def g_steps(state: TransformState, odd_targets=None, even_targets=None):
    """One odd/even round of the modified sequence; returns both sample sets."""
    if state.variant != "g":
        raise ConfigError("state runs the f-sequence")
    ov = state.odd_step(odd_targets)
    ev = state.even_step(even_targets)
    return ov, ev


# ----------------------------------------------------------------------
# full expansions
# ----------------------------------------------------------------------

@dataclass
class ExpansionResult:
    n: int
    variant: str
    gamma_n: float
    gamma_dev: float          # gamma_n / leading-order main term - 1
    targets: np.ndarray
    values: np.ndarray        # monic P_n at the targets
    branches: list
    terms_used: int
    bound_residual: float
    bounds_ok: bool
    q: float
    state: TransformState = field(repr=False, default=None)
    _norm: complex = field(repr=False, default=1.0)

    def eval(self, z):
        """Monic P_n at new points, replayed from the stored transform rounds."""
        vals, _ = _assemble(self.state, np.atleast_1d(np.asarray(z, complex)),
                            replay=True)
        out = vals * self._norm
        return out[0] if np.ndim(z) == 0 else out.reshape(np.shape(z))


def _classify(pair: ContourPair, targets):
    """Split targets by |phi| region, with the boundary nudge to the annulus."""
    z = np.atleast_1d(np.asarray(targets, dtype=complex))
    w, ok = pair.curve.try_phi(z)
    s = np.where(ok, np.abs(w), 0.0)
    r, N = pair.r, pair.N
    # points within 1e-6 of a dispatch boundary fall to the annulus branch
    region = np.where(s >= 1.0 / r - 1e-6, 2, np.where(s > r - 1e-6, 1, 0))
    # accuracy guard: quadrature aliasing decays like exp(-N * gap)
    gap_needed = math.log(10.0 / 1e-13) / N
    live = ok & (s > 0)
    gap_in = np.abs(np.log(np.where(live, s, r * np.exp(2 * gap_needed)) / r))
    gap_out = np.abs(np.log(np.where(live, s, 1.0) * r))
    bad = live & ((gap_in < gap_needed) | (gap_out < gap_needed))
    if np.any(bad):
        j = int(np.flatnonzero(bad)[0])
        raise ContourProximityError(
            f"target z={z[j]:.6g} lies within the guard band of a quadrature "
            "contour; change the expansion radius r")
    return z, w, ok, region


def _assemble(state: TransformState, z, replay=False, cfg=None):
    """Run (or replay) the recursion and assemble branch values at z."""
    pair = state.pair
    z, w, ok, region = _classify(pair, z)
    need_odd = region <= 1
    need_even = region >= 1
    w_or_none = np.where(ok, w, np.nan)
    odd_sum = np.zeros(z.shape, dtype=complex)
    even_sum = np.ones(z.shape, dtype=complex)
    W_cols = None
    if np.any(need_odd):
        W_cols = state._w_columns(z[need_odd],
                                  w[need_odd] if np.all(ok[need_odd]) else None)
    E_cols = None
    if np.any(need_even):
        E_cols = 1.0 / (pair.outer.nodes_w[:, None] - w[need_even][None, :])

    if replay:
        rounds = zip(state.odd_history, state.even_history)
        for src, osrc in rounds:
            if W_cols is not None:
                odd_sum[need_odd] += -(src @ W_cols)
            if E_cols is not None:
                ev = osrc @ E_cols
                if state.variant == "g":
                    ev = ev * w[need_even]
                even_sum[need_even] += ev
        bound_res = state._last_bound_residual
    else:
        tol, k_max = cfg.tol, cfg.k_max
        mw = float(np.abs(W_cols).max()) if W_cols is not None else None
        gaps = np.abs(1.0 / pair.r - np.abs(w[need_even])) if np.any(need_even) else None
        min_gap = float(gaps.min()) if gaps is not None and gaps.size else None
        max_s = (float(np.abs(w[need_even]).max())
                 if np.any(need_even) else None)
        while True:
            ov = state.odd_step(W_cols=W_cols)
            if ov is not None:
                odd_sum[need_odd] += ov
            ev = state.even_step(targets=z[need_even] if np.any(need_even) else None,
                                 w_targets=w[need_even] if np.any(need_even) else None)
            if ev is not None:
                even_sum[need_even] += ev
            bound_res = state.next_bound(mw, min_gap, max_s)
            if bound_res < tol:
                break
            if state.k >= k_max:
                warnings.warn(
                    f"truncation target {tol:.2g} not reached at k_max={k_max}; "
                    f"remaining bound {bound_res:.3g}", stacklevel=3)
                break
        state._last_bound_residual = bound_res

    vals = np.empty(z.shape, dtype=complex)
    branches = np.empty(z.shape, dtype=object)
    curve, pack = pair.curve, pair.pack
    if np.any(region == 2):
        m = region == 2
        main = (pack.delta_e(w=w[m]) * curve.sqrt_dphi(None, w=w[m]) * w[m] ** state.n)
        vals[m] = main * even_sum[m]
        branches[m] = "exterior"
    if np.any(region == 1):
        m = region == 1
        main = (pack.delta_e(w=w[m]) * curve.sqrt_dphi(None, w=w[m]) * w[m] ** state.n)
        dii = pack.delta_i_inv(z[m], w=w[m])
        vals[m] = main * even_sum[m] - dii * odd_sum[m]
        branches[m] = "annulus"
    if np.any(region == 0):
        m = region == 0
        dii = pack.delta_i_inv(z[m], w=np.where(ok[m], w[m], np.nan))
        vals[m] = -dii * odd_sum[m]
        branches[m] = "interior"
    return vals, branches


def _expand(curve, imap, pack, cfg, n, targets, variant):
    r = cfg.resolve_r(pack)
    pair = _pair_cache(pack, imap, r, cfg.N)
    b = pair.bounds()
    holds, q = check_contraction(b, n)
    if not holds:
        raise ContractionError(
            f"contraction fails at n={n} (q={q:.3g} >= 1)",
            n_min=_smallest_admissible_n(b))
    state = TransformState(pair, n, variant)
    z = np.atleast_1d(np.asarray(targets, dtype=complex))
    vals, branches = _assemble(state, z, replay=False, cfg=cfg)

    main = pack.delta_e_inf * curve.c1 ** -(n + 0.5)
    if variant == "f":
        s = np.sum(state.gamma_terms)
        if abs(np.imag(s)) > 1e-8 * max(1.0, abs(s)):
            warnings.warn(f"Eq-74 series has imaginary part {np.imag(s):.2g}")
        gamma_dev = float(np.expm1(-0.5 * np.log1p(np.real(s))))
        gamma = main * (1.0 + gamma_dev)
        norm = 1.0 / main
    else:
        sg_minus_1 = np.sum(state.gamma_terms)
        if abs(np.imag(sg_minus_1)) > 1e-8:
            warnings.warn(f"gamma^2 series has imaginary part {np.imag(sg_minus_1):.2g}")
        gamma_dev = float(np.expm1(0.5 * np.log1p(np.real(sg_minus_1))))
        gamma = main * (1.0 + gamma_dev)
        norm = 1.0 / (main * (1.0 + np.real(sg_minus_1)))
    return ExpansionResult(
        n=n, variant=variant, gamma_n=float(gamma), gamma_dev=gamma_dev,
        targets=z, values=vals * norm, branches=list(branches),
        terms_used=state.k, bound_residual=state._last_bound_residual,
        bounds_ok=state.bounds_ok, q=q, state=state, _norm=norm)


def _pair_cache(pack, imap, r, N) -> ContourPair:
    cache = getattr(pack, "_pair_cache", None)
    if cache is None:
        cache = {}
        pack._pair_cache = cache
    key = (round(r, 14), N, id(imap))
    if key not in cache:
        cache[key] = ContourPair(pack.curve, imap, pack, r, N)
    return cache[key]


def _expand_adaptive(curve, imap, pack, cfg, n, targets, variant):
    res = _expand(curve, imap, pack, cfg, n, targets, variant)
    if not cfg.adapt_nodes:
        return res
    N = cfg.N
    while N < cfg.N_cap:
        N *= 2
        cfg2 = ExpansionConfig(r=cfg.r, N=N, tol=cfg.tol, k_max=cfg.k_max)
        res2 = _expand(curve, imap, pack, cfg2, n, targets, variant)
        if abs(res2.gamma_n - res.gamma_n) <= 1e-12 * abs(res2.gamma_n):
            return res2
        res = res2
    return res


def expand_thm1(curve: CurveSpec, imap: InteriorMap, pack: SzegoPack,
                cfg: ExpansionConfig, n: int, targets) -> ExpansionResult:
    """Monic P_n and gamma_n from the plain (f) transform series."""
    return _expand_adaptive(curve, imap, pack, cfg, n, targets, "f")


def expand_thm2(curve: CurveSpec, imap: InteriorMap, pack: SzegoPack,
                cfg: ExpansionConfig, n: int, targets) -> ExpansionResult:
    """Monic P_n and gamma_n from the modified (g) transform series."""
    return _expand_adaptive(curve, imap, pack, cfg, n, targets, "g")
