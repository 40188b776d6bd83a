"""Analytic Jordan curves through explicit exterior conformal maps.

A curve is specified by the finite Laurent series of the map ``psi`` taking
``{|w| > 1}`` onto the curve's exterior,

    psi(w) = c1*w + c0 + sum_k cneg[k] * w**-(k+1),      c1 > 0,

together with an estimated univalence radius ``rho_hat`` (the smallest
radius such that psi stays analytic and injective outside it).  Everything
else is derived: the inverse map ``phi`` (damped Newton), level curves
L_r = psi({|w| = r}), Schwarz reflection across L_1, an interior Riemann
map fitted by boundary collocation, and the normalization-free kernel
W(zeta, z) built from the interior map.

Square roots of conformal derivatives are taken on globally consistent
single-valued branches: sqrt(psi') is anchored positive at infinity and
continued radially, sqrt of the interior-map derivative is anchored
positive at the map's center and continued along straight segments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CoincidenceError,
    ConfigError,
    DomainError,
    FitError,
    IterationError,
)

__all__ = [
    "CurveSpec",
    "Contour",
    "InteriorMap",
    "circle_curve",
    "joukowski_curve",
    "level_contour",
    "estimate_rho_hat",
    "fit_interior_map",
    "kernel_W",
    "tracked_log_radial",
    "tracked_log_segment",
]


# ----------------------------------------------------------------------
# branch-tracked logarithms
# ----------------------------------------------------------------------

def tracked_log_segment(func, z_start, z_targets, log_at_start, steps=48):
    """log(func) continued along straight segments from a common anchor.

    ``func`` must be analytic and zero-free on the segments
    [z_start, z_targets].  ``log_at_start`` fixes the branch at the anchor.
    """
    z = np.atleast_1d(np.asarray(z_targets, dtype=complex))
    t = np.linspace(0.0, 1.0, steps + 1)[:, None]
    path = z_start + t * (z - z_start)
    vals = func(path)
    ratios = vals[1:] / vals[:-1]
    out = log_at_start + np.sum(np.log(ratios), axis=0)
    if np.isscalar(z_targets) or np.ndim(z_targets) == 0:
        return out[0]
    return out.reshape(np.shape(z_targets))


def tracked_log_radial(func, w, limit_log, big_radius=None, steps=48):
    """log(func) continued radially inward from a large circle.

    The branch is anchored at infinity, where ``func`` tends to
    ``exp(limit_log)``.  Radial paths never cross the radial branch cuts
    used elsewhere in the package unless aimed exactly along one.
    """
    warr = np.atleast_1d(np.asarray(w, dtype=complex))
    absw = np.abs(warr)
    if np.any(absw == 0):
        raise DomainError("radial log tracking undefined at w = 0")
    R = big_radius if big_radius is not None else max(64.0, 8.0 * float(absw.max()))
    # geometric radii from R down to |w| along each point's own direction
    t = np.linspace(0.0, 1.0, steps + 1)[:, None]
    radii = absw * (R / absw) ** (1.0 - t)
    path = radii * (warr / absw)
    vals = func(path)
    start = np.log(vals[0]) - limit_log
    # at radius R the function is essentially its limit; principal log there
    out = limit_log + start + np.sum(np.log(vals[1:] / vals[:-1]), axis=0)
    if np.isscalar(w) or np.ndim(w) == 0:
        return out[0]
    return out.reshape(np.shape(w))


# ----------------------------------------------------------------------
# curve specification
# ----------------------------------------------------------------------

@dataclass
class CurveSpec:
    """Exterior conformal map as a finite Laurent series.

    Attributes
    ----------
    c1 : float
        Leading coefficient, equals psi'(inf); must be positive.
    c0 : complex
        Constant term.
    cneg : ndarray
        Coefficients of w**-1, w**-2, ... (may be empty).
    rho_hat : float
        Estimated univalence radius in [0, 1).  Estimated on construction
        when not supplied.
    """

    c1: float
    c0: complex = 0.0
    cneg: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    rho_hat: float | None = None

    def __post_init__(self):
        if self.c1 <= 0:
            raise ConfigError("psi'(inf) = c1 must be positive")
        self.cneg = np.asarray(self.cneg, dtype=complex)
        if self.rho_hat is None:
            self.rho_hat = estimate_rho_hat(self)
        if not (0.0 <= self.rho_hat < 1.0):
            raise ConfigError(f"univalence radius estimate {self.rho_hat} not in [0, 1)")

    # -- forward map ----------------------------------------------------
    def psi(self, w, check=False):
        """Evaluate psi(w); the point at infinity maps to infinity."""
        w = np.asarray(w, dtype=complex)
        if check and np.any(np.abs(w) <= self.rho_hat):
            raise DomainError("psi evaluated at |w| <= rho_hat")
        out = self.c1 * w + self.c0
        if self.cneg.size:
            inv = 1.0 / w
            acc = np.zeros_like(out)
            # Horner in 1/w
            for c in self.cneg[::-1]:
                acc = (acc + c) * inv
            out = out + acc
        if np.ndim(w) == 0 and np.isinf(w):
            return complex(np.inf, np.inf)
        return out

    def dpsi(self, w):
        """psi'(w) from the same coefficients."""
        w = np.asarray(w, dtype=complex)
        out = np.full_like(w, self.c1, dtype=complex)
        if self.cneg.size:
            inv = 1.0 / w
            acc = np.zeros_like(out)
            for k in range(self.cneg.size):
                acc = acc - (k + 1) * self.cneg[k] * inv ** (k + 2)
            out = out + acc
        return out

    def d2psi(self, w):
        w = np.asarray(w, dtype=complex)
        out = np.zeros_like(w, dtype=complex)
        inv = 1.0 / w
        for k in range(self.cneg.size):
            out = out + (k + 1) * (k + 2) * self.cneg[k] * inv ** (k + 3)
        return out

    # -- inverse map ----------------------------------------------------
    def try_phi(self, z, tol=1e-13, maxiter=50):
        """Damped Newton inversion; returns (w, ok_mask) without raising."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        w = (z - self.c0) / self.c1
        scale = np.maximum(1.0, np.abs(z))
        # keep seeds off the singular disk
        small = np.abs(w) <= max(self.rho_hat, 1e-12)
        w = np.where(small, (self.rho_hat + 0.5) * np.exp(1j * np.angle(w + 1e-30)), w)
        res = np.abs(self.psi(w) - z)
        for _ in range(maxiter):
            if np.all(res <= tol * scale):
                break
            dw = (self.psi(w) - z) / self.dpsi(w)
            step = np.ones_like(res)
            for _ in range(12):
                w_new = w - step * dw
                res_new = np.abs(self.psi(w_new) - z)
                bad = (res_new > res) & (res > tol * scale)
                if not np.any(bad):
                    break
                step = np.where(bad, 0.5 * step, step)
            w = w - step * dw
            res = np.abs(self.psi(w) - z)
        ok = (res <= tol * scale) & (np.abs(w) > self.rho_hat * (1.0 + 1e-12) + 0.0)
        if self.rho_hat == 0.0:
            ok = (res <= tol * scale) & (np.abs(w) > 0.0)
        return w, ok

    def phi(self, z, tol=1e-13, maxiter=50):
        """Inverse of psi.  Raises when z lies inside the unmapped core."""
        w, ok = self.try_phi(z, tol=tol, maxiter=maxiter)
        if not np.all(ok):
            zz = np.atleast_1d(np.asarray(z, dtype=complex))
            res = np.abs(self.psi(w) - zz)
            bad = np.flatnonzero(~ok)
            j = bad[0]
            if res[j] > tol * max(1.0, abs(zz[j])):
                raise IterationError(
                    f"phi Newton failed at z={zz[j]:.6g} (residual {res[j]:.3g})",
                    residual=float(res[j]),
                )
            raise DomainError(f"z={zz[j]:.6g} maps inside |w| <= rho_hat={self.rho_hat:.4g}")
        if np.isscalar(z) or np.ndim(z) == 0:
            return complex(w[0])
        return w.reshape(np.shape(z))

    def dphi(self, z, w=None):
        """phi'(z) = 1/psi'(phi(z))."""
        if w is None:
            w = self.phi(z)
        return 1.0 / self.dpsi(w)

    # -- branch-consistent roots ----------------------------------------
    def log_dpsi(self, w):
        """Single-valued log psi' on |w| > rho_hat, real at infinity."""
        return tracked_log_radial(self.dpsi, w, np.log(self.c1))

    def sqrt_dpsi(self, w):
        """Global branch of sqrt(psi'), positive at infinity."""
        return np.exp(0.5 * self.log_dpsi(w))

    def sqrt_dphi(self, z, w=None):
        """Global branch of sqrt(phi'), positive at infinity."""
        if w is None:
            w = self.phi(z)
        return 1.0 / self.sqrt_dpsi(w)

    # -- reflection ------------------------------------------------------
    def schwarz_reflect(self, z, w=None):
        """Reflection across L_1: z* = psi(1/conj(phi(z)))."""
        if w is None:
            w = self.phi(z)
        absw = np.abs(w)
        hi = np.inf if self.rho_hat == 0 else 1.0 / self.rho_hat
        if np.any(absw <= self.rho_hat) or np.any(absw >= hi):
            raise DomainError("Schwarz reflection defined only on the band "
                              f"rho_hat < |phi(z)| < 1/rho_hat (rho_hat={self.rho_hat:.4g})")
        return self.psi(1.0 / np.conj(w))

    def diameter(self):
        th = np.linspace(0.0, 2 * np.pi, 64, endpoint=False)
        zb = self.psi(np.exp(1j * th))
        return float(np.abs(zb[:, None] - zb[None, :]).max())

    def as_dict(self):
        return {
            "c1": float(self.c1),
            "c0": [float(np.real(self.c0)), float(np.imag(self.c0))],
            "cneg": [[float(c.real), float(c.imag)] for c in self.cneg],
        }


def circle_curve():
    """Unit circle: psi is the identity."""
    return CurveSpec(c1=1.0, c0=0.0, cneg=np.zeros(0, complex), rho_hat=0.0)


def joukowski_curve(c=0.25):
    """Ellipse psi(w) = w + c/w with semi-axes 1+c and 1-c (0 < c < 1)."""
    return CurveSpec(c1=1.0, c0=0.0, cneg=np.array([c], dtype=complex))


# ----------------------------------------------------------------------
# univalence radius estimation
# ----------------------------------------------------------------------

def _injective_on_grid(spec: CurveSpec, r: float, n_ang=256, n_rad=5) -> bool:
    radii = np.geomspace(max(r, 1e-6), 1.0, n_rad)
    th = np.linspace(0.0, 2 * np.pi, n_ang, endpoint=False)
    w = (radii[:, None] * np.exp(1j * th)[None, :]).ravel()
    if np.min(np.abs(spec.dpsi(w))) < 1e-9 * spec.c1:
        return False
    z = spec.psi(w)
    dw = np.abs(w[:, None] - w[None, :])
    dz = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(dw, 1.0)
    np.fill_diagonal(dz, 1.0)
    ratio = dz / dw
    return bool(ratio.min() > 1e-3 * spec.c1)


def estimate_rho_hat(spec: CurveSpec, margin=0.02) -> float:
    """Estimate the univalence radius of psi.

    The radius where psi' first vanishes is found exactly from the Laurent
    coefficients (roots of a polynomial in 1/w); injectivity beyond it is
    checked on sampled grids and refined by bisection.  The returned value
    carries a 2% safety margin.  Heuristic by design: grid checks cannot
    prove univalence.
    """
    # psi'(1/u) = c1 - sum (k+1) cneg[k] u^(k+2): polynomial in u
    if spec.cneg.size:
        coeffs = np.zeros(spec.cneg.size + 3, dtype=complex)
        coeffs[0] = spec.c1
        for k in range(spec.cneg.size):
            coeffs[k + 2] = -(k + 1) * spec.cneg[k]
        roots = np.roots(coeffs[::-1])
        roots = roots[np.abs(roots) > 1e-14]
        rho_deriv = float(np.max(1.0 / np.abs(roots))) if roots.size else 0.0
    else:
        rho_deriv = 0.0
    if rho_deriv >= 1.0:
        raise ConfigError(
            f"psi' vanishes at |w| = {rho_deriv:.4g} >= 1: not an analytic Jordan curve")
    lo, hi = rho_deriv, 0.999
    if not _injective_on_grid(spec, hi):
        raise ConfigError("psi not injective on the sampled exterior of T_0.999: "
                          "curve rejected as non-analytic-Jordan")
    if _injective_on_grid(spec, max(lo, 1e-6)):
        hi = max(lo, 1e-6)
    else:
        for _ in range(20):
            if hi - lo < 1e-3:
                break
            mid = 0.5 * (lo + hi)
            if _injective_on_grid(spec, mid):
                hi = mid
            else:
                lo = mid
    rho = min(hi * (1.0 + margin), 0.9999)
    return 0.0 if rho < 2e-3 else float(rho)


# ----------------------------------------------------------------------
# level-curve contours
# ----------------------------------------------------------------------

@dataclass
class Contour:
    """Equispaced trapezoid nodes on T_r mapped through psi."""

    r: float
    N: int
    nodes_w: np.ndarray
    nodes_z: np.ndarray
    derivative_samples: np.ndarray   # psi'(nodes_w)
    sqrt_dpsi: np.ndarray            # tracked branch of sqrt(psi')

    def cauchy_sum(self, integrand_samples):
        """(1/2 pi i) * contour integral via the w-plane trapezoid rule.

        ``integrand_samples`` are values of g(zeta); the node weights
        psi'(w) * w / N are applied here.
        """
        return np.sum(integrand_samples * self.derivative_samples * self.nodes_w) / self.N


def level_contour(spec: CurveSpec, r: float, N: int) -> Contour:
    """Contour L_r with N (power of two, >= 16) trapezoid nodes."""
    if r <= spec.rho_hat:
        raise DomainError(f"level curve radius {r} <= rho_hat = {spec.rho_hat}")
    if N < 16 or (N & (N - 1)) != 0:
        raise ConfigError("node count must be a power of two >= 16")
    w = r * np.exp(2j * np.pi * np.arange(N) / N)
    return Contour(
        r=float(r),
        N=int(N),
        nodes_w=w,
        nodes_z=spec.psi(w),
        derivative_samples=spec.dpsi(w),
        sqrt_dpsi=spec.sqrt_dpsi(w),
    )


# ----------------------------------------------------------------------
# interior Riemann map
# ----------------------------------------------------------------------

class InteriorMap:
    """Conformal map of the interior domain G_1 onto the unit disk.

    Represented as (z - z0) * exp(G(z)) with G a fitted polynomial, stored
    as Taylor coefficients about z0 in the scaled variable (z - z0)/scale.
    Outside the closed interior the map is evaluated through the Schwarz
    reflection identity phi_int(z) = 1/conj(phi_int(z*)), which keeps all
    polynomial evaluations in the region where the fit is accurate.
    """

    def __init__(self, curve: CurveSpec, z0: complex, scale: float,
                 taylor_coeffs: np.ndarray, residual: float):
        self.curve = curve
        self.z0 = complex(z0)
        self.scale = float(scale)
        self.taylor_coeffs = np.asarray(taylor_coeffs, dtype=complex)
        self.residual = float(residual)
        dc = self.taylor_coeffs
        self._deriv_coeffs = dc[1:] * np.arange(1, dc.size) / self.scale
        self._band_sign = None
        self._inv_table = None

    # -- polynomial core (valid on closed G_1) ---------------------------
    def _horner(self, coeffs, z):
        u = (np.asarray(z, dtype=complex) - self.z0) / self.scale
        acc = np.zeros_like(u)
        for c in coeffs[::-1]:
            acc = acc * u + c
        return acc

    def eval_inside(self, z):
        return self._horner(self.taylor_coeffs, z)

    def deriv_inside(self, z):
        return self._horner(self._deriv_coeffs, z)

    def _sqrt_deriv_inside(self, z):
        # deriv(z0) = a1/scale > 0 by construction: principal log is real there
        d0 = self._deriv_coeffs[0]
        return np.exp(0.5 * tracked_log_segment(self.deriv_inside, self.z0, z, np.log(d0)))

    # -- band extension (rho_hat < |phi(z)|, outside closed G_1) ---------
    def _band_parts(self, w):
        v = 1.0 / np.conj(w)
        zs = self.curve.psi(v)
        fzs = self.eval_inside(zs)
        return v, zs, fzs

    def eval_band(self, w):
        _, _, fzs = self._band_parts(w)
        return 1.0 / np.conj(fzs)

    def deriv_band(self, w):
        v, zs, fzs = self._band_parts(w)
        num = np.conj(self.deriv_inside(zs) * self.curve.dpsi(v))
        return num / (w * w * np.conj(fzs) ** 2 * self.curve.dpsi(w))

    def _sqrt_deriv_band(self, w):
        if self._band_sign is None:
            ws = 1.0 + 1e-7
            zseam = self.curve.psi(ws)
            cand = self._sqrt_band_candidate(np.array([ws]))[0]
            ref = complex(self._sqrt_deriv_inside(zseam))
            self._band_sign = 1.0 if abs(cand / ref - 1.0) < abs(cand / ref + 1.0) else -1.0
        return self._band_sign * self._sqrt_band_candidate(w)

    def _sqrt_band_candidate(self, w):
        v, zs, fzs = self._band_parts(w)
        num = np.conj(self._sqrt_deriv_inside(zs) * self.curve.sqrt_dpsi(v))
        return num / (w * np.conj(fzs) * self.curve.sqrt_dpsi(w))

    # -- region-dispatching public surface --------------------------------
    def _split(self, z, w=None):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if w is not None:
            w = np.atleast_1d(np.asarray(w, dtype=complex))
            band = np.abs(w) > 1.0 + 1e-12
        else:
            w, ok = self.curve.try_phi(z)
            band = ok & (np.abs(w) > 1.0 + 1e-12)
        return z, w, band

    def eval(self, z, w=None):
        """phi_int(z) anywhere on G_{1/rho_hat}; pass w=phi(z) when known."""
        zz, ww, band = self._split(z, w)
        out = np.empty_like(zz)
        if np.any(~band):
            out[~band] = self.eval_inside(zz[~band])
        if np.any(band):
            out[band] = self.eval_band(ww[band])
        return out[0] if np.ndim(z) == 0 else out.reshape(np.shape(z))

    def deriv(self, z, w=None):
        zz, ww, band = self._split(z, w)
        out = np.empty_like(zz)
        if np.any(~band):
            out[~band] = self.deriv_inside(zz[~band])
        if np.any(band):
            out[band] = self.deriv_band(ww[band])
        return out[0] if np.ndim(z) == 0 else out.reshape(np.shape(z))

    def sqrt_deriv(self, z, w=None):
        """Globally consistent branch of sqrt(phi_int')."""
        zz, ww, band = self._split(z, w)
        out = np.empty_like(zz)
        if np.any(~band):
            out[~band] = self._sqrt_deriv_inside(zz[~band])
        if np.any(band):
            out[band] = self._sqrt_deriv_band(ww[band])
        return out[0] if np.ndim(z) == 0 else out.reshape(np.shape(z))

    def inverse(self, w, tol=1e-13, maxiter=40):
        """delta(w): Newton inversion seeded from a boundary-correspondence table."""
        if self._inv_table is None:
            th = np.linspace(0.0, 2 * np.pi, 2048, endpoint=False)
            rad = np.array([0.2, 0.5, 0.75, 0.9, 1.0])
            zt = self.z0 + rad[:, None] * (self.curve.psi(np.exp(1j * th))[None, :] - self.z0)
            zt = zt.ravel()
            self._inv_table = (zt, self.eval_inside(zt))
        warr = np.atleast_1d(np.asarray(w, dtype=complex))
        zt, ft = self._inv_table
        seeds = zt[np.argmin(np.abs(ft[None, :] - warr[:, None]), axis=1)]
        z = seeds.copy()
        for _ in range(maxiter):
            f = self.eval_inside(z) - warr
            if np.all(np.abs(f) <= tol):
                break
            z = z - f / self.deriv_inside(z)
        res = np.abs(self.eval_inside(z) - warr)
        if np.any(res > 1e-10):
            raise IterationError("interior-map inversion failed", residual=float(res.max()))
        return z[0] if np.ndim(w) == 0 else z.reshape(np.shape(w))


def fit_interior_map(spec: CurveSpec, z0=None, degree=64, n_boundary=None,
                     residual_tol=1e-8, band_guard=1e-6) -> InteriorMap:
    """Fit the interior Riemann map by least-squares boundary collocation.

    Writing phi_int(z) = (z - z0) exp(G(z)) turns the boundary condition
    |phi_int| = 1 on L_1 into the linear Dirichlet data
    Re G = -log|z - z0|, solved for polynomial G in the least-squares
    sense; Im G(z0) = 0 pins phi_int'(z0) > 0.  The reported residual is
    the max of ||phi_int|^2 - 1| on a fresh boundary grid.  Centers whose
    map vanishes on the sampled band are retried with shifted z0.
    """
    if degree < 8:
        raise ConfigError("interior-map degree must be >= 8")
    N = n_boundary or max(4 * degree, 256)
    centers = [z0] if z0 is not None else [spec.c0, spec.c0 + 0.05 * spec.c1,
                                           spec.c0 - 0.07j * spec.c1]
    last_exc = None
    for center in centers:
        try:
            imap = _fit_at_center(spec, complex(center), degree, N, residual_tol)
        except FitError as exc:
            last_exc = exc
            continue
        if _band_nonvanishing(spec, imap, band_guard):
            return imap
        last_exc = ConfigError(
            f"fitted interior map vanishes on the band for center z0={center}")
    if isinstance(last_exc, FitError):
        raise last_exc
    raise ConfigError(
        "no retry center gave a band-nonvanishing interior map; supply z0 manually"
    ) from last_exc


def _fit_at_center(spec, z0, degree, N, residual_tol):
    th = np.linspace(0.0, 2 * np.pi, N, endpoint=False)
    zb = spec.psi(np.exp(1j * th))
    if np.min(np.abs(zb - z0)) < 1e-9:
        raise FitError("center z0 lies on the boundary")
    scale = float(np.max(np.abs(zb - z0)))
    u = (zb - z0) / scale
    V = u[:, None] ** np.arange(degree + 1)[None, :]
    A = np.hstack([V.real, -V.imag[:, 1:]])
    rhs = -np.log(np.abs(zb - z0))
    x, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    b = np.zeros(degree + 1, dtype=complex)
    b.real = x[: degree + 1]
    b.imag[1:] = x[degree + 1:]
    # exp of the fitted series, then multiply by (z - z0)
    m_out = min(2 * degree + 16, 320)
    p = np.zeros(m_out + 1, dtype=complex)
    p[1: degree + 1] = b[1:]
    e = np.zeros(m_out + 1, dtype=complex)
    e[0] = 1.0
    for n in range(1, m_out + 1):
        kmax = min(n, degree)
        ks = np.arange(1, kmax + 1)
        e[n] = np.dot(ks * p[ks], e[n - ks]) / n
    coeffs = np.zeros(m_out + 2, dtype=complex)
    coeffs[1:] = scale * np.exp(b[0]) * e
    imap = InteriorMap(spec, z0, scale, coeffs, residual=np.nan)
    # fresh grid, offset by half a node
    th2 = th + np.pi / N
    zb2 = spec.psi(np.exp(1j * th2))
    residual = float(np.max(np.abs(np.abs(imap.eval_inside(zb2)) ** 2 - 1.0)))
    imap.residual = residual
    if residual > residual_tol:
        raise FitError(f"interior-map fit residual {residual:.3g} > {residual_tol:.3g}")
    return imap


def _band_nonvanishing(spec, imap, guard):
    lo = spec.rho_hat + 0.02 * (1.0 - spec.rho_hat)
    radii = np.linspace(lo, 0.985, 8)
    th = np.linspace(0.0, 2 * np.pi, 128, endpoint=False)
    w = (radii[:, None] * np.exp(1j * th)[None, :]).ravel()
    vals = imap.eval_inside(spec.psi(w))
    return bool(np.min(np.abs(vals)) > guard)


# ----------------------------------------------------------------------
# the kernel W
# ----------------------------------------------------------------------

def kernel_W(imap: InteriorMap, zeta, z, pole_guard=None):
    """Meromorphic kernel with unit residue on the diagonal.

    W(zeta, z) = sqrt(phi_int'(z)) sqrt(phi_int'(zeta))
                 / (phi_int(zeta) - phi_int(z)).
    Independent of the choice of interior map up to the branch convention
    fixed by the tracked square roots.
    """
    guard = pole_guard if pole_guard is not None else 1e-8 * imap.curve.diameter()
    zeta_arr = np.asarray(zeta, dtype=complex)
    z_arr = np.asarray(z, dtype=complex)
    if np.any(np.abs(zeta_arr - z_arr) < guard):
        raise CoincidenceError("kernel arguments inside the pole-guard radius; "
                               "use the residue contract for the diagonal limit")
    num = imap.sqrt_deriv(z) * imap.sqrt_deriv(zeta)
    return num / (imap.eval(zeta) - imap.eval(z))
