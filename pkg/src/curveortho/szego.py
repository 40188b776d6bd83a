"""Positive analytic weights on L_1 and their Szego functions.

Two weight families are supported.  A *generic* analytic weight is given by
a zero-free Laurent factor V, with h = |V|^2 on the curve.  The *singular*
family multiplies |omega|^-2 by finitely many factors |z - a_k|^(2 lambda_k)
whose base points all sit on one interior level curve L_rho; its exterior
Szego function has algebraic branch points at the a_k and is evaluated in
closed form with branch cuts along radial segments in the w-plane.

Disk-level Szego functions are built from Fourier coefficients of the log
weight on the unit circle:

    D_i(w) = exp(c_0/2 + sum_{m>=1} c_m w^m),   D_e(w) = 1/conj(D_i(1/conj w)).

Curve-level functions compose these with the exterior map (Delta_e) or the
interior map (Delta_i).  Delta_i is normalized positive at the interior-map
center; 1/Delta_i continues across L_1 through the reflection identity
1/Delta_i(z) = Delta_e(z) conj(Delta_e(z*)) conj(Delta_i(z*)).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curves import CurveSpec, InteriorMap, tracked_log_radial, tracked_log_segment
from .errors import ConfigError, CutProximityError, DomainError, ResolutionError

__all__ = [
    "GenericWeight",
    "SingularWeight",
    "DiskSzego",
    "SzegoPack",
    "disk_szego_interior",
    "disk_szego_exterior",
    "build_szego_pack_generic",
    "build_szego_pack_singular",
    "build_szego_pack",
    "continue_delta_i_inverse",
    "h_eval",
    "weight_from_dict",
]


# ----------------------------------------------------------------------
# weight specifications
# ----------------------------------------------------------------------

@dataclass
class GenericWeight:
    """Weight h = |V|^2 on L_1 with V a zero-free finite Laurent series.

    ``v_coeffs`` are ascending powers of z starting at exponent ``v_low``.
    ``rho`` is the user-declared analyticity radius of the exterior Szego
    function (detection is not attempted); defaults to the curve's
    univalence radius when omitted.
    """

    v_coeffs: np.ndarray
    v_low: int = 0
    rho: float | None = None

    def __post_init__(self):
        self.v_coeffs = np.asarray(self.v_coeffs, dtype=complex)
        if self.v_coeffs.size == 0:
            raise ConfigError("V must have at least one coefficient")

    @property
    def kind(self):
        return "generic"

    def v_eval(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for c in self.v_coeffs[::-1]:
            out = out * z + c
        if self.v_low:
            out = out * z ** self.v_low
        return out

    def h_on_curve(self, z):
        return np.abs(self.v_eval(z)) ** 2

    def as_dict(self):
        d = {"kind": "generic",
             "V": [[float(c.real), float(c.imag)] for c in self.v_coeffs]}
        if self.v_low:
            d["V_low"] = self.v_low
        if self.rho is not None:
            d["rho"] = self.rho
        return d


@dataclass
class SingularWeight:
    """Weight |omega(z)|^-2 * prod |z - a_k|^(2 lambda_k), a_k on L_rho.

    ``omega_coeffs`` are coefficients of z^0, z^-1, z^-2, ... (analytic at
    infinity, positive there).  Singularities are (a_k, lambda_k) pairs,
    stored sorted by descending lambda; lambda_k may be any real except
    0, -1, -2, ...
    """

    omega_coeffs: np.ndarray = field(default_factory=lambda: np.array([1.0 + 0j]))
    singularities: tuple = ()
    sigma: float | None = None

    def __post_init__(self):
        self.omega_coeffs = np.asarray(self.omega_coeffs, dtype=complex)
        sings = [(complex(a), float(lam)) for a, lam in self.singularities]
        if not sings:
            raise ConfigError("singular weight needs at least one singularity (s >= 1)")
        for a, lam in sings:
            if lam <= 0 and abs(lam - round(lam)) < 1e-12:
                raise ConfigError(f"lambda = {lam} is a nonpositive integer; "
                                  "fold that factor into omega instead")
        aa = [a for a, _ in sings]
        if len(set(aa)) != len(aa):
            raise ConfigError("singularity points must be pairwise distinct")
        if not (self.omega_coeffs.size and self.omega_coeffs[0].real > 0
                and abs(self.omega_coeffs[0].imag) < 1e-14 * abs(self.omega_coeffs[0])):
            raise ConfigError("omega must be positive at infinity")
        self.singularities = tuple(sorted(sings, key=lambda p: -p[1]))

    @property
    def kind(self):
        return "singular"

    @property
    def lambdas(self):
        return np.array([lam for _, lam in self.singularities])

    @property
    def points(self):
        return np.array([a for a, _ in self.singularities])

    @property
    def u_count(self):
        lam = self.lambdas
        return int(np.sum(np.abs(lam - lam[0]) < 1e-12))

    def omega_eval(self, z):
        z = np.asarray(z, dtype=complex)
        inv = 1.0 / z
        out = np.zeros_like(z)
        for c in self.omega_coeffs[::-1]:
            out = out * inv + c
        return out

    def h_on_curve(self, z):
        z = np.asarray(z, dtype=complex)
        h = np.abs(self.omega_eval(z)) ** -2.0
        for a, lam in self.singularities:
            h = h * np.abs(z - a) ** (2.0 * lam)
        return h

    def as_dict(self):
        d = {"kind": "singular",
             "omega": [[float(c.real), float(c.imag)] for c in self.omega_coeffs],
             "sing": [{"a": [a.real, a.imag], "lambda": lam}
                      for a, lam in self.singularities]}
        if self.sigma is not None:
            d["sigma"] = self.sigma
        return d


def weight_from_dict(d) -> GenericWeight | SingularWeight:
    kind = d.get("kind")
    if kind == "generic":
        v = np.array([complex(re, im) for re, im in d["V"]])
        return GenericWeight(v_coeffs=v, v_low=int(d.get("V_low", 0)),
                             rho=d.get("rho"))
    if kind == "singular":
        om = np.array([complex(re, im) for re, im in d.get("omega", [[1.0, 0.0]])])
        sing = tuple((complex(s["a"][0], s["a"][1]), float(s["lambda"]))
                     for s in d["sing"])
        return SingularWeight(omega_coeffs=om, singularities=sing,
                              sigma=d.get("sigma"))
    raise ConfigError(f"unknown weight kind {kind!r}")


# ----------------------------------------------------------------------
# disk-level Szego functions
# ----------------------------------------------------------------------

class DiskSzego:
    """Interior/exterior Szego pair for a positive function on T_1."""

    def __init__(self, coeffs):
        self.coeffs = np.asarray(coeffs, dtype=complex)  # c_0 .. c_K of log f

    @classmethod
    def from_samples(cls, f_samples, K, tail_tol=1e-12):
        f = np.asarray(f_samples, dtype=float)
        if np.any(f <= 0):
            raise DomainError("Szego function requires strictly positive samples")
        N = f.size
        if N < 2 * K:
            raise ConfigError(f"need N >= 2K samples (got N={N}, K={K})")
        c = np.fft.fft(np.log(f)) / N
        cK = c[: K + 1].copy()
        if abs(cK[K]) > tail_tol * max(abs(cK[0]), 1.0):
            raise ResolutionError(
                f"log-weight Fourier tail |c_K| = {abs(cK[K]):.3g} above tolerance; "
                "increase N and K")
        return cls(cK)

    def interior(self, w):
        """D_i(w) on the closed unit disk."""
        w = np.asarray(w, dtype=complex)
        acc = np.zeros_like(w)
        for c in self.coeffs[:0:-1]:
            acc = (acc + c) * w
        return np.exp(0.5 * self.coeffs[0] + acc)

    def exterior(self, w):
        """D_e(w) = 1/conj(D_i(1/conj w)) on the closed exterior disk."""
        w = np.asarray(w, dtype=complex)
        inv = np.where(np.isinf(w), 0.0, 1.0 / w)
        acc = np.zeros_like(inv)
        for c in np.conj(self.coeffs[:0:-1]):
            acc = (acc + c) * inv
        return np.exp(-0.5 * np.real(self.coeffs[0]) - acc)

    @property
    def interior_at_zero(self):
        return float(np.exp(0.5 * np.real(self.coeffs[0])))


def disk_szego_interior(f_samples, K, tail_tol=1e-12):
    """Evaluator for the interior Szego function of sampled f > 0 on T_1."""
    return DiskSzego.from_samples(f_samples, K, tail_tol).interior


def disk_szego_exterior(f_samples, K, tail_tol=1e-12):
    """Evaluator for the exterior Szego function of sampled f > 0 on T_1."""
    return DiskSzego.from_samples(f_samples, K, tail_tol).exterior


def _adaptive_disk(f_of_theta, K0=64, Kmax=4096, tail_tol_rel=1e-14):
    """Double K until the log-weight Fourier tail is negligible.

    Stops when |c_K| <= 1e-14 * max(|c_0|, 1); the floor at 1 keeps the
    constant-weight case (c_0 = 0) from looping to Kmax.
    """
    K = K0
    while True:
        N = 4 * K
        th = 2 * np.pi * np.arange(N) / N
        f = f_of_theta(th)
        if np.any(f <= 0):
            raise DomainError("weight must be strictly positive on the curve")
        c = np.fft.fft(np.log(f)) / N
        if abs(c[K]) <= tail_tol_rel * max(abs(c[0]), 1.0) or K >= Kmax:
            if K >= Kmax and abs(c[K]) > 1e-10 * max(abs(c[0]), 1.0):
                raise ResolutionError("log-weight Fourier tail still large at K=Kmax")
            return DiskSzego(c[: K + 1])
        K *= 2


# ----------------------------------------------------------------------
# curve-level pack
# ----------------------------------------------------------------------

class SzegoPack:
    """Evaluators for Delta_e, Delta_i and the continued 1/Delta_i."""

    def __init__(self, curve: CurveSpec, imap: InteriorMap, weight, rho, *,
                 disk_ext: DiskSzego | None = None,
                 disk_int: DiskSzego | None = None,
                 sigma: float | None = None,
                 cut_guard: float = 1e-7):
        self.curve = curve
        self.imap = imap
        self.weight = weight
        self.kind = weight.kind
        self.rho = float(rho)
        self.sigma = sigma
        self.cut_guard = cut_guard
        self._disk_ext = disk_ext
        self._disk_int = disk_int
        if self.kind == "singular":
            self._init_singular()
        else:
            self.delta_e_inf = disk_ext.exterior(np.inf) if disk_ext else 1.0
            self.delta_e_inf = float(np.real(self.delta_e_inf))
            self._di_norm = 1.0  # D_i(0) > 0 already

    # -- singular-family setup -------------------------------------------
    def _init_singular(self):
        w = self.weight
        self.points = w.points
        self.lambdas = w.lambdas
        self.rho_k = self.curve.phi(self.points)
        radii = np.abs(self.rho_k)
        if np.max(np.abs(radii - self.rho)) > 1e-10:
            raise ConfigError("singularities do not sit on a common level curve "
                              f"(|phi(a_k)| = {radii})")
        self.thetas = np.mod(np.angle(self.rho_k), 2 * np.pi)
        if self.sigma is None:
            self.sigma = 0.5 * (self.curve.rho_hat + self.rho)
        if not (self.curve.rho_hat < self.sigma < self.rho):
            raise ConfigError(f"sigma = {self.sigma} not in (rho_hat, rho)")
        self._is_int = np.array([abs(l - round(l)) < 1e-12 and l > 0
                                 for l in self.lambdas])
        omega_inf = float(np.real(self.weight.omega_coeffs[0]))
        self.delta_e_inf = omega_inf * float(self.curve.c1) ** (-float(np.sum(self.lambdas)))
        # Delta_i normalization constant (unimodular), fixed lazily
        self._di_norm = None
        self._b_k = self.imap.eval_inside(self.points)
        self._dphi_int_a = self.imap.deriv_inside(self.points)
        self._d2_coeffs = None

    # -- exterior function -------------------------------------------------
    def delta_e(self, z=None, w=None):
        """Delta_e at points z (or at w = phi(z) when given)."""
        if w is None:
            w = self.curve.phi(z)
        warr = np.atleast_1d(np.asarray(w, dtype=complex))
        if self.kind == "generic":
            if np.any(np.abs(warr) < self.rho * (1.0 - 1e-12)):
                raise DomainError(f"Delta_e defined on |phi(z)| >= rho = {self.rho}")
            out = self._disk_ext.exterior(warr)
        else:
            out = self._delta_e_singular(warr, z)
        return out[0] if np.ndim(w) == 0 else out.reshape(np.shape(w))

    def _cut_distance(self, warr):
        """Distance from each w to the nearest branch cut [sigma_k, rho_k]."""
        dmin = np.full(warr.shape, np.inf)
        for k in range(self.points.size):
            if self._is_int[k]:
                d = np.abs(warr - self.rho_k[k])
            else:
                e = np.exp(1j * self.thetas[k])
                t = np.clip(np.real(warr * np.conj(e)), self.sigma, self.rho)
                d = np.abs(warr - t * e)
            dmin = np.minimum(dmin, d)
        return dmin

    def _delta_e_singular(self, warr, z=None):
        if np.any(np.abs(warr) < self.sigma * (1.0 - 1e-12)):
            raise DomainError(f"Delta_e defined on |phi(z)| >= sigma = {self.sigma}")
        if np.any(self._cut_distance(warr) < self.cut_guard):
            raise CutProximityError("Delta_e evaluated within the pole guard of a branch cut")
        zz = self.curve.psi(warr) if z is None else np.atleast_1d(np.asarray(z, complex))
        out = self.weight.omega_eval(zz).astype(complex)
        for k in range(self.points.size):
            lam = self.lambdas[k]
            base_log = self._log_base_factor(warr, k)
            out = out * np.exp(lam * base_log)
        return out

    def _log_base_factor(self, warr, k):
        """Branch-anchored log of phi(z)/(z - a_k) as a function of w.

        Split as log(w/(w - rho_k)) + log((w - rho_k)/(psi(w) - psi(rho_k))).
        The first term's principal form cuts exactly along the radial ray
        (0, rho_k]; the second is cut-free on the exterior annulus and is
        tracked radially from its positive real limit 1/c1 at infinity.
        """
        rk = self.rho_k[k]
        la = -np.log1p(-rk / warr)          # principal log; cut on (0, rho_k]
        lb = tracked_log_radial(lambda t: self._vk(t, k), warr, -np.log(self.curve.c1))
        return la + lb

    def _vk(self, w, k):
        rk = self.rho_k[k]
        ak = self.points[k]
        dw = w - rk
        den = self.curve.psi(w) - ak
        near = np.abs(dw) < 1e-6
        if np.any(near):
            d1 = self.curve.dpsi(rk)
            d2 = self.curve.d2psi(rk)
            safe = np.where(near, 1.0, den)
            series = 1.0 / (d1 + 0.5 * d2 * dw)
            return np.where(near, series, dw / safe)
        return dw / den

    # -- interior function ---------------------------------------------------
    def delta_i(self, z):
        """Delta_i on the closed interior (normalized positive at the center)."""
        zarr = np.atleast_1d(np.asarray(z, dtype=complex))
        fw = self.imap.eval_inside(zarr)
        if np.any(np.abs(fw) > 1.0 + 1e-6):
            raise DomainError("Delta_i evaluated outside the closed interior domain")
        if self.kind == "generic":
            out = self._disk_int.interior(fw)
        else:
            out = self._delta_i_singular(zarr, fw)
        return out[0] if np.ndim(z) == 0 else out.reshape(np.shape(z))

    def _m_factor(self, z, k):
        """(z - a_k)(1 - conj(b_k) phi_int(z)) / (phi_int(z) - b_k), b_k = phi_int(a_k)."""
        ak = self.points[k]
        bk = self._b_k[k]
        fz = self.imap.eval_inside(z)
        dz = z - ak
        den = fz - bk
        near = np.abs(dz) < 1e-6
        if np.any(near):
            if self._d2_coeffs is None:
                dc = self.imap._deriv_coeffs
                self._d2_coeffs = dc[1:] * np.arange(1, dc.size) / self.imap.scale
            d1 = self._dphi_int_a[k]
            d2 = self.imap._horner(self._d2_coeffs, np.array([ak]))[0]
            ratio_series = 1.0 / (d1 + 0.5 * d2 * dz)
            safe = np.where(near, 1.0, den)
            ratio = np.where(near, ratio_series, dz / safe)
        else:
            ratio = dz / den
        return ratio * (1.0 - np.conj(bk) * fz)

    def _delta_i_singular(self, zarr, fw):
        if self._di_norm is None:
            self._di_norm = 1.0
            v0 = self._delta_i_singular(np.array([self.imap.z0]),
                                        np.array([0.0 + 0j]))[0]
            self._di_norm = np.conj(v0) / abs(v0)
        out = np.ones_like(zarr)
        om = self.weight
        if om.omega_coeffs.size > 1 or abs(om.omega_coeffs[0] - 1.0) > 1e-15:
            out = self._disk_int.interior(fw)
        for k in range(self.points.size):
            anchor = np.log(self._m_factor(np.atleast_1d(self.imap.z0), k)[0])
            lm = tracked_log_segment(lambda p, kk=k: self._m_factor(p, kk),
                                     self.imap.z0, zarr, anchor)
            out = out * np.exp(self.lambdas[k] * np.atleast_1d(lm))
        return self._di_norm * out

    # -- continued reciprocal --------------------------------------------------
    def delta_i_inv(self, z, w=None):
        """1/Delta_i, continued across L_1 up to G_{1/rho}.

        Inside the closed interior this is the direct reciprocal; on the
        band 1 < |phi(z)| < 1/rho it is
        Delta_e(z) conj(Delta_e(z*)) conj(Delta_i(z*)).
        """
        zarr = np.atleast_1d(np.asarray(z, dtype=complex))
        if w is None:
            warr, ok = self.curve.try_phi(zarr)
        else:
            warr = np.atleast_1d(np.asarray(w, dtype=complex))
            ok = np.ones(warr.shape, dtype=bool)
        absw = np.where(ok, np.abs(warr), 0.0)
        hi = np.inf if self.rho == 0 else 1.0 / self.rho
        if np.any(absw >= hi * (1.0 - 1e-12)):
            raise DomainError("1/Delta_i continuation defined only on |phi(z)| < 1/rho")
        band = absw > 1.0 + 1e-12
        out = np.empty_like(zarr)
        if np.any(~band):
            out[~band] = 1.0 / self.delta_i(zarr[~band])
        if np.any(band):
            wb = warr[band]
            vstar = 1.0 / np.conj(wb)
            zstar = self.curve.psi(vstar)
            out[band] = (self.delta_e(w=wb)
                         * np.conj(self.delta_e(w=vstar))
                         * np.conj(self.delta_i(zstar)))
        return out[0] if np.ndim(z) == 0 else out.reshape(np.shape(z))


def build_szego_pack_generic(curve: CurveSpec, imap: InteriorMap,
                             weight: GenericWeight, K0=64) -> SzegoPack:
    """Szego pack for h = |V|^2: Delta_e = D_e(phi(z)), Delta_i = D_i(phi_int(z))."""
    disk_ext = _adaptive_disk(lambda th: weight.h_on_curve(curve.psi(np.exp(1j * th))), K0)

    def f_interior(th):
        zb = imap.inverse(np.exp(1j * th))
        return weight.h_on_curve(zb)

    disk_int = _adaptive_disk(f_interior, K0)
    rho = weight.rho if weight.rho is not None else curve.rho_hat
    rho = max(float(rho), curve.rho_hat)
    return SzegoPack(curve, imap, weight, rho, disk_ext=disk_ext, disk_int=disk_int)


def build_szego_pack_singular(curve: CurveSpec, imap: InteriorMap,
                              weight: SingularWeight, K0=64) -> SzegoPack:
    """Szego pack for the algebraic-singularity family (closed forms + cuts)."""
    rho = float(np.mean(np.abs(curve.phi(weight.points))))
    disk_int = None
    om = weight.omega_coeffs
    if om.size > 1 or abs(om[0] - 1.0) > 1e-15:

        def f_omega(th):
            zb = imap.inverse(np.exp(1j * th))
            return np.abs(weight.omega_eval(zb)) ** -2.0

        disk_int = _adaptive_disk(f_omega, K0)
    # omega must not vanish on the closed exterior or at the singularities
    th = np.linspace(0, 2 * np.pi, 512, endpoint=False)
    for rr in (1.0, 1.5, 4.0):
        if np.min(np.abs(weight.omega_eval(curve.psi(rr * np.exp(1j * th))))) < 1e-12:
            raise ConfigError("omega vanishes on the closed exterior domain")
    if np.min(np.abs(weight.omega_eval(weight.points))) < 1e-12:
        raise ConfigError("omega vanishes at a singularity point")
    return SzegoPack(curve, imap, weight, rho, disk_int=disk_int, sigma=weight.sigma)


def build_szego_pack(curve, imap, weight, **kw):
    if weight.kind == "generic":
        return build_szego_pack_generic(curve, imap, weight, **kw)
    return build_szego_pack_singular(curve, imap, weight, **kw)


def continue_delta_i_inverse(pack: SzegoPack, curve: CurveSpec, z):
    """Reflection-identity continuation of 1/Delta_i to the band outside L_1."""
    w = curve.phi(z)
    absw = np.min(np.abs(np.atleast_1d(w)))
    if absw < 0.98:
        raise DomainError("continuation requested deep inside the interior domain")
    return pack.delta_i_inv(z, w=w)


def h_eval(weight, curve: CurveSpec, z, on_curve_tol=1e-6):
    """Weight value at a point of L_1 (off-curve points are rejected)."""
    zarr = np.atleast_1d(np.asarray(z, dtype=complex))
    w, ok = curve.try_phi(zarr)
    if not np.all(ok) or np.any(np.abs(np.abs(w) - 1.0) > on_curve_tol):
        raise DomainError("h is defined on the curve L_1 only")
    vals = weight.h_on_curve(zarr)
    return float(vals[0]) if np.ndim(z) == 0 else vals.reshape(np.shape(z))
