"""Zeros of the orthogonal polynomials and their limiting distribution.

Roots come from the balanced companion matrix with one Newton polish.
The distribution checks push zeros through the exterior map phi: for the
singular weight family the counting measures converge weak* to the
equilibrium measure of the level curve L_rho, whose phi-pushforward is
uniform angular measure, so a Kolmogorov-Smirnov distance against the
uniform law summarizes agreement.  Region counts and the discrete
logarithmic potential give the complementary location checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import CurveSpec
from .errors import ConfigError, ResolutionError
from .oracle import PolyCoeffs

__all__ = [
    "ZeroSet",
    "roots",
    "equilibrium_compare",
    "zero_free_region_check",
    "count_zeros_inside_level",
    "limit_angle_probe",
    "discrete_potential_mismatch",
    "zero_scatter_svg",
]


@dataclass
class ZeroSet:
    """Zeros of one monic polynomial with their phi-images.

    ``abs_phi`` is |phi(zero)| where the inverse map reaches the zero and
    0.0 for zeros inside the unmapped core; ``angle_phi`` is the argument
    in [0, 2 pi) (NaN when unavailable).
    """

    n: int
    zeros: np.ndarray
    abs_phi: np.ndarray
    angle_phi: np.ndarray
    phi_defined: np.ndarray

    def moduli_stats(self):
        live = self.abs_phi[self.phi_defined]
        if live.size == 0:
            return {"min": 0.0, "max": 0.0, "mean": 0.0, "mapped": 0}
        return {"min": float(live.min()), "max": float(live.max()),
                "mean": float(live.mean()), "mapped": int(live.size)}


def roots(poly: PolyCoeffs, curve: CurveSpec | None = None) -> ZeroSet:
    """Zeros via balanced companion-matrix eigenvalues plus a Newton step."""
    if poly.n < 1:
        raise ConfigError("need degree >= 1 to have zeros")
    coeffs = np.asarray(poly.coeffs, dtype=complex)
    if abs(coeffs[-1] - 1.0) > 1e-12:
        raise ConfigError("roots expects a monic polynomial")
    z = np.roots(coeffs[::-1])  # companion matrix, balanced by LAPACK
    dcoeffs = coeffs[1:] * np.arange(1, coeffs.size)
    p = np.polyval(coeffs[::-1], z)
    dp = np.polyval(dcoeffs[::-1], z)
    step = np.where(np.abs(dp) > 1e-30, p / np.where(dp == 0, 1.0, dp), 0.0)
    polished = z - step
    improved = np.abs(np.polyval(coeffs[::-1], polished)) < np.abs(p)
    z = np.where(improved, polished, z)
    if curve is not None:
        w, ok = curve.try_phi(z)
        abs_phi = np.where(ok, np.abs(w), 0.0)
        ang = np.where(ok, np.mod(np.angle(w), 2 * np.pi), np.nan)
    else:
        ok = np.ones(z.shape, bool)
        abs_phi = np.abs(z)
        ang = np.mod(np.angle(z), 2 * np.pi)
    return ZeroSet(n=poly.n, zeros=z, abs_phi=abs_phi, angle_phi=ang,
                   phi_defined=ok)


def equilibrium_compare(zset: ZeroSet, curve: CurveSpec, rho: float):
    """KS distance between the phi-angles of the zeros and the uniform law.

    The equilibrium measure of L_rho pushes forward to uniform angular
    measure, so small distances support weak* convergence of the counting
    measures.  Zeros outside phi's domain are dropped and counted.
    """
    ang = zset.angle_phi[zset.phi_defined]
    dropped = int(zset.n - ang.size)
    if ang.size == 0:
        return {"ks": 1.0, "used": 0, "dropped": dropped}
    u = np.sort(ang) / (2 * np.pi)
    k = np.arange(1, u.size + 1)
    ks = float(np.max(np.maximum(k / u.size - u, u - (k - 1) / u.size)))
    return {"ks": ks, "used": int(u.size), "dropped": dropped}


def zero_free_region_check(zset: ZeroSet, curve: CurveSpec, rho: float,
                           kind: str, c: float, u: int = 1, buffer=1e-3):
    """Count zeros in a |phi|-described compact; report limit violations.

    ``kind="exterior"`` checks {|phi(z)| >= c} (no zeros allowed at large
    degree), ``kind="interior"`` checks {|phi(z)| <= c} (at most u-1
    zeros).  Zeros within ``buffer`` of the boundary are not counted, to
    keep the report stable under root jitter.
    """
    if not (c > rho + buffer or c < rho - buffer):
        raise ConfigError("region boundary must stay away from rho")
    s = zset.abs_phi
    if kind == "exterior":
        count = int(np.sum(zset.phi_defined & (s >= c + buffer)))
        allowed = 0
    elif kind == "interior":
        inside = (~zset.phi_defined) | (s <= c - buffer)
        count = int(np.sum(inside))
        allowed = u - 1
    else:
        raise ConfigError(f"unknown region kind {kind!r}")
    return {"kind": kind, "c": c, "count": count, "allowed": allowed,
            "violation": count > allowed}


def limit_angle_probe(curve: CurveSpec, sdata, n_sequence, grid_n=40,
                      cluster_tol=0.02, zero_tol=0.05):
    """Exploratory search for interior zero attractors.

    Records the phase tuples exp(i (n+1) Theta_k) along the degree
    sequence, clusters their accumulation points, and scans the candidate
    attractor equation sum_k alpha_k Delta_i(a_k) W(a_k, t) e^(i theta_k)
    over a grid of the inner region G_rho.  Report-only output,
    cross-referenced by callers against observed interior zeros.
    """
    u = sdata.u_count
    tuples = [np.mod((n + 1) * sdata.thetas[:u], 2 * np.pi) for n in n_sequence]

    def _tuple_dist(a, b):
        return float(np.max(np.abs(np.angle(np.exp(1j * (a - b))))))

    clusters = []
    for t in tuples:
        if all(_tuple_dist(t, s) >= cluster_tol for s in clusters):
            clusters.append(t)
    imap = sdata.imap
    # grid over the inner region in the w-plane, mapped through psi
    radii = np.linspace(0.08, max(sdata.rho - 0.08, 0.1), grid_n // 4)
    th = np.linspace(0, 2 * np.pi, grid_n, endpoint=False)
    wgrid = (radii[:, None] * np.exp(1j * th)[None, :]).ravel()
    wgrid = wgrid[np.abs(wgrid) > curve.rho_hat + 0.02]
    try:
        tgrid = curve.psi(wgrid)
    except Exception:
        tgrid = wgrid
    out = []
    ft = imap.eval_inside(tgrid)
    st = imap.sqrt_deriv(tgrid)
    for cl in clusters:
        vals = np.zeros(tgrid.shape, dtype=complex)
        for k in range(u):
            Wk = (st * imap.sqrt_deriv(sdata.points[k])
                  / (imap.eval_inside(sdata.points[k]) - ft))
            vals += (sdata.alphas[k] * sdata.delta_i_at_a[k] * Wk
                     * np.exp(1j * cl[k]))
        scale = np.median(np.abs(vals)) or 1.0
        hits = tgrid[np.abs(vals) < zero_tol * scale]
        out.append({"theta_tuple": tuple(float(x) for x in cl),
                    "attractors": hits.tolist()})
    return out


def count_zeros_inside_level(poly: PolyCoeffs, curve: CurveSpec, c: float,
                             nodes=4096):
    """Zeros of the polynomial inside the level curve L_c, by winding number.

    Deep inside the curve the polynomial values sit many orders below its
    coefficients, so companion-matrix roots there are noise; the argument
    principle over L_c with extended-precision Horner evaluation gives an
    exact integer count instead.
    """
    if c <= curve.rho_hat:
        raise ConfigError(f"level radius {c} must exceed rho_hat={curve.rho_hat}")
    th = 2 * np.pi * np.arange(nodes, dtype=np.longdouble) / nodes
    w = c * np.exp(1j * th.astype(np.clongdouble))
    z = np.clongdouble(curve.c1) * w + np.clongdouble(curve.c0)
    for k, cf in enumerate(curve.cneg):
        z = z + np.clongdouble(cf) * w ** -(k + 1)
    vals = np.zeros_like(z)
    mag = np.zeros(z.shape, dtype=np.longdouble)
    absz = np.abs(z)
    for cf in np.asarray(poly.coeffs)[::-1]:
        vals = vals * z + np.clongdouble(cf)
        mag = mag * absz + np.longdouble(abs(cf))
    floor = 1.08e-19 * float(mag.max())
    if float(np.min(np.abs(vals))) < 1e3 * floor:
        raise ResolutionError(
            "polynomial values on the counting contour are at the noise floor")
    v = vals.astype(np.complex128)
    steps = np.angle(np.roll(v, -1) / v)
    return int(np.round(float(np.sum(steps)) / (2 * np.pi)))


def discrete_potential_mismatch(zset: ZeroSet, curve: CurveSpec, probes):
    """Max deviation of the zero-counting potential from the equilibrium one.

    Compares (1/n) sum_k log 1/|z - z_k| with log|phi'(inf)/phi(z)| at
    exterior probe points.
    """
    probes = np.atleast_1d(np.asarray(probes, complex))
    w = curve.phi(probes)
    target = np.log(np.abs((1.0 / curve.c1) / w))
    pot = np.array([np.mean(np.log(1.0 / np.abs(p - zset.zeros))) for p in probes])
    return float(np.max(np.abs(pot - target)))


def zero_scatter_svg(zset: ZeroSet, curve: CurveSpec, rho: float, path):
    """Write a minimal SVG scatter of the zeros over the L_1/L_rho outlines."""
    th = np.linspace(0, 2 * np.pi, 256)
    l1 = curve.psi(np.exp(1j * th))
    lr = curve.psi(max(rho, curve.rho_hat + 0.01) * np.exp(1j * th))
    pts = np.concatenate([l1, lr, zset.zeros])
    lo, hi = pts.real.min(), pts.real.max()
    lo2, hi2 = pts.imag.min(), pts.imag.max()
    pad = 0.1 * max(hi - lo, hi2 - lo2)
    x0, y0, wd, ht = lo - pad, lo2 - pad, (hi - lo) + 2 * pad, (hi2 - lo2) + 2 * pad
    size = 480.0

    def sx(x):
        return (x - x0) / wd * size

    def sy(y):
        return size - (y - y0) / ht * size

    def poly(zs, color):
        p = " ".join(f"{sx(z.real):.2f},{sy(z.imag):.2f}" for z in zs)
        return (f'<polygon points="{p}" fill="none" stroke="{color}" '
                'stroke-width="1"/>')

    rows = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0f}" '
            f'height="{size:.0f}" viewBox="0 0 {size:.0f} {size:.0f}">',
            poly(l1, "#444444"), poly(lr, "#999999")]
    for z in zset.zeros:
        rows.append(f'<circle cx="{sx(z.real):.2f}" cy="{sy(z.imag):.2f}" '
                    'r="2.5" fill="#c0392b"/>')
    rows.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(rows) + "\n")
    return path
