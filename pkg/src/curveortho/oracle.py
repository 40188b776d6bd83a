"""Ground-truth monic orthogonal polynomials from the curve inner product.

Everything here works directly with the inner product

    <p, q> = (1/2 pi) * integral over L_1 of p(z) conj(q(z)) h(z) |dz|

computed by the trapezoid rule in the parametrizing angle (spectrally
accurate for analytic integrands).  The monic polynomial of degree n is
the solution of the normal equations for the Gram matrix of monomials;
no asymptotic machinery is used, so these results serve as the oracle for
the expansion and asymptotics modules.

The Gram solve supports numpy's extended-precision ``clongdouble`` dtype,
used by rate studies whose residuals sit below double-precision floor at
large degree.  This is hardware extended precision, not arbitrary
precision.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .curves import CurveSpec
from .errors import ConditioningError, ResolutionError

__all__ = [
    "PolyCoeffs",
    "curve_quadrature",
    "inner_product",
    "gram_matrix",
    "monic_orthogonal",
    "orthonormal_eval",
]


@dataclass
class PolyCoeffs:
    """Monic polynomial in the power basis with its weighted norm.

    ``coeffs`` has length n+1, ascending powers, leading coefficient 1.
    ``gamma`` = 1/norm is the orthonormal leading coefficient.  Both carry
    the dtype precision of the Gram solve (float or longdouble).
    """

    n: int
    coeffs: np.ndarray
    norm: float | np.floating
    gamma: float | np.floating

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs)
        if self.coeffs.size != self.n + 1:
            raise ValueError("coefficient length must be n+1")

    def eval(self, z):
        z = np.asarray(z, dtype=self.coeffs.dtype)
        acc = np.zeros_like(z)
        for c in self.coeffs[::-1]:
            acc = acc * z + c
        return acc

    def as_dict(self):
        return {"n": self.n,
                "coeffs": [[float(np.real(c)), float(np.imag(c))] for c in self.coeffs],
                "gamma": float(self.gamma)}


def curve_quadrature(curve: CurveSpec, weight, N: int, dtype=np.complex128):
    """Nodes z_t on L_1 and trapezoid weights h(z_t) |psi'(w_t)| / N."""
    rdtype = np.longdouble if dtype == np.clongdouble else np.float64
    th = 2 * np.pi * np.arange(N, dtype=rdtype) / N
    w = np.exp(1j * th.astype(dtype))
    z = curve.psi(w) if dtype == np.complex128 else _psi_hp(curve, w)
    dpsi = curve.dpsi(w) if dtype == np.complex128 else _dpsi_hp(curve, w)
    hw = weight.h_on_curve(z) if dtype == np.complex128 else _h_hp(weight, z)
    wts = (hw * np.abs(dpsi) / N).astype(rdtype)
    return z.astype(dtype), wts


def _psi_hp(curve, w):
    out = np.clongdouble(curve.c1) * w + np.clongdouble(curve.c0)
    for k, c in enumerate(curve.cneg):
        out = out + np.clongdouble(c) * w ** -(k + 1)
    return out


def _dpsi_hp(curve, w):
    out = np.full_like(w, np.clongdouble(curve.c1))
    for k, c in enumerate(curve.cneg):
        out = out - np.clongdouble(k + 1) * np.clongdouble(c) * w ** -(k + 2)
    return out


def _h_hp(weight, z):
    if weight.kind == "generic":
        out = np.zeros_like(z)
        for c in weight.v_coeffs[::-1]:
            out = out * z + np.clongdouble(c)
        if weight.v_low:
            out = out * z ** weight.v_low
        return np.abs(out) ** 2
    om = np.zeros_like(z)
    inv = 1.0 / z
    for c in weight.omega_coeffs[::-1]:
        om = om * inv + np.clongdouble(c)
    h = np.abs(om) ** np.longdouble(-2)
    for a, lam in weight.singularities:
        h = h * np.abs(z - np.clongdouble(a)) ** np.longdouble(2 * lam)
    return h


def _poly_samples(p, z):
    if isinstance(p, PolyCoeffs):
        return p.eval(z)
    if callable(p):
        return np.asarray(p(z))
    coeffs = np.asarray(p)
    acc = np.zeros_like(z)
    for c in coeffs[::-1]:
        acc = acc * z + c
    return acc


def inner_product(p, q, curve: CurveSpec, weight, N=512, check=False):
    """<p, q> in the curve inner product; conjugate-symmetric by construction.

    ``p`` and ``q`` may be PolyCoeffs, ascending coefficient arrays, or
    callables evaluated at the quadrature nodes.  With ``check=True`` the
    node count is doubled once and disagreement raises ResolutionError.
    """
    z, wts = curve_quadrature(curve, weight, N)
    val = np.sum(_poly_samples(p, z) * np.conj(_poly_samples(q, z)) * wts)
    if check:
        z2, wts2 = curve_quadrature(curve, weight, 2 * N)
        val2 = np.sum(_poly_samples(p, z2) * np.conj(_poly_samples(q, z2)) * wts2)
        scale = max(abs(val2), 1e-300)
        if abs(val - val2) > 1e-9 * max(scale, 1.0):
            raise ResolutionError(
                f"inner product not converged at N={N}: {val} vs {val2}")
        val = val2
    return complex(val)


def gram_matrix(curve: CurveSpec, weight, n: int, N=None, dtype=np.complex128):
    """G[m, j] = <z^j, z^m> for 0 <= m, j <= n (Hermitian positive definite)."""
    N = N or max(512, 16 * n)
    z, wts = curve_quadrature(curve, weight, N, dtype=dtype)
    V = z[:, None] ** np.arange(n + 1, dtype=dtype)[None, :]
    return (np.conj(V) * wts[:, None].astype(dtype)).T @ V


def _cholesky(A):
    """Lower Cholesky factor, dtype-generic; raises on non-PD pivots."""
    n = A.shape[0]
    L = np.zeros_like(A)
    for j in range(n):
        s = A[j, j] - np.sum(np.abs(L[j, :j]) ** 2)
        piv = np.real(s)
        if piv <= 0:
            raise ConditioningError(
                "Gram matrix numerically indefinite; lower the degree or rescale the curve")
        L[j, j] = np.sqrt(piv)
        if j + 1 < n:
            L[j + 1:, j] = (A[j + 1:, j] - L[j + 1:, :j] @ np.conj(L[j, :j])) / L[j, j]
    return L


def _cho_solve(L, b):
    n = L.shape[0]
    y = np.zeros_like(b)
    for i in range(n):
        y[i] = (b[i] - L[i, :i] @ y[:i]) / L[i, i]
    x = np.zeros_like(b)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - np.conj(L[i + 1:, i]) @ x[i + 1:]) / L[i, i]
    return x


def monic_orthogonal(curve: CurveSpec, weight, n: int, N=None,
                     dtype=np.complex128, gram=None) -> PolyCoeffs:
    """Monic orthogonal polynomial of degree n from the normal equations.

    Solved by Cholesky factorization with one step of iterative refinement
    (residual accumulated in extended precision for the double path).
    Warns when the condition estimate exceeds 1e12.
    """
    G = gram if gram is not None else gram_matrix(curve, weight, n, N, dtype=dtype)
    if n == 0:
        norm = np.sqrt(np.real(G[0, 0]))
        return PolyCoeffs(0, np.ones(1, dtype=dtype), norm, 1.0 / norm)
    A = G[:n, :n]
    b = -G[:n, n]
    cond = np.linalg.cond(A.astype(np.complex128))
    if not np.isfinite(cond):
        raise ConditioningError("Gram matrix singular to working precision")
    if cond > 1e12:
        warnings.warn(f"Gram condition estimate {cond:.3g} exceeds 1e12; "
                      "coefficients may lose accuracy", stacklevel=2)
    L = _cholesky(A)
    x = _cho_solve(L, b)
    # one refinement step with the residual in extended precision
    Ah = A.astype(np.clongdouble)
    r = (b.astype(np.clongdouble) - Ah @ x.astype(np.clongdouble)).astype(A.dtype)
    x = x + _cho_solve(L, r)
    coeffs = np.concatenate([x, np.ones(1, dtype=dtype)])
    norm_sq = np.real(G[n, n] + G[n, :n] @ x)
    if norm_sq <= 0:
        raise ConditioningError("nonpositive norm from the normal equations")
    norm = np.sqrt(norm_sq)
    return PolyCoeffs(n, coeffs, norm, 1.0 / norm)


def orthonormal_eval(poly: PolyCoeffs, z):
    """Evaluate the orthonormal polynomial gamma_n * P_n by Horner's scheme."""
    return poly.gamma * poly.eval(z)
