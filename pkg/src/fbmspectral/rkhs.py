"""Krein orthogonal functions, the frequency-domain reproducing kernel,
the Fourier-type isometry, and the orthonormal basis normalization.

The reproducing kernel has both a defining integral

    S_T(w, l) = int_0^T conj(phi(u w)) phi(u l) dV_u

and a Christoffel-Darboux closed form.  In terms of the even/odd entire
parts of phi (see ``spectral``), with x = T w and y = T l:

    S_T(w, l) = (2-2H) V_T e^{i(y-x)/2} * 2 [even(x) odd(y) - odd(x) even(y)] / (y - x)

which is branch-free for every real pair and Hermitian by inspection.  Near
the diagonal the bracket cancels catastrophically; there the quotient is
evaluated as the exact average (2/(y-x)) int_x^y K(u) du of the smooth
integrand

    K(u) = even(x) even(u)/2 + odd(x) odd(u)/2 + (2H-1) even(x) odd(u)/u

(obtained from even' = -odd/2, odd' = even/2 + (2H-1) odd/z) with a 3-point
Gauss-Legendre rule, exact through O((y-x)^6) and continuous into the
diagonal value.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .quad import QuadratureSpec, integrate_dV, integrate_mu
from .specfun import DomainError, ZeroTable, bessel_j, gamma_fn
from .spectral import (
    _phi_odd_over_z,
    phi,
    phi_even_part,
    phi_norm_bound,
    variance_V,
)

__all__ = [
    "KernelEvalPolicy",
    "P_fn",
    "P_star_fn",
    "krein_ode_residual",
    "S_T_closed",
    "S_T_quadrature",
    "U_forward",
    "U_inverse",
    "sigma_squared",
    "basis_function",
    "reproduce",
]


@dataclass(frozen=True)
class KernelEvalPolicy:
    """Switch point between the generic closed form and the near-diagonal
    divided-difference evaluation, on the scale |T (l - w) / 2|."""

    diag_threshold: float = 1e-4

    def __post_init__(self):
        if not 0.0 < self.diag_threshold <= 1e-2:
            raise ValueError("diag_threshold must lie in (0, 1e-2]")


_GL3_NODES = np.array([-math.sqrt(0.6), 0.0, math.sqrt(0.6)])
_GL3_WEIGHTS = np.array([5.0, 8.0, 5.0]) / 18.0


def _dv_rate(t, model):
    """dV_t/dt = (2-2H) d^2 t^{1-2H}."""
    h = model.hurst
    return (2.0 - 2.0 * h) * model.variance_scale * t ** (1.0 - 2.0 * h)


def P_fn(t, lam, model):
    """Krein orthogonal function P(t, lam) = phi(t lam) sqrt(dV_t/dt), t > 0."""
    t = float(t)
    if t <= 0.0:
        raise DomainError("P_fn requires t > 0")
    return phi(np.asarray(lam, dtype=float) * t, model) * math.sqrt(_dv_rate(t, model))


def P_star_fn(t, lam, model):
    """Reciprocal function P*(t, lam) = e^{i lam t} conj(P(t, lam))."""
    t = float(t)
    if t <= 0.0:
        raise DomainError("P_star_fn requires t > 0")
    lam = np.asarray(lam, dtype=float)
    return np.exp(1j * lam * t) * np.conj(P_fn(t, lam, model))


def krein_ode_residual(t, lam, model, h):
    """Central-difference residuals of the Krein recurrence system.

    Returns (|dP/dt - (i lam P - gamma_t P*)|, |dP*/dt + gamma_t P|) with
    gamma_t = (H - 1/2)/t, both evaluated at step h; each is O(h^2).
    """
    t = float(t)
    h = float(h)
    if not t > h > 0.0:
        raise DomainError("krein_ode_residual requires t > h > 0")
    lam = float(lam)
    gamma_t = (model.hurst - 0.5) / t
    p0 = complex(P_fn(t, lam, model))
    ps0 = complex(P_star_fn(t, lam, model))
    dp = (complex(P_fn(t + h, lam, model)) - complex(P_fn(t - h, lam, model))) / (2.0 * h)
    dps = (complex(P_star_fn(t + h, lam, model)) - complex(P_star_fn(t - h, lam, model))) / (2.0 * h)
    r1 = abs(dp - (1j * lam * p0 - gamma_t * ps0))
    r2 = abs(dps + gamma_t * p0)
    return r1, r2


def _cross_quotient(x, y, model, threshold):
    """2 [even(x) odd(y) - odd(x) even(y)] / (y - x), stable on the diagonal.

    x, y are equal-length 1-d arrays; points with |y - x|/2 below the
    threshold take the averaged-derivative path.
    """
    h = model.hurst
    out = np.empty(x.shape, dtype=float)
    band = 0.5 * np.abs(y - x) < threshold
    far = ~band
    if np.any(far):
        xf, yf = x[far], y[far]
        ax = phi_even_part(xf, model)
        bx = xf * _phi_odd_over_z(xf, model)
        ay = phi_even_part(yf, model)
        by = yf * _phi_odd_over_z(yf, model)
        out[far] = 2.0 * (ax * by - bx * ay) / (yf - xf)
    if np.any(band):
        xb, yb = x[band], y[band]
        ax = phi_even_part(xb, model)
        bx = xb * _phi_odd_over_z(xb, model)
        mid = 0.5 * (xb + yb)
        half = 0.5 * (yb - xb)
        acc = np.zeros(xb.shape)
        for node, weight in zip(_GL3_NODES, _GL3_WEIGHTS):
            u = mid + half * node
            au = phi_even_part(u, model)
            bu_over = _phi_odd_over_z(u, model)
            k = 0.5 * ax * au + 0.5 * bx * (u * bu_over) + (2.0 * h - 1.0) * ax * bu_over
            acc += weight * k
        out[band] = 2.0 * acc
    return out


def S_T_closed(omega, lam, model, policy=None):
    """Reproducing kernel S_T(omega, lam) in Christoffel-Darboux closed form.

    Hermitian (S_T(w, l) = conj(S_T(l, w))), with S_T(0, 0) = V_T and
    S_T(0, lam) = mhat_T(lam).  Arguments are plain frequencies (any
    doubling conventions are internal to the formula).
    """
    if policy is None:
        policy = KernelEvalPolicy()
    horizon = model.horizon
    omega = np.asarray(omega, dtype=float)
    lam = np.asarray(lam, dtype=float)
    scalar = omega.ndim == 0 and lam.ndim == 0
    x, y = np.broadcast_arrays(horizon * omega, horizon * lam)
    shape = x.shape
    xf = np.atleast_1d(x).ravel().astype(float)
    yf = np.atleast_1d(y).ravel().astype(float)
    quotient = _cross_quotient(xf, yf, model, policy.diag_threshold)
    pref = (2.0 - 2.0 * model.hurst) * variance_V(horizon, model)
    out = pref * np.exp(0.5j * (yf - xf)) * quotient
    return complex(out[0]) if scalar else out.reshape(shape)


def S_T_quadrature(omega, lam, model, spec=None):
    """Reproducing kernel by its defining dV-integral (oracle for the
    closed form)."""
    omega = float(omega)
    lam = float(lam)
    return integrate_dV(
        lambda u: np.conj(phi(u * omega, model)) * phi(u * lam, model),
        0.0, model.horizon, model, spec,
    )


def U_forward(f, lam, model, spec=None):
    """Fourier-type isometry (U f)(lam) = int_0^T f(u) phi(u lam) dV_u."""
    lam = float(lam)
    return integrate_dV(
        lambda u: np.asarray(f(u)) * phi(u * lam, model),
        0.0, model.horizon, model, spec,
    )


def U_inverse(psi, u, model, spec=None, t_char=None):
    """Adjoint/inverse isometry (U* psi)(u) = int psi(lam) conj(phi(u lam)) mu(dlam).

    Membership of psi in the integrable class cannot be decided numerically;
    a coarse envelope check (norm-bound times weight not decaying along the
    tail) emits a RuntimeWarning rather than failing.
    """
    if spec is None:
        spec = QuadratureSpec()
    u = float(u)
    lam_near = spec.tail_cutoff * (1.0 + 0.1 * np.arange(4))
    lam_far = 4.0 * lam_near
    width = 1.0 - 2.0 * model.hurst

    def envelope(lams):
        vals = np.abs([complex(np.asarray(psi(l)).ravel()[0]) for l in lams])
        return np.max(vals * phi_norm_bound(lams, model) * lams ** width * lams)

    if envelope(lam_far) > envelope(lam_near):
        warnings.warn(
            "psi looks outside the integrable class for the inverse transform; "
            "result may be unreliable", RuntimeWarning, stacklevel=2,
        )
    return integrate_mu(
        lambda lam: np.asarray(psi(lam)) * np.conj(phi(u * lam, model)),
        model, spec, t_char=t_char,
    )


def sigma_squared(n, model, zeros):
    """Coefficient variance sigma^2(omega_n) of the orthonormal basis.

    sigma^{-2}(omega_n) = S_T(2 omega_n / T, 2 omega_n / T), which reduces to
    (2-2H) Gamma(1-H)^2 (omega_n/2)^{2H} J_{-H}(omega_n)^2 V_T off n = 0 and
    to V_T at n = 0.  Even in n.  ``zeros`` must hold the zeros of J_{1-H}.
    """
    h = model.hurst
    if abs(zeros.nu - (1.0 - h)) > 1e-12:
        raise ValueError(
            f"zero table is for order {zeros.nu}, expected {1.0 - h}"
        )
    n = np.asarray(n)
    scalar = n.ndim == 0
    n = np.atleast_1d(n).astype(int)
    v_t = variance_V(model.horizon, model)
    out = np.full(n.shape, 1.0 / v_t)
    nz = n != 0
    if np.any(nz):
        om = np.abs(zeros.omega(n[nz]))
        j = bessel_j(-h, om)
        out[nz] = 1.0 / (
            (2.0 - 2.0 * h) * gamma_fn(1.0 - h) ** 2 * (0.5 * om) ** (2.0 * h) * j * j * v_t
        )
    return float(out[0]) if scalar else out


def basis_function(n, lam, model, zeros, policy=None):
    """Orthonormal basis element psi_n(lam) = sigma(omega_n) S_T(2 omega_n/T, lam)."""
    sigma = math.sqrt(sigma_squared(int(n), model, zeros))
    w_n = 2.0 * zeros.omega(int(n)) / model.horizon
    return sigma * S_T_closed(w_n, lam, model, policy)


def reproduce(psi, omega, model, spec=None, policy=None, t_char=None):
    """Reproducing property integral int psi(lam) conj(S_T(omega, lam)) mu(dlam).

    For psi in the frequency domain this equals psi(omega); the deviation is
    a direct measure of kernel + quadrature error.
    """
    omega = float(omega)
    return integrate_mu(
        lambda lam: np.asarray(psi(lam)) * np.conj(S_T_closed(omega, lam, model, policy)),
        model, spec, t_char=t_char,
    )
