"""Deterministic ingredients of the fractional Brownian motion.

Covariance, spectral density, the whitening kernel m_t and its Fourier
transform, the moving-average kernel x_t, the variance function V of the
fundamental martingale, and the Fourier kernel phi generating the
frequency-domain isometry.

The complex-valued kernels are assembled from two real entire functions

    even(z) = Gamma(1-H) sum_k (-1)^k (z/4)^{2k}   / (k! Gamma(k+1-H))
    odd(z)  = Gamma(1-H) sum_k (-1)^k (z/4)^{2k+1} / (k! Gamma(k+2-H))

which for z > 0 equal Gamma(1-H) (z/4)^H J_{-H}(z/2) and
Gamma(1-H) (z/4)^H J_{1-H}(z/2).  Working with the even/odd pair instead of
the raw Bessel form sidesteps every branch question for negative arguments:
phi(z) = e^{iz/2} (even(z) + i odd(z)) is automatically entire with
phi(-z) = conj(phi(z)) on the real line.  At H = 1/2 the pair degenerates
to (cos(z/2), sin(z/2)) and phi(z) = e^{iz}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quad import QuadratureSpec, integrate_interval
from .specfun import DomainError, SERIES_ASYMPTOTIC_SEAM, _bessel_core, gamma_fn

__all__ = [
    "HurstModel",
    "variance_scale_forms",
    "fbm_covariance",
    "spectral_density",
    "e_kernel",
    "m_kernel",
    "mhat",
    "phi",
    "phi_series",
    "phi_even_part",
    "phi_odd_part",
    "variance_V",
    "phi_norm_bound",
    "x_kernel",
]


def variance_scale_forms(hurst):
    """Both closed forms of the martingale variance constant d^2.

    Returns (gamma-triple form, duplication form):

        Gamma(3/2-H) / (2H Gamma(H+1/2) Gamma(3-2H))
        sqrt(pi) / (2H Gamma(H+1/2) Gamma(2-H) 2^{2-2H})

    They coincide by Legendre duplication; both are computed so the
    agreement can be asserted instead of silently trusting one.
    """
    h = float(hurst)
    g_half = gamma_fn(h + 0.5)
    form_a = gamma_fn(1.5 - h) / (2.0 * h * g_half * gamma_fn(3.0 - 2.0 * h))
    form_b = math.sqrt(math.pi) / (2.0 * h * g_half * gamma_fn(2.0 - h) * 2.0 ** (2.0 - 2.0 * h))
    return form_a, form_b


@dataclass(frozen=True)
class HurstModel:
    """Hurst index and time horizon, with the derived model constants.

    variance_scale is d^2 in V_t = d^2 t^{2-2H} (variance of the
    fundamental martingale); density_const is the spectral-density
    prefactor sin(pi H) Gamma(1+2H) / (2 pi).
    """

    hurst: float
    horizon: float

    def __post_init__(self):
        if not 0.0 < self.hurst < 1.0:
            raise DomainError(f"hurst must lie in (0, 1), got {self.hurst}")
        if not self.horizon > 0.0:
            raise DomainError(f"horizon must be positive, got {self.horizon}")
        form_a, form_b = variance_scale_forms(self.hurst)
        if abs(form_a - form_b) > 1e-11 * abs(form_a):
            raise ArithmeticError(
                "variance-scale closed forms disagree; gamma implementation broken"
            )
        object.__setattr__(self, "variance_scale", form_a)
        object.__setattr__(
            self,
            "density_const",
            math.sin(math.pi * self.hurst) * gamma_fn(1.0 + 2.0 * self.hurst) / (2.0 * math.pi),
        )


def fbm_covariance(s, t, model):
    """Covariance (s^{2H} + t^{2H} - |s-t|^{2H}) / 2 of the fBm."""
    h2 = 2.0 * model.hurst
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    out = 0.5 * (np.abs(s) ** h2 + np.abs(t) ** h2 - np.abs(s - t) ** h2)
    return float(out) if out.ndim == 0 else out


def spectral_density(lam, model):
    """Spectral density c_H |lam|^{1-2H} of the fBm.

    For H > 1/2 the density is singular (though integrable) at the origin,
    so lam = 0 is a domain error there; quadrature handles the origin with
    a local substitution instead of point evaluation.
    """
    lam = np.asarray(lam, dtype=float)
    if model.hurst > 0.5 and np.any(lam == 0.0):
        raise DomainError("spectral density is singular at lam = 0 for H > 1/2")
    out = model.density_const * np.abs(lam) ** (1.0 - 2.0 * model.hurst)
    return float(out) if out.ndim == 0 else out


def e_kernel(t, lam):
    """Elementary spectral kernel (e^{i lam t} - 1) / (i lam), t >= 0.

    Evaluated as t e^{i lam t/2} sinc(lam t / 2), which is exact, removes
    the lam -> 0 cancellation, and gives e_t(0) = t and the Hermitian
    symmetry e_t(-lam) = conj(e_t(lam)) identically.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise DomainError("e_kernel requires t >= 0")
    lam = np.asarray(lam, dtype=float)
    x = 0.5 * lam * t
    out = t * np.exp(1j * x) * np.sinc(x / np.pi)
    return complex(out) if out.ndim == 0 else out


def m_kernel(t, u, model):
    """Whitening kernel u^{1/2-H} (t-u)^{1/2-H} / (2H Gamma(H+1/2) Gamma(3/2-H)).

    Zero outside (0, t), including at the endpoints by convention (for
    H > 1/2 the kernel is endpoint-singular; quadrature against it must use
    endpoint substitutions, never endpoint samples).
    """
    h = model.hurst
    const = 1.0 / (2.0 * h * gamma_fn(h + 0.5) * gamma_fn(1.5 - h))
    u = np.asarray(u, dtype=float)
    t = float(t)
    inside = (u > 0.0) & (u < t)
    p = 0.5 - h
    val = np.where(inside, const * np.where(inside, u, 1.0) ** p * np.where(inside, t - u, 1.0) ** p, 0.0)
    return float(val) if val.ndim == 0 else val


# ---------------------------------------------------------------------------
# Entire even/odd parts and the Fourier kernel phi
# ---------------------------------------------------------------------------

_PARTS_MAX_TERMS = 60


def _even_series(z, h):
    """even(z) by its power series, longdouble accumulation."""
    q = (np.asarray(z, dtype=np.longdouble) / 4.0) ** 2
    term = np.ones_like(q)
    total = term.copy()
    for k in range(_PARTS_MAX_TERMS):
        term = term * (-q / (np.longdouble(k + 1) * np.longdouble(k + 1 - h)))
        total = total + term
        if np.all(np.abs(term) <= 1e-18 * np.abs(total)):
            break
    return total.astype(float)


def _odd_over_z_series(z, h):
    """odd(z)/z by its power series (regular at z = 0)."""
    q = (np.asarray(z, dtype=np.longdouble) / 4.0) ** 2
    term = np.full_like(q, 1.0 / np.longdouble(4.0 * (1.0 - h)))
    total = term.copy()
    for k in range(_PARTS_MAX_TERMS):
        term = term * (-q / (np.longdouble(k + 1) * np.longdouble(k + 2 - h)))
        total = total + term
        if np.all(np.abs(term) <= 1e-18 * np.abs(total)):
            break
    return total.astype(float)


def phi_even_part(z, model):
    """Even entire part of the Fourier kernel; equals
    Gamma(1-H) (z/4)^H J_{-H}(z/2) for z > 0."""
    h = model.hurst
    z = np.atleast_1d(np.asarray(z, dtype=float))
    a = np.abs(z)
    out = np.empty_like(a)
    small = a <= SERIES_ASYMPTOTIC_SEAM
    if np.any(small):
        out[small] = _even_series(a[small], h)
    big = ~small
    if np.any(big):
        ab = a[big]
        out[big] = gamma_fn(1.0 - h) * (ab / 4.0) ** h * _bessel_core(-h, 0.5 * ab)
    return out


def phi_odd_part(z, model):
    """Odd entire part of the Fourier kernel; equals
    Gamma(1-H) (z/4)^H J_{1-H}(z/2) for z > 0."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    return z * _phi_odd_over_z(z, model)


def _phi_odd_over_z(z, model):
    """odd(z)/z, stable through z = 0."""
    h = model.hurst
    z = np.atleast_1d(np.asarray(z, dtype=float))
    a = np.abs(z)
    out = np.empty_like(a)
    small = a <= SERIES_ASYMPTOTIC_SEAM
    if np.any(small):
        out[small] = _odd_over_z_series(a[small], h)
    big = ~small
    if np.any(big):
        ab = a[big]
        out[big] = gamma_fn(1.0 - h) * (ab / 4.0) ** h * _bessel_core(1.0 - h, 0.5 * ab) / ab
    return out


def phi(z, model):
    """Fourier kernel phi(z) = e^{iz/2} (even(z) + i odd(z)); phi(0) = 1.

    Entire in z, Hermitian on the real line, and equal to
    Gamma(1-H) (z/4)^H e^{iz/2} (J_{-H}(z/2) + i J_{1-H}(z/2)) for z > 0.
    Reduces to e^{iz} at H = 1/2.
    """
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    zv = np.atleast_1d(z)
    out = np.exp(0.5j * zv) * (phi_even_part(zv, model) + 1j * phi_odd_part(zv, model))
    return complex(out[0]) if scalar else out


def phi_series(z, model):
    """Branch-free pure-series evaluation of phi (accurate for |z| <= ~24).

    Used as an oracle against the piecewise production path; both sides of
    the real line are computed from the same entire series, so no reflection
    is involved anywhere.
    """
    h = model.hurst
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    zv = np.atleast_1d(z)
    even = _even_series(zv, h)
    odd = zv * _odd_over_z_series(zv, h)
    out = np.exp(0.5j * zv) * (even + 1j * odd)
    return complex(out[0]) if scalar else out


def variance_V(t, model):
    """Variance function V_t = d^2 t^{2-2H} of the fundamental martingale."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise DomainError("variance_V requires t >= 0")
    out = model.variance_scale * t ** (2.0 - 2.0 * model.hurst)
    return float(out) if out.ndim == 0 else out


def mhat(t, lam, model):
    """Fourier transform of the whitening kernel m_t.

    Computed as 4(1-H) V_t e^{i lam t/2} odd(lam t)/(lam t), which agrees
    with the Bessel closed form for lam > 0, is Hermitian in lam by
    construction, and takes the limiting value V_t = d^2 t^{2-2H} at
    lam = 0.  Self-reciprocal: e^{i lam t} conj(mhat) = mhat.
    """
    h = model.hurst
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise DomainError("mhat requires t >= 0")
    lam = np.asarray(lam, dtype=float)
    scalar = t.ndim == 0 and lam.ndim == 0
    z = lam * t
    vt = model.variance_scale * t ** (2.0 - 2.0 * h)
    out = 4.0 * (1.0 - h) * vt * np.exp(0.5j * z) * np.reshape(
        _phi_odd_over_z(z, model), np.shape(z)
    )
    return complex(out) if scalar else out


def phi_norm_bound(lam, model):
    """Envelope 1 ^ |lam|^{H-1/2} (H <= 1/2) or 1 v |lam|^{H-1/2} (H > 1/2)
    bounding ||phi(. lam)||_V up to a constant; drives tail truncation."""
    h = model.hurst
    lam = np.asarray(lam, dtype=float)
    a = np.abs(lam)
    with np.errstate(divide="ignore"):
        pw = np.where(a > 0.0, a ** (h - 0.5), 1.0)
    out = np.minimum(1.0, pw) if h <= 0.5 else np.maximum(1.0, pw)
    return float(out) if out.ndim == 0 else out


def x_kernel(t, u, model, spec=None):
    """Moving-average kernel x_t(u) for 0 < u < t.

    x_t(u) = t^{H-1/2} (t-u)^{H-1/2} - (H-1/2) I(u, t) with
    I = int_u^t (t-v)^{H-1/2} v^{H-3/2} dv.  For H < 1/2 the integrand is
    endpoint-singular at v = t; the substitution w = (t-v)^{H+1/2} removes
    the singularity exactly (the quadrature never samples the endpoint).
    Identically 1 at H = 1/2.
    """
    if spec is None:
        spec = QuadratureSpec()
    h = model.hurst
    t = float(t)
    u = float(u)
    if not 0.0 < u < t:
        raise DomainError("x_kernel requires 0 < u < t")
    if h == 0.5:
        return 1.0
    first = t ** (h - 0.5) * (t - u) ** (h - 0.5)
    if h > 0.5:
        integral = integrate_interval(
            lambda v: (t - v) ** (h - 0.5) * v ** (h - 1.5),
            u, t, spec.rel_tol, spec.abs_tol,
        )
    else:
        p = 1.0 / (h + 0.5)
        integral = integrate_interval(
            lambda w: (t - w ** p) ** (h - 1.5),
            0.0, (t - u) ** (h + 0.5), spec.rel_tol, spec.abs_tol,
        ) * p
    return first - (h - 0.5) * float(np.real(integral))
