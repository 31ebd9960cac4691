"""Paley-Wiener series sampler for fBm paths and its truncation-rate study.

The complex-valued path is

    X_t = sum_{|n| <= N} e_t(2 omega_n / T) Z_n,

where omega_n are the signed zeros of J_{1-H}, e_t the elementary spectral
kernel, and the Z_n independent complex Gaussians with variance
sigma^2(omega_n) (the n = 0 term degenerates to t Z_0).  The real-valued
variant splits each +-n pair into a sine and a cosine coefficient of half
the variance plus a linear drift term.

Coefficient draws come from a counter-based generator (Philox keyed by
(seed, stream)) through an explicit Box-Muller transform, consuming exactly
two uniforms per coefficient in the fixed order n = 0, 1, -1, 2, -2, ...
Because the layout is positional, enlarging N extends the coefficient
sequence instead of reshuffling it, so nested-tail comparisons in the rate
study are exact per path, and blocks of the sequence can be regenerated
independently via counter jumps.

Paths are accumulated from the highest |n| down with compensated block
summation; small-index terms dominate, so adding big-to-small keeps the
rounding loss of very long sums below the Monte Carlo resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .rkhs import sigma_squared
from .specfun import ZeroTable
from .spectral import HurstModel, e_kernel, variance_V

__all__ = [
    "ExpansionSpec",
    "SamplePath",
    "ConvergenceReport",
    "InsufficientReplicationsError",
    "coefficient_variances",
    "sample_complex_path",
    "sample_real_path",
    "covariance_partial_sum",
    "truncation_study",
    "empirical_covariance",
]


class InsufficientReplicationsError(RuntimeError):
    """Too few Monte Carlo replications for the requested estimate."""


@dataclass(frozen=True)
class ExpansionSpec:
    """Model, truncation level N (sum over |n| <= N), and the zero table of
    J_{1-H} covering at least indices 1..N."""

    model: HurstModel
    n_terms: int
    zeros: ZeroTable

    def __post_init__(self):
        if self.n_terms < 1:
            raise ValueError("n_terms must be >= 1")
        if abs(self.zeros.nu - (1.0 - self.model.hurst)) > 1e-12:
            raise ValueError(
                f"zero table order {self.zeros.nu} does not match 1 - H = {1.0 - self.model.hurst}"
            )
        if len(self.zeros) < self.n_terms:
            raise ValueError(
                f"zero table holds {len(self.zeros)} zeros, need {self.n_terms}"
            )


@dataclass(frozen=True, eq=False)
class SamplePath:
    """One realized path on a grid, with its provenance."""

    grid: np.ndarray
    values: np.ndarray
    seed: int
    stream: int
    n_terms: int

    def __post_init__(self):
        if len(self.grid) != len(self.values):
            raise ValueError("grid and values must have equal length")


@dataclass(frozen=True)
class ConvergenceReport:
    """Monte Carlo sup-norm tail errors per truncation level and the fitted
    decay exponents.

    ``slope`` is the raw log error vs log N slope (theory: -H);
    ``scaled_slope`` is the slope against log(N^{-H} sqrt(log N))
    (theory: +1).  ``slope_ci`` is a 95% half-width for ``slope``.
    """

    n_list: tuple
    errors: tuple
    stderrs: tuple
    slope: float
    slope_ci: float
    scaled_slope: float


# ---------------------------------------------------------------------------
# deterministic coefficient streams
# ---------------------------------------------------------------------------

def _uniforms(seed, stream, start, count):
    """Doubles at positions [start, start + count) of the (seed, stream)
    uniform sequence.  Philox advances in blocks of four outputs, so the
    offset is a counter jump plus a short discard."""
    bitgen = np.random.Philox(key=np.array([seed, stream], dtype=np.uint64))
    jump, rem = divmod(int(start), 4)
    if jump:
        bitgen.advance(jump)
    gen = np.random.Generator(bitgen)
    if rem:
        gen.random(rem)
    return gen.random(count)


def _gaussian_pairs(seed, stream, first, count):
    """Box-Muller pairs for draw indices [first, first + count).

    Pair j consumes uniforms (2j, 2j + 1); the transform uses log(1 - u)
    so a zero uniform is harmless.
    """
    u = _uniforms(seed, stream, 2 * first, 2 * count)
    r = np.sqrt(-2.0 * np.log1p(-u[0::2]))
    theta = (2.0 * math.pi) * u[1::2]
    return r * np.cos(theta), r * np.sin(theta)


def _descending_indices(n_terms):
    """Signed indices ordered by decreasing |n| (pairs +m, -m, ending in 0);
    draw index of n is 2n - 1 for n > 0 and 2|n| for n < 0."""
    m = np.arange(n_terms, 0, -1)
    out = np.empty(2 * n_terms + 1, dtype=int)
    out[0:-1:2] = m
    out[1:-1:2] = -m
    out[-1] = 0
    return out


def _draw_index(n):
    n = np.asarray(n, dtype=int)
    return np.where(n > 0, 2 * n - 1, -2 * n)


def coefficient_variances(spec):
    """Variances sigma^2(omega_n) for n = -N..N (even in n)."""
    n = np.arange(-spec.n_terms, spec.n_terms + 1)
    return sigma_squared(n, spec.model, spec.zeros)


def _kahan_block_sum(acc, comp, term):
    """One compensated accumulation step over arrays (in place)."""
    y = term - comp
    t = acc + y
    comp[...] = (t - acc) - y
    acc[...] = t


@lru_cache(maxsize=8)
def _coefficient_tables(spec):
    """Per-spec arrays shared across replications: descending signed order,
    coefficient scales sqrt(sigma^2/2), frequencies 2 w_n/T, draw indices."""
    order = _descending_indices(spec.n_terms)
    sig = np.sqrt(sigma_squared(order, spec.model, spec.zeros) / 2.0)
    freq = 2.0 * spec.zeros.omega(order) / spec.model.horizon
    draw = _draw_index(order)
    for arr in (order, sig, freq, draw):
        arr.setflags(write=False)
    return order, sig, freq, draw


@lru_cache(maxsize=4)
def _complex_basis(spec, grid_bytes):
    """Path-independent matrix e_{t_g}(2 w_n / T), cached across replications
    when it fits in one block; None tells the sampler to build per block."""
    grid = np.frombuffer(grid_bytes, dtype=float)
    _, _, freq, _ = _coefficient_tables(spec)
    if grid.size * freq.size > _BLOCK_ELEMS:
        return None
    basis = e_kernel(grid[:, None], freq[None, :])
    basis.setflags(write=False)
    return basis


def _validate_grid(grid, model):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0:
        raise ValueError("grid must be a nonempty 1-d array")
    if np.any(grid < 0.0) or np.any(grid > model.horizon):
        raise ValueError("grid must lie within [0, horizon]")
    if np.any(np.diff(grid) <= 0.0):
        raise ValueError("grid must be strictly increasing")
    return grid


_BLOCK_ELEMS = 1 << 22  # coefficient-block sizing: ~4M matrix elements


def sample_complex_path(spec, grid, seed, stream):
    """One complex fBm path realization on the grid.

    Deterministic in (seed, stream, N, grid); coefficient n uses Box-Muller
    pair index 2n-1 (n > 0), 2|n| (n < 0), 0 (n = 0), so the same (seed,
    stream) with a larger N extends the path's coefficient sequence.
    """
    grid = _validate_grid(grid, spec.model)
    _, sig, freq, draw = _coefficient_tables(spec)

    acc = np.zeros(len(grid), dtype=complex)
    comp = np.zeros(len(grid), dtype=complex)
    block = max(2, _BLOCK_ELEMS // max(1, len(grid)))
    for lo in range(0, len(draw), block):
        hi = min(lo + block, len(draw))
        idx = draw[lo:hi]
        g_re, g_im = _gaussian_pairs(seed, stream, int(idx.min()), int(idx.max() - idx.min() + 1))
        rel = idx - idx.min()
        z = sig[lo:hi] * (g_re[rel] + 1j * g_im[rel])
        basis = e_kernel(grid[:, None], freq[None, lo:hi])
        _kahan_block_sum(acc, comp, basis @ z)
    return SamplePath(grid=grid, values=acc, seed=int(seed), stream=int(stream), n_terms=spec.n_terms)


def sample_real_path(spec, grid, seed, stream):
    """One real fBm path realization on the grid.

    t X + sum_{n>=1} [ sin(2 w_n t/T) (T/w_n) Y_n + (cos(2 w_n t/T) - 1) (T/w_n) Z_n ]
    with var X = 1/V_T and var Y_n = var Z_n = sigma^2(omega_n)/2.  Pair 0
    supplies X (second component discarded); pair n supplies (Y_n, Z_n).
    """
    grid = _validate_grid(grid, spec.model)
    model = spec.model
    n_desc, sig_all, _, _ = _coefficient_tables(spec)
    n_desc = n_desc[0:-1:2]  # positive half of the descending order
    sig = sig_all[0:-1:2]
    omega = spec.zeros.omega(n_desc)

    acc = np.zeros(len(grid))
    comp = np.zeros(len(grid))
    block = max(2, _BLOCK_ELEMS // max(1, len(grid)))
    for lo in range(0, len(n_desc), block):
        hi = min(lo + block, len(n_desc))
        nb = n_desc[lo:hi]
        y_n, z_n = _gaussian_pairs(seed, stream, int(nb.min()), int(nb.max() - nb.min() + 1))
        rel = nb - nb.min()
        om = omega[lo:hi]
        phase = (2.0 / model.horizon) * grid[:, None] * om[None, :]
        scale = sig[lo:hi] * (model.horizon / om)
        term = np.sin(phase) @ (scale * y_n[rel]) + (np.cos(phase) - 1.0) @ (scale * z_n[rel])
        _kahan_block_sum(acc, comp, term)
    x0, _ = _gaussian_pairs(seed, stream, 0, 1)
    drift_coeff = x0[0] / math.sqrt(variance_V(model.horizon, model))
    values = acc + grid * drift_coeff
    return SamplePath(grid=grid, values=values, seed=int(seed), stream=int(stream), n_terms=spec.n_terms)


def covariance_partial_sum(s, t, spec):
    """Exact covariance sum_{|n| <= N} sigma^2(omega_n) e_s(2w_n/T) conj(e_t(2w_n/T))
    of the truncated complex sampler; converges to the fBm covariance."""
    model = spec.model
    s = float(s)
    t = float(t)
    if not (0.0 <= s <= model.horizon and 0.0 <= t <= model.horizon):
        raise ValueError("s, t must lie in [0, horizon]")
    order, sig, freq, _ = _coefficient_tables(spec)
    terms = 2.0 * sig * sig * e_kernel(s, freq) * np.conj(e_kernel(t, freq))
    return complex(np.add.reduce(terms))


# ---------------------------------------------------------------------------
# truncation-rate study
# ---------------------------------------------------------------------------

def truncation_study(spec_base, n_list, reps, grid, seed):
    """Monte Carlo estimate of E sup_t |tail beyond N| for each N in n_list.

    The full sum is truncated at the common reference level
    spec_base.n_terms; per replication the nested tails for every N are
    exact partial sums of one coefficient sequence (stream = replication
    index).  The sup runs over the supplied grid, a lower bound on the
    continuum sup.  Fits the raw log-log slope (theory -H) and the slope
    against log(N^{-H} sqrt(log N)) (theory +1).
    """
    model = spec_base.model
    n_list = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(n_list[:-1], n_list[1:])) or len(n_list) < 2:
        raise ValueError("n_list must be strictly increasing with at least two entries")
    if n_list[0] < 1:
        raise ValueError("truncation levels must be >= 1")
    if n_list[-1] >= spec_base.n_terms:
        raise ValueError("reference n_terms must exceed every entry of n_list")
    reps = int(reps)
    if reps < 100:
        raise InsufficientReplicationsError(f"reps must be >= 100, got {reps}")
    grid = _validate_grid(grid, model)

    n_max = spec_base.n_terms
    order, sig, freq, draw = _coefficient_tables(spec_base)
    # descending order holds 2(n_max - N) coefficients with |n| > N
    cuts = [2 * (n_max - n) for n in sorted(n_list, reverse=True)]

    n_grid = len(grid)
    rep_block = max(1, min(64, (1 << 24) // max(1, 4 * n_grid)))
    coeff_block = max(2, _BLOCK_ELEMS // n_grid)
    sups = np.empty((reps, len(cuts)))

    for r0 in range(0, reps, rep_block):
        r1 = min(r0 + rep_block, reps)
        nb = r1 - r0
        acc = np.zeros((n_grid, nb), dtype=complex)
        comp = np.zeros((n_grid, nb), dtype=complex)
        cut_iter = iter(enumerate(cuts))
        next_cut = next(cut_iter, None)
        lo = 0
        while lo < len(order):
            hi = min(lo + coeff_block, len(order))
            if next_cut is not None and hi > next_cut[1]:
                hi = next_cut[1]
            idx = draw[lo:hi]
            z = np.empty((hi - lo, nb), dtype=complex)
            for k in range(nb):
                g_re, g_im = _gaussian_pairs(seed, r0 + k, int(idx.min()), int(idx.max() - idx.min() + 1))
                rel = idx - idx.min()
                z[:, k] = g_re[rel] + 1j * g_im[rel]
            z *= sig[lo:hi, None]
            basis = e_kernel(grid[:, None], freq[None, lo:hi])
            _kahan_block_sum(acc, comp, basis @ z)
            lo = hi
            if next_cut is not None and lo == next_cut[1]:
                sups[r0:r1, next_cut[0]] = np.max(np.abs(acc), axis=0)
                next_cut = next(cut_iter, None)
            if next_cut is None:
                break

    # cuts were laid out for n_list descending; flip back to ascending
    sups = sups[:, ::-1]
    errors = sups.mean(axis=0)
    stderrs = sups.std(axis=0, ddof=1) / math.sqrt(reps)
    if np.any(stderrs > 0.25 * errors):
        raise InsufficientReplicationsError(
            "CLT half-width exceeds 25% of the tail estimate; increase reps"
        )

    x = np.log(np.asarray(n_list, dtype=float))
    y = np.log(errors)
    slope, _ = np.polyfit(x, y, 1)
    resid = y - np.polyval(np.polyfit(x, y, 1), x)
    dof = max(1, len(x) - 2)
    slope_se = math.sqrt(float(resid @ resid) / dof / float(((x - x.mean()) ** 2).sum()))
    x_scaled = -model.hurst * x + 0.5 * np.log(np.log(np.asarray(n_list, dtype=float)))
    scaled_slope, _ = np.polyfit(x_scaled, y, 1)
    return ConvergenceReport(
        n_list=tuple(n_list),
        errors=tuple(float(e) for e in errors),
        stderrs=tuple(float(s) for s in stderrs),
        slope=float(slope),
        slope_ci=float(1.96 * slope_se),
        scaled_slope=float(scaled_slope),
    )


def empirical_covariance(paths, i, j):
    """Sample covariance mean(X_{t_i} conj(X_{t_j})) over replicated paths.

    Returns (estimate, standard error); the estimator's real part is
    reported (the population value is real).  All paths must share one grid
    and at least two replications are required for the standard error.
    """
    if len(paths) < 2:
        raise ValueError("standard error undefined for fewer than two paths")
    grid0 = paths[0].grid
    for p in paths[1:]:
        if len(p.grid) != len(grid0) or not np.array_equal(p.grid, grid0):
            raise ValueError("paths do not share a common grid")
    i = int(i)
    j = int(j)
    vi = np.array([p.values[i] for p in paths])
    vj = np.array([p.values[j] for p in paths])
    w = np.real(vi * np.conj(vj))
    est = float(np.mean(w))
    stderr = float(np.std(w, ddof=1) / math.sqrt(len(paths)))
    return est, stderr
