"""Spectral theory of fractional Brownian motion.

Fractional-order Bessel special functions, the Krein orthogonal functions
and reproducing kernel of the fBm frequency domain, and a rate-optimal
Paley-Wiener series sampler, with quadrature and Monte Carlo oracles for
every closed form.
"""

from .specfun import (
    DomainError,
    ZeroTable,
    bessel_j,
    bessel_j_prime,
    bessel_zeros,
    gamma_fn,
)
from .quad import (
    QuadratureError,
    QuadratureSpec,
    TailDivergenceError,
    inner_V,
    integrate_dV,
    integrate_mu,
)
from .spectral import (
    HurstModel,
    e_kernel,
    fbm_covariance,
    m_kernel,
    mhat,
    phi,
    phi_norm_bound,
    phi_series,
    spectral_density,
    variance_V,
    variance_scale_forms,
    x_kernel,
)
from .rkhs import (
    KernelEvalPolicy,
    P_fn,
    P_star_fn,
    S_T_closed,
    S_T_quadrature,
    U_forward,
    U_inverse,
    basis_function,
    krein_ode_residual,
    reproduce,
    sigma_squared,
)
from .expansion import (
    ConvergenceReport,
    ExpansionSpec,
    InsufficientReplicationsError,
    SamplePath,
    coefficient_variances,
    covariance_partial_sum,
    empirical_covariance,
    sample_complex_path,
    sample_real_path,
    truncation_study,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError", "ZeroTable", "bessel_j", "bessel_j_prime", "bessel_zeros",
    "gamma_fn", "QuadratureError", "QuadratureSpec", "TailDivergenceError",
    "inner_V", "integrate_dV", "integrate_mu", "HurstModel", "e_kernel",
    "fbm_covariance", "m_kernel", "mhat", "phi", "phi_norm_bound",
    "phi_series", "spectral_density", "variance_V", "variance_scale_forms",
    "x_kernel", "KernelEvalPolicy", "P_fn", "P_star_fn", "S_T_closed",
    "S_T_quadrature", "U_forward", "U_inverse", "basis_function",
    "krein_ode_residual", "reproduce", "sigma_squared", "ConvergenceReport",
    "ExpansionSpec", "InsufficientReplicationsError", "SamplePath",
    "coefficient_variances", "covariance_partial_sum", "empirical_covariance",
    "sample_complex_path", "sample_real_path", "truncation_study",
    "__version__",
]
