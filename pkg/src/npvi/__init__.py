"""Posterior approximation with uniform isotropic Gaussian mixtures.

The mixture means and bandwidths are optimized against approximate evidence
lower bounds that need only the target's log density, gradient and Hessian
diagonal. MAP, diagonal Laplace and Hamiltonian Monte Carlo engines consume
the same model contract for comparison.
"""

from .baselines import (
    DiagonalGaussian,
    HmcConfig,
    PosteriorSamples,
    hmc_sample,
    laplace_diagonal,
    leapfrog,
    map_estimate,
    samples_to_csv,
)
from .fit import FitResult, NpvConfig, fit
from .mixture import (
    MixtureApproximation,
    component_overlap,
    elbo_l1,
    elbo_l2,
    entropy_lower_bound,
    grad_l1_mean,
    grad_l1_means,
    grad_l2_log_sigma,
    mixture_from_json,
    mixture_log_density,
    mixture_log_density_batch,
    mixture_to_json,
    sample_mixture,
)
from .modelcore import (
    CapabilityError,
    ConfigurationError,
    LogJointModel,
    NumericalError,
    TransformSpec,
    TransformedModel,
    apply_transform,
    invert_transform,
    log_jacobian,
    wrap_transformed,
)
from .optim import OptimOptions, OptimReport, maximize
from .oracles import (
    GridSpec,
    fd_gradient,
    fd_hessian_diag,
    grid_log_evidence,
    mc_entropy,
)
from . import models

__all__ = [
    "CapabilityError",
    "ConfigurationError",
    "DiagonalGaussian",
    "FitResult",
    "GridSpec",
    "HmcConfig",
    "LogJointModel",
    "MixtureApproximation",
    "NpvConfig",
    "NumericalError",
    "OptimOptions",
    "OptimReport",
    "PosteriorSamples",
    "TransformSpec",
    "TransformedModel",
    "apply_transform",
    "component_overlap",
    "elbo_l1",
    "elbo_l2",
    "entropy_lower_bound",
    "fd_gradient",
    "fd_hessian_diag",
    "fit",
    "grad_l1_mean",
    "grad_l1_means",
    "grad_l2_log_sigma",
    "grid_log_evidence",
    "hmc_sample",
    "invert_transform",
    "laplace_diagonal",
    "leapfrog",
    "log_jacobian",
    "map_estimate",
    "maximize",
    "mc_entropy",
    "mixture_from_json",
    "mixture_log_density",
    "mixture_log_density_batch",
    "mixture_to_json",
    "models",
    "sample_mixture",
    "samples_to_csv",
    "wrap_transformed",
]
