"""Alternating mixture fitting driver.

One outer iteration ascends each component mean on the first-order objective
(one mean at a time by default), then ascends all log bandwidths jointly on
the second-order objective. The loop stops when the second-order objective
changes by less than the tolerance between outer iterations.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .mixture import (
    MixtureApproximation,
    elbo_l2,
    entropy_lower_bound,
    grad_l1_mean,
    grad_l1_means,
    grad_l2_log_sigma,
)
from .modelcore import (
    CapabilityError,
    ConfigurationError,
    LogJointModel,
    NumericalError,
)
from .optim import OptimOptions, maximize

logger = logging.getLogger(__name__)

_MAX_REINIT = 5  # extra initialization draws before giving up


@dataclass
class NpvConfig:
    """Settings for :func:`fit`.

    ``bandwidth_bounds`` are standard-deviation bounds enforced in log-sigma
    space; they keep the bandwidth step from diverging when a component sits
    in a non-concave region. ``mean_update="batch"`` ascends all means
    jointly instead of one at a time (experimental). Setting
    ``optimize_bandwidths=False`` freezes every bandwidth at
    ``initial_sigma``.
    """

    num_components: int = 1
    tolerance: float = 1e-4
    max_outer_iterations: int = 50
    bandwidth_bounds: tuple = (1e-6, 1e3)
    seed: int = 0
    mean_init_scale: float = 1.0
    initial_sigma: float = 1.0
    mean_update: str = "coordinate"
    optimize_bandwidths: bool = True
    mean_optim: OptimOptions = field(
        default_factory=lambda: OptimOptions(max_iterations=25)
    )
    bandwidth_optim: OptimOptions = field(
        default_factory=lambda: OptimOptions(max_iterations=50)
    )

    def __post_init__(self):
        if self.num_components < 1:
            raise ConfigurationError("need at least one component")
        if self.tolerance <= 0.0:
            raise ConfigurationError("tolerance must be positive")
        if self.max_outer_iterations < 1:
            raise ConfigurationError("max_outer_iterations must be at least 1")
        lo, hi = self.bandwidth_bounds
        if not 0.0 < lo < hi:
            raise ConfigurationError(
                "bandwidth bounds must be positive with lower < upper"
            )
        if self.mean_update not in ("coordinate", "batch"):
            raise ConfigurationError("mean_update must be 'coordinate' or 'batch'")
        if self.initial_sigma <= 0.0 or self.mean_init_scale <= 0.0:
            raise ConfigurationError("initialization scales must be positive")


@dataclass
class FitResult:
    """Fitted mixture plus the per-outer-iteration objective trace.

    ``l2_trace`` holds one value per completed outer iteration plus the
    value at initialization, so its length is ``outer_iterations + 1``.
    """

    mixture: MixtureApproximation
    l2_trace: list
    converged: bool
    outer_iterations: int
    wall_time: float


def _ascend_mean(model, means, sigmas, m, opts):
    """Maximize the first-order objective over mean ``m`` alone."""
    n = means.shape[0]

    def objective(x):
        cur = means.copy()
        cur[m] = x
        q = MixtureApproximation(cur, sigmas)
        return float(model.log_joint(x)) / n + entropy_lower_bound(q)

    def gradient(x):
        cur = means.copy()
        cur[m] = x
        return grad_l1_mean(MixtureApproximation(cur, sigmas), model, m)

    try:
        report = maximize(objective, gradient, means[m], opts)
    except ValueError as exc:
        logger.warning("mean step %d failed (%s); keeping previous value", m, exc)
        return means[m]
    return report.argmax


def _ascend_means_batch(model, means, sigmas, opts):
    """Maximize the first-order objective over all means jointly."""
    n, d = means.shape

    def objective(flat):
        cur = flat.reshape(n, d)
        q = MixtureApproximation(cur, sigmas)
        f = sum(float(model.log_joint(mu)) for mu in cur) / n
        return f + entropy_lower_bound(q)

    def gradient(flat):
        cur = flat.reshape(n, d)
        return grad_l1_means(MixtureApproximation(cur, sigmas), model).ravel()

    try:
        report = maximize(objective, gradient, means.ravel(), opts)
    except ValueError as exc:
        logger.warning("batch mean step failed (%s); keeping previous values", exc)
        return means
    return report.argmax.reshape(n, d)


def _ascend_bandwidths(model, means, sigmas, log_lo, log_hi, opts):
    """Maximize the second-order objective over all log bandwidths."""

    def clamp(v):
        return np.clip(v, log_lo, log_hi)

    def objective(v):
        return elbo_l2(MixtureApproximation(means, np.exp(clamp(v))), model)

    def gradient(v):
        vc = clamp(v)
        g = grad_l2_log_sigma(MixtureApproximation(means, np.exp(vc)), model)
        g[vc != v] = 0.0  # flat beyond the clamp
        return g

    v0 = clamp(np.log(sigmas))
    try:
        report = maximize(objective, gradient, v0, opts)
    except ValueError as exc:
        logger.warning("bandwidth step failed (%s); keeping previous values", exc)
        return sigmas
    v_star = clamp(report.argmax)
    if np.any(v_star != report.argmax):
        logger.warning(
            "bandwidths clamped to the configured bounds "
            "(objective unbounded in a non-concave region?)"
        )
    return np.exp(v_star)


def fit(model: LogJointModel, config: NpvConfig | None = None) -> FitResult:
    """Fit a uniform isotropic Gaussian mixture to the model's posterior.

    Alternates coordinate ascents of the component means on the first-order
    objective with a joint ascent of the log bandwidths on the second-order
    objective, until the second-order objective changes by less than the
    tolerance or the iteration cap is reached.

    Raises
    ------
    CapabilityError
        If the model lacks a gradient or Hessian diagonal.
    NumericalError
        If no finite starting objective is found after several draws.
    """
    cfg = config if config is not None else NpvConfig()
    if not model.has_gradient:
        raise CapabilityError("fitting requires a model gradient")
    if not model.has_hessian_diag:
        raise CapabilityError("fitting requires a model Hessian diagonal")

    start = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    n, d = cfg.num_components, model.dimension
    log_lo, log_hi = np.log(cfg.bandwidth_bounds[0]), np.log(cfg.bandwidth_bounds[1])

    for attempt in range(1 + _MAX_REINIT):
        means = rng.normal(0.0, cfg.mean_init_scale, (n, d))
        sigmas = np.full(n, float(cfg.initial_sigma))
        l2 = elbo_l2(MixtureApproximation(means, sigmas), model)
        if np.isfinite(l2):
            break
        logger.warning("non-finite objective at initialization (draw %d)", attempt)
    else:
        raise NumericalError(
            f"no finite starting objective after {1 + _MAX_REINIT} draws"
        )

    trace = [l2]
    converged = False
    for _ in range(cfg.max_outer_iterations):
        if cfg.mean_update == "coordinate":
            for m in range(n):
                means[m] = _ascend_mean(model, means, sigmas, m, cfg.mean_optim)
        else:
            means = _ascend_means_batch(model, means, sigmas, cfg.mean_optim)
        if cfg.optimize_bandwidths:
            sigmas = _ascend_bandwidths(
                model, means, sigmas, log_lo, log_hi, cfg.bandwidth_optim
            )
        l2 = elbo_l2(MixtureApproximation(means, sigmas), model)
        trace.append(l2)
        if abs(trace[-1] - trace[-2]) < cfg.tolerance:
            converged = True
            break

    mixture = MixtureApproximation(means.copy(), sigmas.copy())
    return FitResult(
        mixture=mixture,
        l2_trace=trace,
        converged=converged,
        outer_iterations=len(trace) - 1,
        wall_time=time.perf_counter() - start,
    )
