"""Comparison engines: MAP point estimation, diagonal Laplace, and HMC.

All three consume the same :class:`~npvi.modelcore.LogJointModel` contract
as the mixture engine.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .modelcore import (
    CapabilityError,
    ConfigurationError,
    LogJointModel,
    NumericalError,
)
from .optim import OptimOptions, maximize

_MAP_GRADIENT_NORM = 1e-5


@dataclass
class HmcConfig:
    """Leapfrog/Metropolis sampler settings; identity mass matrix throughout."""

    step_size: float
    leapfrog_steps: int
    num_samples: int = 5000
    keep_last: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.step_size <= 0.0:
            raise ConfigurationError("step_size must be positive")
        if self.leapfrog_steps < 1:
            raise ConfigurationError("leapfrog_steps must be at least 1")
        if not 1 <= self.keep_last <= self.num_samples:
            raise ConfigurationError("keep_last must lie in [1, num_samples]")


@dataclass
class PosteriorSamples:
    """Kept chain states (S, D) and the chain's overall acceptance rate."""

    samples: np.ndarray
    acceptance_rate: float


@dataclass
class DiagonalGaussian:
    """Axis-aligned Gaussian; the shape returned by the Laplace engine."""

    mean: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        self.mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        self.variances = np.atleast_1d(np.asarray(self.variances, dtype=float))
        if self.mean.shape != self.variances.shape:
            raise ConfigurationError("mean and variances must match in shape")
        if np.any(self.variances <= 0.0):
            raise ConfigurationError("variances must be positive")

    def sample(self, count: int, seed: int) -> np.ndarray:
        rng = np.random.default_rng(seed)
        noise = rng.standard_normal((count, self.mean.size))
        return self.mean + np.sqrt(self.variances) * noise


def map_estimate(
    model: LogJointModel,
    restarts: int = 10,
    seed: int = 0,
    options: OptimOptions | None = None,
) -> np.ndarray:
    """Highest-density point found by multi-start quasi-Newton ascent.

    Start ``i`` is drawn from N(0, I) with stream ``seed + i``. Only results
    whose gradient infinity norm is below 1e-5 qualify; the best qualifying
    value wins. Raises :class:`NumericalError` when no restart qualifies.
    """
    if not model.has_gradient:
        raise CapabilityError("MAP estimation requires a model gradient")
    if restarts < 1:
        raise ConfigurationError("restarts must be at least 1")
    opts = options if options is not None else OptimOptions(max_iterations=500)
    best = None
    diagnostics = []
    for i in range(restarts):
        x0 = np.random.default_rng(seed + i).standard_normal(model.dimension)
        if not np.isfinite(model.log_joint(x0)):
            diagnostics.append(f"restart {i}: off-support start")
            continue
        report = maximize(model.log_joint, model.gradient, x0, opts)
        gnorm = float(np.max(np.abs(model.gradient(report.argmax))))
        diagnostics.append(
            f"restart {i}: status={report.status} value={report.value:.6g} "
            f"grad_norm={gnorm:.3g}"
        )
        if gnorm < _MAP_GRADIENT_NORM and (best is None or report.value > best.value):
            best = report
    if best is None:
        raise NumericalError(
            "no restart reached a stationary point:\n" + "\n".join(diagnostics)
        )
    return best.argmax


def laplace_diagonal(model: LogJointModel, theta_map) -> DiagonalGaussian:
    """Diagonal Gaussian at a mode: variance -1/H_ii per coordinate.

    Requires every Hessian-diagonal entry at ``theta_map`` to be strictly
    negative.
    """
    theta_map = np.asarray(theta_map, dtype=float)
    h = np.asarray(model.hessian_diag(theta_map), dtype=float)
    bad = np.flatnonzero(h >= 0.0)
    if bad.size:
        raise NumericalError(f"not a local maximum in coordinate {int(bad[0])}")
    return DiagonalGaussian(theta_map.copy(), -1.0 / h)


def leapfrog(gradient, position, momentum, step_size: float, num_steps: int):
    """Leapfrog integration of the density-ascent Hamiltonian flow.

    Returns the final (position, momentum) pair. The update is symplectic
    and time-reversible: integrating the result with negated momentum
    returns to the start.
    """
    q = np.asarray(position, dtype=float).copy()
    p = np.asarray(momentum, dtype=float).copy()
    p += 0.5 * step_size * gradient(q)
    for i in range(num_steps):
        q += step_size * p
        if i < num_steps - 1:
            p += step_size * gradient(q)
    p += 0.5 * step_size * gradient(q)
    return q, p


def hmc_sample(
    model: LogJointModel, config: HmcConfig, initial=None
) -> PosteriorSamples:
    """Hamiltonian Monte Carlo with Metropolis correction; deterministic per seed.

    The chain starts at ``initial`` (origin by default); proposals with
    non-finite energy are rejected. Returns the last ``keep_last`` states.
    """
    if not model.has_gradient:
        raise CapabilityError("HMC requires a model gradient")
    q = (
        np.zeros(model.dimension)
        if initial is None
        else np.asarray(initial, dtype=float).copy()
    )
    logp = float(model.log_joint(q))
    if not np.isfinite(logp):
        raise ValueError("log joint is not finite at the initial state")
    rng = np.random.default_rng(config.seed)
    chain = np.empty((config.num_samples, model.dimension))
    accepted = 0
    for i in range(config.num_samples):
        p0 = rng.standard_normal(model.dimension)
        q_new, p_new = leapfrog(
            model.gradient, q, p0, config.step_size, config.leapfrog_steps
        )
        logp_new = float(model.log_joint(q_new)) if np.all(np.isfinite(q_new)) else float("-inf")
        log_ratio = (logp_new - 0.5 * float(p_new @ p_new)) - (
            logp - 0.5 * float(p0 @ p0)
        )
        if np.isfinite(log_ratio) and (
            log_ratio >= 0.0 or rng.random() < np.exp(log_ratio)
        ):
            q, logp = q_new, logp_new
            accepted += 1
        chain[i] = q
    return PosteriorSamples(
        chain[-config.keep_last :].copy(), accepted / config.num_samples
    )


def samples_to_csv(samples: np.ndarray) -> str:
    """One row per sample, one column per coordinate, 17-digit floats."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"theta{i + 1}" for i in range(samples.shape[1])])
    for row in samples:
        writer.writerow([format(v, ".17g") for v in row])
    return buf.getvalue()
