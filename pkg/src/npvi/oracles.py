"""Independent numerical ground truth: finite differences, Monte Carlo
entropy, and low-dimensional quadrature for the evidence.

Everything here deliberately avoids the analytic code paths it is used to
check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .mixture import MixtureApproximation, mixture_log_density_batch, sample_mixture
from .modelcore import ConfigurationError, LogJointModel, NumericalError

_BOUNDARY_DECAY = 50.0


def fd_gradient(fn, theta, step: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of a scalar function of a vector."""
    theta = np.asarray(theta, dtype=float)
    out = np.empty(theta.size)
    for i in range(theta.size):
        offset = np.zeros(theta.size)
        offset[i] = step
        fp = float(fn(theta + offset))
        fm = float(fn(theta - offset))
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise NumericalError(f"non-finite stencil value in coordinate {i}")
        out[i] = (fp - fm) / (2.0 * step)
    return out


def fd_hessian_diag(fn, theta, step: float = 1e-4) -> np.ndarray:
    """Second central differences per coordinate."""
    theta = np.asarray(theta, dtype=float)
    f0 = float(fn(theta))
    if not np.isfinite(f0):
        raise NumericalError("non-finite value at the expansion point")
    out = np.empty(theta.size)
    for i in range(theta.size):
        offset = np.zeros(theta.size)
        offset[i] = step
        fp = float(fn(theta + offset))
        fm = float(fn(theta - offset))
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise NumericalError(f"non-finite stencil value in coordinate {i}")
        out[i] = (fp - 2.0 * f0 + fm) / step ** 2
    return out


def mc_entropy(
    q: MixtureApproximation, num_samples: int, seed: int
) -> tuple[float, float]:
    """Monte Carlo mixture entropy estimate and its standard error."""
    if num_samples < 1000:
        raise ConfigurationError("use at least 1000 samples")
    draws = sample_mixture(q, num_samples, seed)
    logp = mixture_log_density_batch(q, draws)
    estimate = float(-np.mean(logp))
    stderr = float(np.std(logp, ddof=1) / np.sqrt(num_samples))
    return estimate, stderr


@dataclass(frozen=True)
class GridSpec:
    """Rectangular quadrature grid for one or two dimensions."""

    lower: tuple
    upper: tuple
    counts: tuple

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        n = np.asarray(self.counts, dtype=int)
        if not 1 <= lo.size <= 2 or lo.size != hi.size or lo.size != n.size:
            raise ConfigurationError("grids support one or two dimensions")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ConfigurationError("grid bounds must be finite")
        if np.any(hi <= lo):
            raise ConfigurationError("upper bounds must exceed lower bounds")
        if np.any(n < 16):
            raise ConfigurationError("need at least 16 points per dimension")

    @property
    def dimension(self) -> int:
        return len(self.counts)


def _log_trapezoid_weights(lo: float, hi: float, n: int) -> np.ndarray:
    h = (hi - lo) / (n - 1)
    w = np.full(n, h)
    w[0] = w[-1] = 0.5 * h
    return np.log(w)


def grid_log_evidence(model: LogJointModel, grid: GridSpec) -> float:
    """Log of the trapezoid-rule integral of exp(log_joint) over the grid.

    Computed in the log domain. Fails when the integrand has not decayed by
    at least 50 nats relative to its maximum at the grid boundary, since the
    integral would then be badly truncated.
    """
    if model.dimension != grid.dimension:
        raise ConfigurationError("model and grid dimensions disagree")
    axes = [
        np.linspace(grid.lower[d], grid.upper[d], grid.counts[d])
        for d in range(grid.dimension)
    ]
    if grid.dimension == 1:
        values = np.array([model.log_joint(np.array([x])) for x in axes[0]])
        boundary = max(values[0], values[-1])
        logw = _log_trapezoid_weights(grid.lower[0], grid.upper[0], grid.counts[0])
    else:
        n0, n1 = grid.counts
        values = np.empty((n0, n1))
        for i, x in enumerate(axes[0]):
            for j, y in enumerate(axes[1]):
                values[i, j] = model.log_joint(np.array([x, y]))
        boundary = max(
            values[0, :].max(),
            values[-1, :].max(),
            values[:, 0].max(),
            values[:, -1].max(),
        )
        logw = _log_trapezoid_weights(
            grid.lower[0], grid.upper[0], n0
        )[:, None] + _log_trapezoid_weights(grid.lower[1], grid.upper[1], n1)[None, :]
    peak = float(values.max())
    if not np.isfinite(peak):
        raise NumericalError("log joint is not finite anywhere on the grid")
    if boundary > peak - _BOUNDARY_DECAY:
        raise NumericalError(
            "integrand has significant mass at the grid boundary; "
            "enlarge the grid extent"
        )
    return float(logsumexp(values + logw))
