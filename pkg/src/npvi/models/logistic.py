"""Hierarchical binary logistic regression with a Gamma prior on the weight precision.

Hidden variables are K regression weights and one precision alpha > 0; the
weights get independent N(0, 1/alpha) priors and alpha a Gamma(a, b) prior
(shape / inverse scale). Labels in {-1, +1} follow a logistic likelihood.
The public model lives in unconstrained space: alpha enters through a log
reparameterization with its Jacobian correction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit, gammaln, log_expit, logsumexp

from ..modelcore import (
    ConfigurationError,
    IDENTITY,
    LOG,
    LogJointModel,
    TransformSpec,
    TransformedModel,
    wrap_transformed,
)
from .data import DatasetTable

_LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass
class LogisticModelSpec:
    """Data plus the Gamma hyperparameters of the precision prior."""

    data: DatasetTable
    a: float = 1.0
    b: float = 0.01

    def __post_init__(self):
        if self.a <= 0.0 or self.b <= 0.0:
            raise ConfigurationError("Gamma hyperparameters must be positive")
        if not self.data.is_classification:
            raise ConfigurationError("logistic regression needs -1/+1 labels")


class _LogisticConstrained(LogJointModel):
    """Log joint on the constrained space theta = (w_1..w_K, alpha)."""

    def __init__(self, spec: LogisticModelSpec):
        self.spec = spec
        self.x = spec.data.covariates
        self.c = spec.data.targets
        self.num_weights = self.x.shape[1]
        self.dimension = self.num_weights + 1

    def _split(self, theta):
        theta = np.asarray(theta, dtype=float)
        return theta[: self.num_weights], float(theta[self.num_weights])

    def log_joint(self, theta):
        w, alpha = self._split(theta)
        if alpha <= 0.0:
            return float("-inf")
        a, b, k = self.spec.a, self.spec.b, self.num_weights
        prior_alpha = a * np.log(b) - gammaln(a) + (a - 1.0) * np.log(alpha) - b * alpha
        prior_w = 0.5 * k * np.log(alpha) - 0.5 * k * _LOG_2PI - 0.5 * alpha * float(w @ w)
        z = self.c * (self.x @ w)
        return float(prior_alpha + prior_w + np.sum(log_expit(z)))

    def gradient(self, theta):
        w, alpha = self._split(theta)
        a, b, k = self.spec.a, self.spec.b, self.num_weights
        z = self.c * (self.x @ w)
        gw = self.x.T @ (self.c * expit(-z)) - alpha * w
        galpha = (a - 1.0) / alpha - b + 0.5 * k / alpha - 0.5 * float(w @ w)
        return np.concatenate([gw, [galpha]])

    def hessian_diag(self, theta):
        w, alpha = self._split(theta)
        a, k = self.spec.a, self.num_weights
        z = self.c * (self.x @ w)
        s = expit(z)
        hw = -(self.x ** 2).T @ (s * (1.0 - s)) - alpha
        halpha = -(a - 1.0) / alpha ** 2 - 0.5 * k / alpha ** 2
        return np.concatenate([hw, [halpha]])


def logistic_log_joint(spec: LogisticModelSpec) -> TransformedModel:
    """Unconstrained log joint of the hierarchical logistic model.

    Coordinates are the K raw weights followed by log(alpha); the Jacobian
    of the log reparameterization is included.
    """
    inner = _LogisticConstrained(spec)
    tags = (IDENTITY,) * inner.num_weights + (LOG,)
    return wrap_transformed(inner, TransformSpec(tags))


def _weights_from_samples(samples, num_covariates: int) -> np.ndarray:
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.shape[0] == 0:
        raise ValueError("sample list must be nonempty")
    if samples.shape[1] != num_covariates + 1:
        raise ConfigurationError(
            f"samples have {samples.shape[1]} coordinates, expected "
            f"{num_covariates + 1} (weights plus log precision)"
        )
    return samples[:, :num_covariates]


def logistic_predict(samples, x_new) -> float:
    """Monte Carlo class-1 probability: mean of sigmoid(w @ x) over samples.

    ``samples`` are unconstrained parameter vectors (weights plus log
    precision) as produced by the fitted approximations.
    """
    x_new = np.asarray(x_new, dtype=float)
    w = _weights_from_samples(samples, x_new.size)
    return float(np.mean(expit(w @ x_new)))


def logistic_test_log_likelihood(
    samples, covariates, labels, method: str = "average-of-log"
) -> float:
    """Test log likelihood of labeled points under the sampled weights.

    ``average-of-log`` (default) averages each sample's full-test
    log likelihood; ``log-of-average`` instead averages per-point predictive
    probabilities before taking logs.
    """
    covariates = np.atleast_2d(np.asarray(covariates, dtype=float))
    labels = np.asarray(labels, dtype=float)
    w = _weights_from_samples(samples, covariates.shape[1])
    z = labels[None, :] * (w @ covariates.T)  # (S, T)
    per_point = log_expit(z)
    if method == "average-of-log":
        return float(np.mean(np.sum(per_point, axis=1)))
    if method == "log-of-average":
        num_samples = w.shape[0]
        return float(np.sum(logsumexp(per_point, axis=0) - np.log(num_samples)))
    raise ConfigurationError(f"unknown predictive method {method!r}")


def synth_logistic(
    seed: int,
    num_points: int,
    num_covariates: int,
    w_true=None,
    alpha_true: float = 1.0,
) -> DatasetTable:
    """Forward-sample a classification dataset from the generative model.

    Covariates are i.i.d. standard normal. When ``w_true`` is omitted the
    weights are drawn from their N(0, 1/alpha_true) prior. Deterministic
    per seed.
    """
    if alpha_true <= 0.0:
        raise ConfigurationError("alpha_true must be positive")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((num_points, num_covariates))
    if w_true is None:
        w_true = rng.normal(0.0, alpha_true ** -0.5, num_covariates)
    w_true = np.asarray(w_true, dtype=float)
    p = expit(x @ w_true)
    labels = np.where(rng.random(num_points) < p, 1.0, -1.0)
    return DatasetTable(x, labels)
