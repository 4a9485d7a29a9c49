"""Uniform-weight isotropic Gaussian mixtures and their variational objectives.

The approximating family is a mixture of N spherical Gaussians with equal
weights 1/N. Two approximations of the evidence lower bound are provided:
``elbo_l1`` uses only density values at the component means, ``elbo_l2``
adds a per-component curvature correction from the Hessian trace. Both share
the same mixture-entropy lower bound, computed from Gaussian convolutions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .modelcore import CapabilityError, ConfigurationError, LogJointModel

_LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class MixtureApproximation:
    """Mixture of N spherical Gaussians with implicit uniform weights.

    Parameters
    ----------
    means : ndarray, shape (N, D)
        Component means.
    sigmas : ndarray, shape (N,)
        Per-component isotropic standard deviations, strictly positive.
    """

    means: np.ndarray
    sigmas: np.ndarray

    def __post_init__(self):
        means = np.atleast_2d(np.asarray(self.means, dtype=float))
        sigmas = np.atleast_1d(np.asarray(self.sigmas, dtype=float))
        if means.ndim != 2:
            raise ConfigurationError("means must be a (N, D) array")
        if sigmas.shape != (means.shape[0],):
            raise ConfigurationError("sigmas must hold one value per component")
        if not (np.all(np.isfinite(means)) and np.all(np.isfinite(sigmas))):
            raise ConfigurationError("mixture parameters must be finite")
        if np.any(sigmas <= 0.0):
            raise ConfigurationError("sigmas must be strictly positive")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "sigmas", sigmas)

    @property
    def num_components(self) -> int:
        return self.means.shape[0]

    @property
    def dimension(self) -> int:
        return self.means.shape[1]


def _check_model(q: MixtureApproximation, model: LogJointModel) -> None:
    if model.dimension != q.dimension:
        raise ConfigurationError(
            f"model dimension {model.dimension} does not match "
            f"mixture dimension {q.dimension}"
        )


def _check_index(q: MixtureApproximation, n: int) -> None:
    if not 0 <= n < q.num_components:
        raise ConfigurationError(
            f"component index {n} outside [0, {q.num_components})"
        )


def mixture_log_density(q: MixtureApproximation, theta: np.ndarray) -> float:
    """Log density of the mixture at a point, via log-sum-exp."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (q.dimension,):
        raise ConfigurationError(
            f"point has shape {theta.shape}, expected ({q.dimension},)"
        )
    var = q.sigmas ** 2
    sq = np.sum((q.means - theta) ** 2, axis=1)
    comp = -0.5 * (q.dimension * (_LOG_2PI + np.log(var)) + sq / var)
    return float(logsumexp(comp) - np.log(q.num_components))


def mixture_log_density_batch(
    q: MixtureApproximation, thetas: np.ndarray
) -> np.ndarray:
    """Vectorized ``mixture_log_density`` over rows of ``thetas``."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    var = q.sigmas ** 2
    diff = thetas[:, None, :] - q.means[None, :, :]
    sq = np.einsum("snd,snd->sn", diff, diff)
    comp = -0.5 * (q.dimension * (_LOG_2PI + np.log(var))[None, :] + sq / var[None, :])
    return logsumexp(comp, axis=1) - np.log(q.num_components)


def _pairwise_log_kernels(q: MixtureApproximation):
    """Pairwise smoothed kernels log N(mu_n; mu_j, (sigma_n^2 + sigma_j^2) I).

    Returns the (N, N) log-kernel matrix together with the pairwise variances
    and squared mean distances reused by the analytic gradients.
    """
    var = q.sigmas ** 2
    pair_var = var[:, None] + var[None, :]
    diff = q.means[:, None, :] - q.means[None, :, :]
    sq = np.einsum("njd,njd->nj", diff, diff)
    logk = -0.5 * (q.dimension * (_LOG_2PI + np.log(pair_var)) + sq / pair_var)
    return logk, pair_var, sq


def _log_overlaps(q: MixtureApproximation) -> np.ndarray:
    logk, _, _ = _pairwise_log_kernels(q)
    return logsumexp(logk, axis=1) - np.log(q.num_components)


def _overlap_softmax(q: MixtureApproximation):
    """Log overlaps plus per-row softmax weights over the pairwise kernels."""
    logk, pair_var, sq = _pairwise_log_kernels(q)
    row_lse = logsumexp(logk, axis=1, keepdims=True)
    resp = np.exp(logk - row_lse)
    logq = row_lse[:, 0] - np.log(q.num_components)
    return resp, pair_var, sq, logq


def component_overlap(q: MixtureApproximation, n: int) -> float:
    """Smoothed mixture density at component ``n``'s mean.

    This is the mixture evaluated at ``mu_n`` after convolving every
    component with component ``n``'s own kernel: the self term has variance
    ``2 sigma_n^2`` and cross terms ``sigma_n^2 + sigma_j^2``. Computed in
    the log domain and exponentiated at the end.
    """
    _check_index(q, n)
    return float(np.exp(_log_overlaps(q)[n]))


def entropy_lower_bound(q: MixtureApproximation) -> float:
    """Jensen lower bound on the mixture entropy: -(1/N) sum_n log q_n."""
    return float(-np.mean(_log_overlaps(q)))


def _values_at_means(model: LogJointModel, q: MixtureApproximation) -> np.ndarray:
    return np.array([float(model.log_joint(mu)) for mu in q.means])


def elbo_l1(q: MixtureApproximation, model: LogJointModel) -> float:
    """First-order approximate evidence lower bound.

    Average of the log joint at the component means plus the entropy lower
    bound; no derivatives of the model are used. Returns ``-inf`` when the
    model vanishes at any mean (the optimizer treats that as a rejection).
    """
    _check_model(q, model)
    f = _values_at_means(model, q)
    if np.isneginf(f).any():
        return float("-inf")
    return float(np.mean(f) + entropy_lower_bound(q))


def elbo_l2(q: MixtureApproximation, model: LogJointModel) -> float:
    """Second-order approximate evidence lower bound.

    Adds the curvature correction ``sigma_n^2 / 2 * trace(H(mu_n))`` to each
    component's contribution, where H is the model Hessian. Requires the
    model's Hessian diagonal.
    """
    _check_model(q, model)
    if not model.has_hessian_diag:
        raise CapabilityError(
            "second-order objective requires a model Hessian diagonal"
        )
    f = _values_at_means(model, q)
    if np.isneginf(f).any():
        return float("-inf")
    trace = np.array([float(np.sum(model.hessian_diag(mu))) for mu in q.means])
    return float(
        np.mean(f + 0.5 * q.sigmas ** 2 * trace) + entropy_lower_bound(q)
    )


def grad_l1_mean(
    q: MixtureApproximation, model: LogJointModel, m: int
) -> np.ndarray:
    """Gradient of ``elbo_l1`` with respect to component mean ``m``.

    Includes the model term ``grad f(mu_m) / N`` and the entropy-bound
    coupling of ``mu_m`` to every overlap, both through its own row and
    through its appearance in the other components' rows.
    """
    _check_model(q, model)
    _check_index(q, m)
    if not model.has_gradient:
        raise CapabilityError("mean gradient requires a model gradient")
    resp, pair_var, _, _ = _overlap_softmax(q)
    w = resp / pair_var
    pulled = w[m] @ q.means + w[:, m] @ q.means
    wsum = w[m].sum() + w[:, m].sum()
    entropy_part = pulled - wsum * q.means[m]
    return (model.gradient(q.means[m]) - entropy_part) / q.num_components


def grad_l1_means(q: MixtureApproximation, model: LogJointModel) -> np.ndarray:
    """Gradient of ``elbo_l1`` with respect to all means at once, (N, D)."""
    _check_model(q, model)
    if not model.has_gradient:
        raise CapabilityError("mean gradient requires a model gradient")
    resp, pair_var, _, _ = _overlap_softmax(q)
    w = resp / pair_var
    pulled = w @ q.means + w.T @ q.means
    wsum = w.sum(axis=1) + w.sum(axis=0)
    grads = np.stack([model.gradient(mu) for mu in q.means])
    return (grads - (pulled - wsum[:, None] * q.means)) / q.num_components


def grad_l2_log_sigma(
    q: MixtureApproximation, model: LogJointModel
) -> np.ndarray:
    """Gradient of ``elbo_l2`` with respect to each log bandwidth, (N,).

    Chain-ruled through ``sigma^2 = exp(2 log sigma)``; covers both the
    curvature term and the entropy bound's dependence on every overlap.
    """
    _check_model(q, model)
    if not model.has_hessian_diag:
        raise CapabilityError(
            "bandwidth gradient requires a model Hessian diagonal"
        )
    resp, pair_var, sq, _ = _overlap_softmax(q)
    # d log-kernel / d pair-variance, weighted by the softmax weights
    kernel_sens = resp * (sq / (2.0 * pair_var ** 2) - q.dimension / (2.0 * pair_var))
    dlogq_dvar = kernel_sens.sum(axis=1) + kernel_sens.sum(axis=0)
    trace = np.array([float(np.sum(model.hessian_diag(mu))) for mu in q.means])
    dl2_dvar = (0.5 * trace - dlogq_dvar) / q.num_components
    return 2.0 * q.sigmas ** 2 * dl2_dvar


def sample_mixture(
    q: MixtureApproximation, count: int, seed: int
) -> np.ndarray:
    """Draw ``count`` i.i.d. samples, (count, D); deterministic per seed.

    Components are chosen uniformly, then spherical Gaussian noise with the
    component's bandwidth is added to its mean.
    """
    if count < 1:
        raise ConfigurationError("sample count must be at least 1")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, q.num_components, size=count)
    noise = rng.standard_normal((count, q.dimension))
    return q.means[idx] + q.sigmas[idx, None] * noise


def mixture_to_json(q: MixtureApproximation) -> str:
    """Serialize as ``{"means": [[...]], "sigmas": [...]}``.

    Floats are written with 17 significant digits, so parsing the text
    recovers the exact float64 values.
    """

    def fnum(x: float) -> str:
        return format(float(x), ".17g")

    rows = ", ".join(
        "[" + ", ".join(fnum(v) for v in row) + "]" for row in q.means
    )
    sig = ", ".join(fnum(s) for s in q.sigmas)
    return '{"means": [%s], "sigmas": [%s]}' % (rows, sig)


def mixture_from_json(text: str) -> MixtureApproximation:
    """Parse the output of ``mixture_to_json``."""
    obj = json.loads(text)
    try:
        means = np.asarray(obj["means"], dtype=float)
        sigmas = np.asarray(obj["sigmas"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"malformed mixture document: {exc}") from exc
    return MixtureApproximation(means, sigmas)
