"""Analytic target densities: Gaussians, Gaussian mixtures, skewed t mixtures.

These are the fixtures the inference engines are exercised on. Every target
supplies exact gradients and Hessian diagonals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp

from ..modelcore import ConfigurationError, LogJointModel

_LOG_2PI = float(np.log(2.0 * np.pi))


class FlatTarget(LogJointModel):
    """Improper constant density f = 0; handy for isolating entropy terms."""

    def __init__(self, dimension: int):
        self.dimension = int(dimension)

    def log_joint(self, theta):
        return 0.0

    def gradient(self, theta):
        return np.zeros(self.dimension)

    def hessian_diag(self, theta):
        return np.zeros(self.dimension)


def flat_target(dimension: int) -> FlatTarget:
    return FlatTarget(dimension)


class DiagonalGaussianTarget(LogJointModel):
    """Normalized Gaussian with diagonal covariance."""

    def __init__(self, mean, variance_diag):
        mean = np.atleast_1d(np.asarray(mean, dtype=float))
        var = np.atleast_1d(np.asarray(variance_diag, dtype=float))
        if mean.shape != var.shape:
            raise ConfigurationError("mean and variance_diag must match in shape")
        if np.any(var <= 0.0):
            raise ConfigurationError("variances must be strictly positive")
        self.mean = mean
        self.variance = var
        self.dimension = mean.size
        self._log_norm = -0.5 * float(np.sum(_LOG_2PI + np.log(var)))

    def log_joint(self, theta):
        z = np.asarray(theta, dtype=float) - self.mean
        return self._log_norm - 0.5 * float(np.sum(z ** 2 / self.variance))

    def gradient(self, theta):
        z = np.asarray(theta, dtype=float) - self.mean
        return -z / self.variance

    def hessian_diag(self, theta):
        return -1.0 / self.variance


def gaussian_target(mean, variance_diag) -> DiagonalGaussianTarget:
    """Normalized diagonal-covariance Gaussian target."""
    return DiagonalGaussianTarget(mean, variance_diag)


def standard_normal_target(dimension: int) -> DiagonalGaussianTarget:
    return DiagonalGaussianTarget(np.zeros(dimension), np.ones(dimension))


def _combine_log_mixture(logp, grads, hess_diags):
    """Value/gradient/Hessian-diagonal of log sum_i exp(logp_i).

    ``grads`` and ``hess_diags`` are the component log-density derivatives;
    the mixture derivatives follow from the responsibility weights.
    """
    lse = logsumexp(logp)
    r = np.exp(logp - lse)
    g = r @ grads
    h = r @ (hess_diags + grads ** 2) - g ** 2
    return float(lse), g, h


class GaussianMixtureTarget(LogJointModel):
    """Normalized mixture of diagonal Gaussians with arbitrary weights."""

    def __init__(self, means, sds, weights=None):
        means = np.atleast_2d(np.asarray(means, dtype=float))
        sds = np.asarray(sds, dtype=float)
        if sds.ndim == 1:
            sds = np.repeat(sds[:, None], means.shape[1], axis=1)
        if sds.shape != means.shape:
            raise ConfigurationError("sds must broadcast to the means' shape")
        if np.any(sds <= 0.0):
            raise ConfigurationError("component sds must be positive")
        k = means.shape[0]
        if weights is None:
            weights = np.full(k, 1.0 / k)
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (k,) or np.any(weights <= 0.0):
            raise ConfigurationError("weights must be positive, one per component")
        if abs(float(weights.sum()) - 1.0) > 1e-9:
            raise ConfigurationError("weights must sum to 1")
        self.means = means
        self.sds = sds
        self.weights = weights
        self.dimension = means.shape[1]
        self._log_w = np.log(weights)
        self._log_norms = -0.5 * np.sum(_LOG_2PI + 2.0 * np.log(sds), axis=1)

    def _parts(self, theta):
        z = (np.asarray(theta, dtype=float) - self.means) / self.sds
        logp = self._log_w + self._log_norms - 0.5 * np.sum(z ** 2, axis=1)
        grads = -z / self.sds
        hess = np.broadcast_to(-1.0 / self.sds ** 2, grads.shape)
        return logp, grads, hess

    def log_joint(self, theta):
        logp, _, _ = self._parts(theta)
        return float(logsumexp(logp))

    def gradient(self, theta):
        return _combine_log_mixture(*self._parts(theta))[1]

    def hessian_diag(self, theta):
        return _combine_log_mixture(*self._parts(theta))[2]


def gaussian_mixture_target(means, sds, weights=None) -> GaussianMixtureTarget:
    """Normalized Gaussian-mixture target (diagonal components)."""
    return GaussianMixtureTarget(means, sds, weights)


@dataclass(frozen=True)
class TMixtureComponent:
    """One skewed bivariate heavy-tailed lobe.

    ``scale`` is a positive-definite 2x2 matrix, ``dof`` the tail weight,
    ``skew`` per-axis positive factors: on the positive side of each axis
    the component is stretched by that factor (two-piece construction).
    """

    location: tuple
    scale: tuple
    dof: float
    skew: tuple = (1.0, 1.0)


@dataclass(frozen=True)
class TMixtureSpec:
    """Weighted collection of :class:`TMixtureComponent` lobes."""

    components: tuple
    weights: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if len(self.components) != w.size:
            raise ConfigurationError("one weight per component required")
        if np.any(w <= 0.0) or abs(float(w.sum()) - 1.0) > 1e-9:
            raise ConfigurationError("weights must be positive and sum to 1")
        for comp in self.components:
            if comp.dof <= 0.0:
                raise ConfigurationError("degrees of freedom must be positive")


class _SkewTComponent:
    """Two-piece skewed bivariate t density with exact derivatives.

    Each axis is stretched by its skew factor on the positive side of the
    component's center. The normalizer accounts for the resulting orthant
    masses via the arcsine rule for elliptical orthant probabilities.
    """

    def __init__(self, comp: TMixtureComponent):
        loc = np.asarray(comp.location, dtype=float)
        scale = np.asarray(comp.scale, dtype=float)
        skew = np.asarray(comp.skew, dtype=float)
        if loc.shape != (2,) or scale.shape != (2, 2) or skew.shape != (2,):
            raise ConfigurationError("components are bivariate: 2-vectors and 2x2 scale")
        if np.any(skew <= 0.0):
            raise ConfigurationError("skew factors must be positive")
        sign, logdet = np.linalg.slogdet(scale)
        if sign <= 0:
            raise ConfigurationError("scale matrix must be positive definite")
        self.loc = loc
        self.skew = skew
        self.dof = float(comp.dof)
        self.sinv = np.linalg.inv(scale)
        rho = scale[0, 1] / np.sqrt(scale[0, 0] * scale[1, 1])
        p_same = 0.25 + np.arcsin(rho) / (2.0 * np.pi)   # both-positive orthant
        p_diff = 0.25 - np.arcsin(rho) / (2.0 * np.pi)
        mass = (
            p_same * (1.0 + skew[0] * skew[1])
            + p_diff * (skew[0] + skew[1])
        )
        nu = self.dof
        self._log_norm = (
            gammaln((nu + 2.0) / 2.0)
            - gammaln(nu / 2.0)
            - np.log(nu)
            - np.log(np.pi)
            - 0.5 * logdet
            - np.log(mass)
        )

    def _stretch(self, theta):
        z = np.asarray(theta, dtype=float) - self.loc
        fac = np.where(z >= 0.0, self.skew, 1.0)
        return z / fac, fac

    def log_density(self, theta) -> float:
        zt, _ = self._stretch(theta)
        quad = float(zt @ self.sinv @ zt)
        return float(self._log_norm - 0.5 * (self.dof + 2.0) * np.log1p(quad / self.dof))

    def gradient(self, theta) -> np.ndarray:
        zt, fac = self._stretch(theta)
        sz = self.sinv @ zt
        u = 1.0 + float(zt @ sz) / self.dof
        return -((self.dof + 2.0) / self.dof) * sz / u / fac

    def hessian_diag(self, theta) -> np.ndarray:
        zt, fac = self._stretch(theta)
        sz = self.sinv @ zt
        u = 1.0 + float(zt @ sz) / self.dof
        h = (
            -((self.dof + 2.0) / self.dof)
            * (np.diag(self.sinv) * u - (2.0 / self.dof) * sz ** 2)
            / u ** 2
        )
        return h / fac ** 2


class SkewTMixtureTarget(LogJointModel):
    """Mixture of two-piece skewed bivariate t lobes; a multimodal test bed.

    The density is continuous everywhere and smooth except on the axis
    hyperplanes through each center (the two-piece junctions), which have
    zero measure.
    """

    dimension = 2

    def __init__(self, spec: TMixtureSpec):
        self.spec = spec
        self._comps = [_SkewTComponent(c) for c in spec.components]
        self._log_w = np.log(np.asarray(spec.weights, dtype=float))

    def _parts(self, theta):
        logp = np.array(
            [lw + c.log_density(theta) for lw, c in zip(self._log_w, self._comps)]
        )
        grads = np.stack([c.gradient(theta) for c in self._comps])
        hess = np.stack([c.hessian_diag(theta) for c in self._comps])
        return logp, grads, hess

    def log_joint(self, theta):
        logp = np.array(
            [lw + c.log_density(theta) for lw, c in zip(self._log_w, self._comps)]
        )
        return float(logsumexp(logp))

    def gradient(self, theta):
        return _combine_log_mixture(*self._parts(theta))[1]

    def hessian_diag(self, theta):
        return _combine_log_mixture(*self._parts(theta))[2]


def t_mixture_target(spec: TMixtureSpec) -> SkewTMixtureTarget:
    """Mixture of skewed bivariate t lobes as a normalized 2-D target."""
    return SkewTMixtureTarget(spec)


def canonical_t_mixture_spec() -> TMixtureSpec:
    """The repo's standard bimodal 2-D fixture.

    Two heavy-tailed lobes at (-2, -1) and (2, 1) with opposite correlation,
    both stretched by a factor 2 on the positive side of the first axis.
    """
    comps = (
        TMixtureComponent(
            location=(-2.0, -1.0),
            scale=((1.0, 0.6), (0.6, 1.0)),
            dof=5.0,
            skew=(2.0, 1.0),
        ),
        TMixtureComponent(
            location=(2.0, 1.0),
            scale=((1.0, -0.4), (-0.4, 1.0)),
            dof=5.0,
            skew=(2.0, 1.0),
        ),
    )
    return TMixtureSpec(components=comps, weights=(0.5, 0.5))
