"""Topographic latent source analysis: spatial basis factorization of grid data.

Activations of V spatial locations over T trials are modeled as a
covariate-weighted sum of K radial-basis source images plus Gaussian noise.
Hidden variables are the covariate-to-source weights, the source centers in
the unit hypercube, and the source widths. Centers get flat Beta(1, 1)
priors, widths exponential priors, weights Gaussian priors. The public model
is unconstrained: centers go through a logit reparameterization, widths
through a log, both with Jacobian corrections.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..modelcore import (
    ConfigurationError,
    IDENTITY,
    LOG,
    LOGIT,
    LogJointModel,
    TransformSpec,
    TransformedModel,
    apply_transform,
    wrap_transformed,
)

_LOG_2PI = float(np.log(2.0 * np.pi))


def default_voxel_grid(nx: int = 10, ny: int = 10) -> np.ndarray:
    """Regular (nx * ny, 2) grid of locations covering the unit square."""
    xs = np.linspace(0.0, 1.0, nx)
    ys = np.linspace(0.0, 1.0, ny)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel()])


@dataclass
class TlsaModelSpec:
    """Observed data, source count and hyperparameters.

    ``activations`` may be None while generating synthetic data; the log
    joint requires it.
    """

    voxel_locations: np.ndarray      # (V, M), inside the unit hypercube
    covariates: np.ndarray           # (T, C)
    num_sources: int
    activations: np.ndarray | None = None  # (T, V)
    tau: float = 1.0
    sigma_w2: float = 5.0
    rho: float = 1.0

    def __post_init__(self):
        locs = np.atleast_2d(np.asarray(self.voxel_locations, dtype=float))
        x = np.atleast_2d(np.asarray(self.covariates, dtype=float))
        if np.any(locs < 0.0) or np.any(locs > 1.0):
            raise ConfigurationError("voxel locations must lie in [0, 1]^M")
        if self.num_sources < 1:
            raise ConfigurationError("need at least one source")
        if self.tau <= 0.0 or self.sigma_w2 <= 0.0 or self.rho <= 0.0:
            raise ConfigurationError("tau, sigma_w2 and rho must be positive")
        self.voxel_locations = locs
        self.covariates = x
        if self.activations is not None:
            u = np.atleast_2d(np.asarray(self.activations, dtype=float))
            if u.shape != (x.shape[0], locs.shape[0]):
                raise ConfigurationError(
                    "activations must be (num trials, num voxels)"
                )
            self.activations = u

    @property
    def num_voxels(self) -> int:
        return self.voxel_locations.shape[0]

    @property
    def spatial_dim(self) -> int:
        return self.voxel_locations.shape[1]

    @property
    def num_covariates(self) -> int:
        return self.covariates.shape[1]

    @property
    def dimension(self) -> int:
        c, k, m = self.num_covariates, self.num_sources, self.spatial_dim
        return c * k + k * m + k

    def with_activations(self, activations) -> "TlsaModelSpec":
        return replace(self, activations=activations)


@dataclass
class TlsaParams:
    """Constrained-space parameters: weights (C, K), centers (K, M), widths (K,)."""

    weights: np.ndarray
    centers: np.ndarray
    widths: np.ndarray

    def flatten(self) -> np.ndarray:
        return np.concatenate(
            [
                np.asarray(self.weights, dtype=float).ravel(),
                np.asarray(self.centers, dtype=float).ravel(),
                np.asarray(self.widths, dtype=float).ravel(),
            ]
        )

    @classmethod
    def unflatten(cls, theta, num_covariates: int, num_sources: int, spatial_dim: int):
        theta = np.asarray(theta, dtype=float)
        c, k, m = num_covariates, num_sources, spatial_dim
        if theta.size != c * k + k * m + k:
            raise ConfigurationError("parameter vector has the wrong length")
        weights = theta[: c * k].reshape(c, k)
        centers = theta[c * k : c * k + k * m].reshape(k, m)
        widths = theta[c * k + k * m :]
        return cls(weights, centers, widths)


def tlsa_basis(center, width: float, voxel_locations) -> np.ndarray:
    """Radial basis image of one source: exp(-||r_v - center||^2 / width)."""
    if width <= 0.0:
        raise ConfigurationError("source width must be positive")
    locs = np.atleast_2d(np.asarray(voxel_locations, dtype=float))
    d2 = np.sum((locs - np.asarray(center, dtype=float)) ** 2, axis=1)
    return np.exp(-d2 / width)


def tlsa_predict_mean(params: TlsaParams, covariates, voxel_locations) -> np.ndarray:
    """Noiseless activations (T, V) for given constrained parameters."""
    locs = np.atleast_2d(np.asarray(voxel_locations, dtype=float))
    x = np.atleast_2d(np.asarray(covariates, dtype=float))
    diff = params.centers[:, None, :] - locs[None, :, :]
    d2 = np.einsum("kvm,kvm->kv", diff, diff)
    basis = np.exp(-d2 / np.asarray(params.widths, dtype=float)[:, None])
    return (x @ params.weights) @ basis


class _TlsaConstrained(LogJointModel):
    """Log joint on the constrained space (weights, centers, widths)."""

    def __init__(self, spec: TlsaModelSpec):
        if spec.activations is None:
            raise ConfigurationError("spec must carry activations to evaluate")
        self.spec = spec
        self.dimension = spec.dimension

    def _unpack(self, theta) -> TlsaParams:
        s = self.spec
        return TlsaParams.unflatten(
            theta, s.num_covariates, s.num_sources, s.spatial_dim
        )

    def _geometry(self, params: TlsaParams):
        locs = self.spec.voxel_locations
        diff = locs[None, :, :] - params.centers[:, None, :]  # (K, V, M)
        d2 = np.einsum("kvm,kvm->kv", diff, diff)
        basis = np.exp(-d2 / params.widths[:, None])
        return diff, d2, basis

    def log_joint(self, theta):
        s = self.spec
        p = self._unpack(theta)
        if np.any(p.widths <= 0.0):
            return float("-inf")
        if np.any(p.centers <= 0.0) or np.any(p.centers >= 1.0):
            return float("-inf")
        _, _, basis = self._geometry(p)
        resid = s.activations - (s.covariates @ p.weights) @ basis
        t, v = s.activations.shape
        loglik = 0.5 * t * v * (np.log(s.tau) - _LOG_2PI) - 0.5 * s.tau * float(
            np.sum(resid ** 2)
        )
        c, k = s.num_covariates, s.num_sources
        prior_w = -0.5 * c * k * np.log(2.0 * np.pi * s.sigma_w2) - float(
            np.sum(p.weights ** 2)
        ) / (2.0 * s.sigma_w2)
        prior_width = k * np.log(s.rho) - s.rho * float(np.sum(p.widths))
        return float(loglik + prior_w + prior_width)  # Beta(1,1) adds 0 inside (0,1)

    def _residual_terms(self, params: TlsaParams):
        s = self.spec
        diff, d2, basis = self._geometry(params)
        coeff = s.covariates @ params.weights          # (T, K)
        resid = s.activations - coeff @ basis          # (T, V)
        back = s.tau * (coeff.T @ resid)               # (K, V)
        return diff, d2, basis, coeff, resid, back

    def gradient(self, theta):
        s = self.spec
        p = self._unpack(theta)
        diff, d2, basis, coeff, resid, back = self._residual_terms(p)
        gw = s.tau * (s.covariates.T @ resid @ basis.T) - p.weights / s.sigma_w2
        slope = 2.0 * diff / p.widths[:, None, None]          # d basis / d center
        dg_center = basis[:, :, None] * slope                 # (K, V, M)
        gc = np.einsum("kv,kvm->km", back, dg_center)
        dg_width = basis * d2 / p.widths[:, None] ** 2        # d basis / d width
        gl = np.sum(back * dg_width, axis=1) - s.rho
        return np.concatenate([gw.ravel(), gc.ravel(), gl])

    def hessian_diag(self, theta):
        s = self.spec
        p = self._unpack(theta)
        diff, d2, basis, coeff, resid, back = self._residual_terms(p)
        x2 = np.sum(s.covariates ** 2, axis=0)                # (C,)
        a2 = np.sum(coeff ** 2, axis=0)                       # (K,)
        g2 = np.sum(basis ** 2, axis=1)                       # (K,)
        hw = -s.tau * np.outer(x2, g2) - 1.0 / s.sigma_w2

        slope = 2.0 * diff / p.widths[:, None, None]
        dg_center = basis[:, :, None] * slope
        curv_center = basis[:, :, None] * (
            slope ** 2 - 2.0 / p.widths[:, None, None]
        )
        hc = -s.tau * a2[:, None] * np.einsum(
            "kvm,kvm->km", dg_center, dg_center
        ) + np.einsum("kv,kvm->km", back, curv_center)

        dg_width = basis * d2 / p.widths[:, None] ** 2
        curv_width = basis * (
            d2 ** 2 / p.widths[:, None] ** 4 - 2.0 * d2 / p.widths[:, None] ** 3
        )
        hl = -s.tau * a2 * np.sum(dg_width ** 2, axis=1) + np.sum(
            back * curv_width, axis=1
        )
        return np.concatenate([hw.ravel(), hc.ravel(), hl])


def tlsa_transform_spec(spec: TlsaModelSpec) -> TransformSpec:
    """Identity on weights, logit on centers, log on widths."""
    c, k, m = spec.num_covariates, spec.num_sources, spec.spatial_dim
    return TransformSpec((IDENTITY,) * (c * k) + (LOGIT,) * (k * m) + (LOG,) * k)


def tlsa_log_joint(spec: TlsaModelSpec) -> TransformedModel:
    """Unconstrained log joint: centers via logit, widths via log."""
    return wrap_transformed(_TlsaConstrained(spec), tlsa_transform_spec(spec))


def tlsa_reconstruct(samples, spec: TlsaModelSpec, covariates_test) -> np.ndarray:
    """Monte Carlo reconstruction of test activations, (T_test, V).

    ``samples`` are unconstrained parameter vectors; each is mapped back to
    the constrained space and pushed through the noiseless forward model,
    then the results are averaged.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.shape[0] == 0:
        raise ValueError("sample list must be nonempty")
    tags = tlsa_transform_spec(spec)
    x_test = np.atleast_2d(np.asarray(covariates_test, dtype=float))
    total = np.zeros((x_test.shape[0], spec.num_voxels))
    for row in samples:
        params = TlsaParams.unflatten(
            apply_transform(tags, row),
            spec.num_covariates,
            spec.num_sources,
            spec.spatial_dim,
        )
        total += tlsa_predict_mean(params, x_test, spec.voxel_locations)
    return total / samples.shape[0]


def sample_tlsa_params(seed: int, spec: TlsaModelSpec) -> TlsaParams:
    """Draw constrained parameters from the model priors; deterministic per seed."""
    rng = np.random.default_rng(seed)
    c, k, m = spec.num_covariates, spec.num_sources, spec.spatial_dim
    weights = rng.normal(0.0, np.sqrt(spec.sigma_w2), (c, k))
    centers = rng.uniform(0.0, 1.0, (k, m))
    widths = rng.exponential(1.0 / spec.rho, k)
    return TlsaParams(weights, centers, widths)


def synth_tlsa(seed: int, spec: TlsaModelSpec, params_true: TlsaParams | None = None) -> np.ndarray:
    """Forward-sample activations (T, V) at noise precision ``spec.tau``.

    When ``params_true`` is omitted the parameters are drawn from the priors
    with the same seed. Deterministic per seed.
    """
    rng = np.random.default_rng(seed)
    if params_true is None:
        params_true = sample_tlsa_params(seed, spec)
    mean = tlsa_predict_mean(params_true, spec.covariates, spec.voxel_locations)
    noise = rng.standard_normal(mean.shape) / np.sqrt(spec.tau)
    return mean + noise
