"""Log-joint model contract and the unconstrained reparameterization layer."""

from __future__ import annotations

import numpy as np
from scipy.special import expit, log_expit


class ConfigurationError(ValueError):
    """Invalid configuration: mismatched dimensions or bad option values."""


class CapabilityError(RuntimeError):
    """A model lacks a requested capability (gradient or Hessian diagonal)."""


class NumericalError(RuntimeError):
    """A numerical procedure failed (non-finite values, failed checks)."""


# e^u overflows float64 near u = 709.78; transform inputs are clamped below that.
EXP_CLAMP = 700.0

IDENTITY = "identity"
LOG = "log"
LOGIT = "logit"
_VALID_TAGS = (IDENTITY, LOG, LOGIT)


class LogJointModel:
    """Contract for an unnormalized log joint density on R^D.

    Subclasses set ``dimension`` and implement ``log_joint``; ``gradient``
    and ``hessian_diag`` are optional capabilities discovered through
    ``has_gradient`` / ``has_hessian_diag``. Evaluation must be deterministic
    for fixed inputs and reentrant (no interior mutation). ``log_joint`` may
    return ``-inf`` outside the support but must never return NaN on it.
    """

    dimension: int = 0

    def log_joint(self, theta: np.ndarray) -> float:
        raise NotImplementedError

    def gradient(self, theta: np.ndarray) -> np.ndarray:
        raise CapabilityError(
            f"{type(self).__name__} does not provide a gradient"
        )

    def hessian_diag(self, theta: np.ndarray) -> np.ndarray:
        raise CapabilityError(
            f"{type(self).__name__} does not provide a Hessian diagonal"
        )

    @property
    def has_gradient(self) -> bool:
        return type(self).gradient is not LogJointModel.gradient

    @property
    def has_hessian_diag(self) -> bool:
        return type(self).hessian_diag is not LogJointModel.hessian_diag


class TransformSpec:
    """Coordinate-wise map from unconstrained inputs to a model's native space.

    Tags: ``"identity"`` (u -> u), ``"log"`` (u -> e^u > 0) and ``"logit"``
    (u -> sigmoid(u) in (0, 1)). Inputs with magnitude above 700 are clamped
    before exponentiation so the map never overflows float64; beyond the
    clamp the transform is constant.
    """

    def __init__(self, tags):
        tags = tuple(tags)
        for tag in tags:
            if tag not in _VALID_TAGS:
                raise ConfigurationError(f"unknown transform tag {tag!r}")
        self.tags = tags
        codes = np.array(tags)
        self._log = codes == LOG
        self._logit = codes == LOGIT

    @classmethod
    def identity(cls, dim: int) -> "TransformSpec":
        return cls((IDENTITY,) * dim)

    def __len__(self) -> int:
        return len(self.tags)

    def __eq__(self, other) -> bool:
        return isinstance(other, TransformSpec) and self.tags == other.tags

    def __repr__(self) -> str:
        return f"TransformSpec({list(self.tags)!r})"


def _clamped(u: np.ndarray) -> np.ndarray:
    return np.clip(u, -EXP_CLAMP, EXP_CLAMP)


def apply_transform(spec: TransformSpec, u: np.ndarray) -> np.ndarray:
    """Map an unconstrained vector into the model's native space.

    Identity coordinates pass through, log coordinates return strictly
    positive values, logit coordinates return values strictly inside (0, 1).
    """
    u = np.asarray(u, dtype=float)
    x = u.copy()
    if spec._log.any():
        x[spec._log] = np.exp(_clamped(u[spec._log]))
    if spec._logit.any():
        s = expit(_clamped(u[spec._logit]))
        # expit saturates to exact 0.0/1.0 around |u|=37; keep the image open.
        x[spec._logit] = np.clip(s, 1e-300, 1.0 - 1e-16)
    return x


def invert_transform(spec: TransformSpec, x: np.ndarray) -> np.ndarray:
    """Inverse of ``apply_transform`` on the interior of the transform image."""
    x = np.asarray(x, dtype=float)
    u = x.copy()
    if spec._log.any():
        u[spec._log] = np.log(x[spec._log])
    if spec._logit.any():
        p = x[spec._logit]
        u[spec._logit] = np.log(p) - np.log1p(-p)
    return u


def log_jacobian(spec: TransformSpec, u: np.ndarray) -> float:
    """Log absolute determinant of the transform's Jacobian at ``u``.

    Per coordinate: 0 for identity, u for log, and
    ``log s(u) + log(1 - s(u))`` for logit with ``s`` the sigmoid.
    """
    u = np.asarray(u, dtype=float)
    total = 0.0
    if spec._log.any():
        total += float(np.sum(_clamped(u[spec._log])))
    if spec._logit.any():
        v = _clamped(u[spec._logit])
        total += float(np.sum(log_expit(v) + log_expit(-v)))
    return total


def _chain_terms(spec: TransformSpec, u: np.ndarray):
    """First/second transform derivatives and log-Jacobian derivatives.

    Returns ``(t1, t2, j1, j2)`` arrays: T'(u), T''(u), (log|J|)'(u) and
    (log|J|)''(u) per coordinate, evaluated on the clamped input.
    """
    u = _clamped(np.asarray(u, dtype=float))
    t1 = np.ones_like(u)
    t2 = np.zeros_like(u)
    j1 = np.zeros_like(u)
    j2 = np.zeros_like(u)
    if spec._log.any():
        e = np.exp(u[spec._log])
        t1[spec._log] = e
        t2[spec._log] = e
        j1[spec._log] = 1.0
    if spec._logit.any():
        v = u[spec._logit]
        s = expit(v)
        sp = np.exp(log_expit(v) + log_expit(-v))  # s(1-s), underflow-safe
        t1[spec._logit] = sp
        t2[spec._logit] = sp * (1.0 - 2.0 * s)
        j1[spec._logit] = 1.0 - 2.0 * s
        j2[spec._logit] = -2.0 * sp
    return t1, t2, j1, j2


class TransformedModel(LogJointModel):
    """A constrained-space model reparameterized over unconstrained inputs.

    The wrapped density is ``inner(T(u)) + log|J_T(u)|``; gradient and
    Hessian diagonal follow by the coordinate-wise chain rule, including the
    curvature of the Jacobian term.
    """

    def __init__(self, inner: LogJointModel, spec: TransformSpec):
        if len(spec) != inner.dimension:
            raise ConfigurationError(
                f"transform length {len(spec)} does not match model "
                f"dimension {inner.dimension}"
            )
        self.inner = inner
        self.spec = spec
        self.dimension = inner.dimension

    def log_joint(self, u: np.ndarray) -> float:
        x = apply_transform(self.spec, u)
        return float(self.inner.log_joint(x)) + log_jacobian(self.spec, u)

    def gradient(self, u: np.ndarray) -> np.ndarray:
        x = apply_transform(self.spec, u)
        t1, _, j1, _ = _chain_terms(self.spec, u)
        return self.inner.gradient(x) * t1 + j1

    def hessian_diag(self, u: np.ndarray) -> np.ndarray:
        x = apply_transform(self.spec, u)
        t1, t2, _, j2 = _chain_terms(self.spec, u)
        gi = self.inner.gradient(x)
        hi = self.inner.hessian_diag(x)
        return hi * t1 ** 2 + gi * t2 + j2

    @property
    def has_gradient(self) -> bool:
        return self.inner.has_gradient

    @property
    def has_hessian_diag(self) -> bool:
        return self.inner.has_gradient and self.inner.has_hessian_diag


def wrap_transformed(inner: LogJointModel, spec: TransformSpec) -> TransformedModel:
    """Expose a constrained-space model as a model on unconstrained inputs."""
    return TransformedModel(inner, spec)
