"""Shipped probabilistic models, test-bed targets and data generators."""

from .data import DatasetTable, read_dataset_csv, write_dataset_csv
from .logistic import (
    LogisticModelSpec,
    logistic_log_joint,
    logistic_predict,
    logistic_test_log_likelihood,
    synth_logistic,
)
from .targets import (
    DiagonalGaussianTarget,
    FlatTarget,
    GaussianMixtureTarget,
    SkewTMixtureTarget,
    TMixtureComponent,
    TMixtureSpec,
    canonical_t_mixture_spec,
    flat_target,
    gaussian_mixture_target,
    gaussian_target,
    standard_normal_target,
    t_mixture_target,
)
from .tlsa import (
    TlsaModelSpec,
    TlsaParams,
    default_voxel_grid,
    sample_tlsa_params,
    synth_tlsa,
    tlsa_basis,
    tlsa_log_joint,
    tlsa_predict_mean,
    tlsa_reconstruct,
    tlsa_transform_spec,
)

__all__ = [
    "DatasetTable",
    "DiagonalGaussianTarget",
    "FlatTarget",
    "GaussianMixtureTarget",
    "LogisticModelSpec",
    "SkewTMixtureTarget",
    "TMixtureComponent",
    "TMixtureSpec",
    "TlsaModelSpec",
    "TlsaParams",
    "canonical_t_mixture_spec",
    "default_voxel_grid",
    "flat_target",
    "gaussian_mixture_target",
    "gaussian_target",
    "logistic_log_joint",
    "logistic_predict",
    "logistic_test_log_likelihood",
    "read_dataset_csv",
    "sample_tlsa_params",
    "standard_normal_target",
    "synth_logistic",
    "synth_tlsa",
    "t_mixture_target",
    "tlsa_basis",
    "tlsa_log_joint",
    "tlsa_predict_mean",
    "tlsa_reconstruct",
    "tlsa_transform_spec",
    "write_dataset_csv",
]
