"""Labeled tabular data and its CSV round trip."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from ..modelcore import ConfigurationError


@dataclass
class DatasetTable:
    """Covariates plus targets for the example models.

    ``targets`` is a length-T vector of class labels in {-1, +1} for
    classification, or a (T, V) activation matrix for spatial data.
    """

    covariates: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.covariates, dtype=float))
        y = np.asarray(self.targets, dtype=float)
        if x.shape[0] < 1:
            raise ConfigurationError("dataset needs at least one row")
        if y.shape[0] != x.shape[0]:
            raise ConfigurationError("covariates and targets disagree on row count")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ConfigurationError("dataset entries must be finite")
        if y.ndim == 1 and not np.all(np.isin(y, (-1.0, 1.0))):
            raise ConfigurationError("classification labels must be -1 or +1")
        self.covariates = x
        self.targets = y

    @property
    def num_rows(self) -> int:
        return self.covariates.shape[0]

    @property
    def is_classification(self) -> bool:
        return self.targets.ndim == 1


def _fnum(x: float) -> str:
    return format(float(x), ".17g")


def write_dataset_csv(table: DatasetTable, path) -> None:
    """Write ``x1..xK`` columns plus ``label`` or ``v1..vV`` columns."""
    k = table.covariates.shape[1]
    header = [f"x{i + 1}" for i in range(k)]
    if table.is_classification:
        header.append("label")
        rows = np.column_stack([table.covariates, table.targets])
    else:
        header.extend(f"v{i + 1}" for i in range(table.targets.shape[1]))
        rows = np.column_stack([table.covariates, table.targets])
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fnum(v) for v in row])


def read_dataset_csv(path) -> DatasetTable:
    """Inverse of :func:`write_dataset_csv`; infers the target kind from the header."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        body = np.array([[float(v) for v in row] for row in reader])
    if not header or body.size == 0:
        raise ConfigurationError(f"empty dataset file: {path}")
    num_x = sum(1 for name in header if name.startswith("x"))
    if num_x == 0 or num_x >= len(header):
        raise ConfigurationError(f"malformed dataset header in {path}")
    covariates = body[:, :num_x]
    if header[num_x] == "label":
        return DatasetTable(covariates, body[:, num_x])
    return DatasetTable(covariates, body[:, num_x:])
