"""Shared numeric data model: column-sample matrices and orthonormal projections.

Samples are stored column-wise: a data matrix has shape (d, n) with d
features (rows) and n samples (columns).  File and estimator boundaries
convert row-per-sample layouts into this convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

#: Entrywise tolerance for the orthonormality check W^T W = I.
ORTHONORMALITY_TOL = 1e-10

#: Row sums of a centered matrix must vanish within this tolerance,
#: scaled by n * max|entry|.
CENTERING_TOL = 1e-9


def _as_float_matrix(values, name="values"):
    # always a fresh C-ordered copy: instances freeze it afterwards and
    # must never freeze (or alias) a caller's array
    arr = np.array(values, dtype=np.float64, order="C", copy=True)
    if arr.ndim != 2:
        raise DataError(f"{name} must be a 2-D array, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DataError(f"{name} must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class DataMatrix:
    """A d x n matrix of column samples with centering metadata.

    Parameters
    ----------
    values : (d, n) ndarray
        Feature-by-sample matrix.  All entries must be finite.
    centered : bool
        Whether every row sums to zero (within tolerance).
    feature_means : (d,) ndarray or None
        Row means that were subtracted when centering was applied.
    """

    values: np.ndarray
    centered: bool = False
    feature_means: np.ndarray | None = field(default=None)

    def __post_init__(self):
        values = _as_float_matrix(self.values)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.feature_means is not None:
            means = np.asarray(self.feature_means, dtype=np.float64)
            if means.shape != (values.shape[0],):
                raise DataError(
                    f"feature_means must have shape ({values.shape[0]},), "
                    f"got {means.shape}"
                )
            means = means.copy()
            means.setflags(write=False)
            object.__setattr__(self, "feature_means", means)
        if self.centered:
            d, n = values.shape
            tol = CENTERING_TOL * n * max(np.abs(values).max(), 0.0)
            row_sums = values.sum(axis=1)
            if np.abs(row_sums).max() > tol:
                raise DataError(
                    "matrix marked centered but row sums exceed tolerance "
                    f"(max |sum| = {np.abs(row_sums).max():.3e}, tol = {tol:.3e})"
                )

    @property
    def d(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class ProjectionMatrix:
    """A d x m matrix whose columns are orthonormal projection vectors."""

    columns: np.ndarray

    def __post_init__(self):
        cols = _as_float_matrix(self.columns, name="columns")
        d, m = cols.shape
        if not 1 <= m <= d:
            raise DataError(f"need 1 <= m <= d, got m={m}, d={d}")
        gram = cols.T @ cols
        err = np.abs(gram - np.eye(m)).max()
        if err > ORTHONORMALITY_TOL:
            raise DataError(
                f"columns are not orthonormal (max |W^T W - I| = {err:.3e})"
            )
        cols.setflags(write=False)
        object.__setattr__(self, "columns", cols)

    @property
    def d(self) -> int:
        return self.columns.shape[0]

    @property
    def m(self) -> int:
        return self.columns.shape[1]


def center(data: DataMatrix) -> DataMatrix:
    """Subtract row means so every feature has zero mean over the samples.

    Idempotent: an already-centered matrix is returned unchanged.  The
    subtracted means are recorded in ``feature_means`` so held-out data
    can be shifted consistently.
    """
    if data.centered:
        return data
    means = data.values.mean(axis=1)
    return DataMatrix(
        values=data.values - means[:, None],
        centered=True,
        feature_means=means,
    )


def project(data: DataMatrix, w: ProjectionMatrix) -> np.ndarray:
    """Project the samples: returns W^T X with shape (m, n)."""
    if w.d != data.d:
        raise DataError(
            f"dimension mismatch: data has d={data.d}, projection has d={w.d}"
        )
    return w.columns.T @ data.values


def as_columns(data, require_centered=False) -> np.ndarray:
    """Return the (d, n) sample-column array behind ``data``.

    Accepts a DataMatrix or a bare ndarray.  Bare arrays are trusted to
    satisfy whatever contract the caller imposes; DataMatrix inputs are
    checked against ``require_centered``.
    """
    if isinstance(data, DataMatrix):
        if require_centered and not data.centered:
            raise DataError("data must be centered (call tl1pca.center first)")
        return data.values
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2:
        raise DataError(f"expected a 2-D sample matrix, got ndim={arr.ndim}")
    return arr
