"""Dense pairwise Euclidean-distance and Gaussian-kernel matrices.

Everything downstream (test statistics, permutation back-ends, cross tests)
consumes the two matrix types defined here.  Distances are computed with the
direct per-pair algorithm (scipy's ``cdist``), which keeps identical sample
pairs at exactly zero and makes entries independent of where in a matrix they
are computed -- a property the permutation back-ends rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .errors import DataValidationError, DimensionMismatchError


class MatrixKind(Enum):
    """What the entries of a :class:`PairwiseMatrix` mean."""

    EUCLIDEAN_DISTANCE = "euclidean_distance"
    GAUSSIAN_KERNEL = "gaussian_kernel"


@dataclass(frozen=True)
class DataMatrix:
    """A dense n-samples-by-p-variables matrix of finite reals.

    Parameters
    ----------
    values : array_like, shape (rows, cols)
        Sample rows; coerced to a C-contiguous float64 array.
    column_names : tuple of str, optional
        Variable names, recorded when loading a CSV with a header row.
    """

    values: np.ndarray
    column_names: tuple[str, ...] | None = None

    def __post_init__(self):
        arr = np.ascontiguousarray(self.values, dtype=np.float64)
        if arr.ndim != 2:
            raise DataValidationError(
                f"data matrix must be 2-dimensional, got ndim={arr.ndim}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DataValidationError(
                f"data matrix must have at least one row and one column, "
                f"got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise DataValidationError("data matrix contains non-finite values")
        object.__setattr__(self, "values", arr)
        if self.column_names is not None:
            names = tuple(str(c) for c in self.column_names)
            if len(names) != arr.shape[1]:
                raise DataValidationError(
                    f"{len(names)} column names for {arr.shape[1]} columns")
            object.__setattr__(self, "column_names", names)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class PairwiseMatrix:
    """An n1 x n2 matrix of distances or kernel values between two sample sets."""

    values: np.ndarray
    kind: MatrixKind

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 2:
            raise DataValidationError(
                f"pairwise matrix must be 2-dimensional, got ndim={arr.ndim}")
        object.__setattr__(self, "values", arr)
        if not isinstance(self.kind, MatrixKind):
            raise DataValidationError(f"unknown matrix kind: {self.kind!r}")

    @property
    def n1(self) -> int:
        return self.values.shape[0]

    @property
    def n2(self) -> int:
        return self.values.shape[1]


def as_data_matrix(x) -> DataMatrix:
    """Coerce an array-like or DataMatrix to a validated DataMatrix."""
    if isinstance(x, DataMatrix):
        return x
    return DataMatrix(np.asarray(x, dtype=np.float64))


def _paired_values(x, y) -> tuple[np.ndarray, np.ndarray]:
    xa, ya = as_data_matrix(x), as_data_matrix(y)
    if xa.cols != ya.cols:
        raise DimensionMismatchError(
            f"inputs must have the same number of columns, "
            f"got {xa.cols} and {ya.cols}")
    return xa.values, ya.values


def euclidean_distance_matrix(x, y) -> PairwiseMatrix:
    """All pairwise Euclidean distances between the rows of x and the rows of y.

    Entry (i, j) is ``sqrt(sum_k (x[i,k] - y[j,k])**2)``, evaluated with the
    direct per-pair sum so that identical rows give exactly 0.0 and the
    (x, x) case is exactly symmetric.

    Parameters
    ----------
    x, y : DataMatrix or array_like, shapes (n1, p) and (n2, p)

    Returns
    -------
    PairwiseMatrix of kind EUCLIDEAN_DISTANCE, shape (n1, n2).
    """
    xa, ya = _paired_values(x, y)
    return PairwiseMatrix(cdist(xa, ya), MatrixKind.EUCLIDEAN_DISTANCE)


def gaussian_kernel_matrix(x, y, bandwidth: float) -> PairwiseMatrix:
    """Gaussian (squared-exponential) kernel values between rows of x and y.

    Entry (i, j) is ``exp(-||x_i - y_j||**2 / (2 * bandwidth**2))``.

    Parameters
    ----------
    x, y : DataMatrix or array_like with matching column counts
    bandwidth : float
        Kernel length scale; must be positive and finite.
    """
    bandwidth = float(bandwidth)
    if not math.isfinite(bandwidth) or bandwidth <= 0.0:
        raise DataValidationError(
            f"bandwidth must be a positive finite real, got {bandwidth}")
    xa, ya = _paired_values(x, y)
    sq = cdist(xa, ya, "sqeuclidean")
    return PairwiseMatrix(np.exp(-sq / (2.0 * bandwidth * bandwidth)),
                          MatrixKind.GAUSSIAN_KERNEL)


def median_heuristic_bandwidth(x, y) -> float:
    """Median pairwise distance over the pooled sample (self-pairs excluded).

    Falls back to 1.0 when the median is zero (all points identical).
    """
    xa, ya = _paired_values(x, y)
    pooled = np.vstack([xa, ya])
    if pooled.shape[0] < 2:
        raise DataValidationError(
            "median heuristic needs at least 2 samples in total")
    med = float(np.median(pdist(pooled)))
    return med if med > 0.0 else 1.0


# Below this many entries the mean is accumulated with exact compensated
# summation, which makes statistics identical across permutation back-ends
# irrespective of entry order; larger blocks use numpy's pairwise reduction.
_EXACT_SUM_CUTOFF = 2048


def block_mean(m) -> float:
    """Arithmetic mean of all entries of a pairwise matrix (or 2-d array)."""
    values = m.values if isinstance(m, PairwiseMatrix) else np.asarray(m, dtype=np.float64)
    if values.size == 0:
        raise DataValidationError("cannot take the mean of an empty matrix")
    if values.size <= _EXACT_SUM_CUTOFF:
        return math.fsum(values.ravel().tolist()) / values.size
    return float(values.mean())
