"""Two-sample test statistics evaluated from pre-computed pairwise matrices.

Every permutation back-end funnels through these functions, so a statistic
computed from re-indexed matrices is directly comparable with one computed
from freshly built matrices.
"""

from __future__ import annotations

from enum import Enum

from .errors import DataValidationError, DimensionMismatchError
from .matrices import MatrixKind, PairwiseMatrix, block_mean


class StatisticKind(Enum):
    """Which two-sample statistic a test evaluates."""

    ENERGY_DISTANCE = "ed"
    MMD_BIASED_SQUARED = "mmd"

    @property
    def matrix_kind(self) -> MatrixKind:
        if self is StatisticKind.ENERGY_DISTANCE:
            return MatrixKind.EUCLIDEAN_DISTANCE
        return MatrixKind.GAUSSIAN_KERNEL


def _check_triplet(within_x: PairwiseMatrix, within_y: PairwiseMatrix,
                   between: PairwiseMatrix, kind: MatrixKind) -> None:
    for m in (within_x, within_y, between):
        if not isinstance(m, PairwiseMatrix):
            raise DataValidationError(
                f"expected a PairwiseMatrix, got {type(m).__name__}")
        if m.kind is not kind:
            raise DataValidationError(
                f"expected {kind.value} matrices, got {m.kind.value}")
    if within_x.n1 != within_x.n2 or within_y.n1 != within_y.n2:
        raise DimensionMismatchError(
            f"within-group matrices must be square, got "
            f"{within_x.values.shape} and {within_y.values.shape}")
    if between.n1 != within_x.n1 or between.n2 != within_y.n1:
        raise DimensionMismatchError(
            f"between-group matrix shape {between.values.shape} does not match "
            f"group sizes {within_x.n1} and {within_y.n1}")


def energy_statistic(d_xy: PairwiseMatrix, d_xx: PairwiseMatrix,
                     d_yy: PairwiseMatrix) -> float:
    """Energy-distance sample statistic from three Euclidean distance matrices.

    Returns ``2*mean(d_xy) - mean(d_xx) - mean(d_yy)``.
    """
    _check_triplet(d_xx, d_yy, d_xy, MatrixKind.EUCLIDEAN_DISTANCE)
    return 2.0 * block_mean(d_xy) - block_mean(d_xx) - block_mean(d_yy)


def mmd_biased_statistic(k_xx: PairwiseMatrix, k_yy: PairwiseMatrix,
                         k_xy: PairwiseMatrix) -> float:
    """Biased squared MMD sample statistic from three Gaussian kernel matrices.

    Returns ``mean(k_xx) + mean(k_yy) - 2*mean(k_xy)``.
    """
    _check_triplet(k_xx, k_yy, k_xy, MatrixKind.GAUSSIAN_KERNEL)
    return block_mean(k_xx) + block_mean(k_yy) - 2.0 * block_mean(k_xy)


def two_sample_statistic(kind: StatisticKind, within_x: PairwiseMatrix,
                         within_y: PairwiseMatrix,
                         between: PairwiseMatrix) -> float:
    """Dispatch to the requested statistic with a uniform argument order."""
    if kind is StatisticKind.ENERGY_DISTANCE:
        return energy_statistic(between, within_x, within_y)
    if kind is StatisticKind.MMD_BIASED_SQUARED:
        return mmd_biased_statistic(within_x, within_y, between)
    raise DataValidationError(f"unknown statistic kind: {kind!r}")
