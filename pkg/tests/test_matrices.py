import math

import numpy as np
import pytest

from permstat import (
    DataMatrix,
    DataValidationError,
    DimensionMismatchError,
    MatrixKind,
    PairwiseMatrix,
    block_mean,
    euclidean_distance_matrix,
    gaussian_kernel_matrix,
    median_heuristic_bandwidth,
)


def dist_bruteforce(x, y):
    """Scalar per-pair oracle: explicit loop over coordinates."""
    out = np.empty((len(x), len(y)))
    for i in range(len(x)):
        for j in range(len(y)):
            s = 0.0
            for k in range(x.shape[1]):
                s += (x[i, k] - y[j, k]) ** 2
            out[i, j] = math.sqrt(s)
    return out


class TestDataMatrix:
    def test_shape_properties(self):
        m = DataMatrix([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
        assert (m.rows, m.cols) == (3, 2)

    def test_rejects_empty(self):
        with pytest.raises(DataValidationError):
            DataMatrix(np.empty((0, 3)))

    def test_rejects_1d(self):
        with pytest.raises(DataValidationError):
            DataMatrix([1.0, 2.0, 3.0])

    def test_rejects_non_finite(self):
        with pytest.raises(DataValidationError):
            DataMatrix([[1.0, np.nan]])
        with pytest.raises(DataValidationError):
            DataMatrix([[np.inf, 0.0]])

    def test_column_names_length_checked(self):
        with pytest.raises(DataValidationError):
            DataMatrix([[1.0, 2.0]], column_names=("a",))


class TestEuclideanDistanceMatrix:
    def test_3_4_5_triangle(self):
        d = euclidean_distance_matrix([[0.0, 0.0]], [[3.0, 4.0]])
        assert d.values[0, 0] == 5.0
        assert d.kind is MatrixKind.EUCLIDEAN_DISTANCE

    def test_identical_points_give_exact_zero(self):
        d = euclidean_distance_matrix([[1.0, 2.0, 3.0]], [[1.0, 2.0, 3.0]])
        assert d.values[0, 0] == 0.0

    def test_matches_bruteforce(self):
        rng = np.random.default_rng(42)
        x = rng.standard_normal((4, 3))
        y = rng.standard_normal((5, 3))
        d = euclidean_distance_matrix(x, y)
        assert d.values.shape == (4, 5)
        np.testing.assert_allclose(d.values, dist_bruteforce(x, y), atol=1e-9)

    def test_self_distance_diagonal_and_symmetry(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((7, 4))
        d = euclidean_distance_matrix(x, x).values
        assert np.all(np.abs(np.diag(d)) <= 1e-12)
        assert np.all(np.abs(d - d.T) <= 1e-12)

    def test_transpose_symmetry(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((6, 3))
        y = rng.standard_normal((4, 3))
        dxy = euclidean_distance_matrix(x, y).values
        dyx = euclidean_distance_matrix(y, x).values
        assert np.all(np.abs(dxy - dyx.T) <= 1e-12)

    def test_triangle_inequality(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal((6, 3))
        d = euclidean_distance_matrix(x, x).values
        n = len(x)
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    assert d[i, k] <= d[i, j] + d[j, k] + 1e-12

    def test_scaling(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal((5, 2))
        y = rng.standard_normal((6, 2))
        c = 3.7
        d1 = euclidean_distance_matrix(x, y).values
        d2 = euclidean_distance_matrix(c * x, c * y).values
        np.testing.assert_allclose(d2, c * d1, rtol=1e-12)

    def test_column_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            euclidean_distance_matrix([[1.0, 2.0]], [[1.0, 2.0, 3.0]])

    def test_non_finite_rejected(self):
        with pytest.raises(DataValidationError):
            euclidean_distance_matrix([[np.nan]], [[1.0]])


class TestGaussianKernelMatrix:
    def test_zero_distance_gives_one(self):
        k = gaussian_kernel_matrix([[1.0, 2.0]], [[1.0, 2.0]], bandwidth=1.0)
        assert k.values[0, 0] == 1.0
        assert k.kind is MatrixKind.GAUSSIAN_KERNEL

    def test_scalar_value(self):
        # exp(-|0-2|^2 / (2*1^2)) = exp(-2)
        k = gaussian_kernel_matrix([[0.0]], [[2.0]], bandwidth=1.0)
        assert k.values[0, 0] == pytest.approx(math.exp(-2.0), rel=1e-15)

    def test_large_bandwidth_limit(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal((4, 3))
        y = rng.standard_normal((5, 3))
        k = gaussian_kernel_matrix(x, y, bandwidth=1e9).values
        np.testing.assert_allclose(k, 1.0, atol=1e-9)

    def test_unit_diagonal_and_range(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal((6, 2))
        k = gaussian_kernel_matrix(x, x, bandwidth=0.7).values
        assert np.all(np.abs(np.diag(k) - 1.0) <= 1e-12)
        assert np.all(k > 0.0) and np.all(k <= 1.0)

    def test_matches_scalar_oracle(self):
        rng = np.random.default_rng(6)
        x = rng.standard_normal((3, 2))
        y = rng.standard_normal((4, 2))
        bw = 1.3
        k = gaussian_kernel_matrix(x, y, bandwidth=bw).values
        for i in range(3):
            for j in range(4):
                sq = sum((x[i, c] - y[j, c]) ** 2 for c in range(2))
                assert k[i, j] == pytest.approx(
                    math.exp(-sq / (2 * bw * bw)), rel=1e-12)

    @pytest.mark.parametrize("bw", [0.0, -1.0, math.nan, math.inf])
    def test_invalid_bandwidth(self, bw):
        with pytest.raises(DataValidationError):
            gaussian_kernel_matrix([[0.0]], [[1.0]], bandwidth=bw)


class TestMedianHeuristic:
    def test_single_pair(self):
        assert median_heuristic_bandwidth([[0.0]], [[4.0]]) == 4.0

    def test_three_points(self):
        # pooled {0, 1, 3}: pairwise distances {1, 2, 3} -> median 2
        assert median_heuristic_bandwidth([[0.0], [1.0]], [[3.0]]) == 2.0

    def test_degenerate_fallback(self):
        assert median_heuristic_bandwidth([[2.0], [2.0]], [[2.0]]) == 1.0

    def test_too_few_samples(self):
        with pytest.raises(DataValidationError):
            median_heuristic_bandwidth(np.empty((0, 1)), [[1.0]])


class TestBlockMean:
    def test_scalar(self):
        assert block_mean(np.array([[5.0]])) == 5.0

    def test_small(self):
        assert block_mean(np.array([[1.0, 2.0], [3.0, 4.0]])) == 2.5

    def test_large_constant_accumulation(self):
        m = np.full((1000, 1000), 0.1)
        assert abs(block_mean(m) - 0.1) / 0.1 < 1e-13

    def test_pairwise_matrix_input(self):
        pm = PairwiseMatrix(np.array([[2.0, 4.0]]), MatrixKind.EUCLIDEAN_DISTANCE)
        assert block_mean(pm) == 3.0

    def test_empty_rejected(self):
        with pytest.raises(DataValidationError):
            block_mean(np.empty((0, 0)))
