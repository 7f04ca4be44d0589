import numpy as np
import pytest

from permstat import (
    CsvFormatError,
    DataMatrix,
    DataValidationError,
    MeanShiftSpec,
    derive_seed,
    load_csv,
    sample_gaussian,
    save_csv,
)


class TestMeanShiftSpec:
    def test_mean_vector_layout(self):
        spec = MeanShiftSpec(p=50, j=5, epsilon=0.25)
        mu = spec.mean_vector()
        assert mu.shape == (50,)
        assert np.all(mu[:5] == 0.25)
        assert np.all(mu[5:] == 0.0)

    def test_zero_shift(self):
        assert np.all(MeanShiftSpec(p=4, j=0, epsilon=9.0).mean_vector() == 0.0)

    def test_j_bounds(self):
        with pytest.raises(DataValidationError):
            MeanShiftSpec(p=3, j=4, epsilon=0.1)
        with pytest.raises(DataValidationError):
            MeanShiftSpec(p=3, j=-1, epsilon=0.1)

    def test_epsilon_finite(self):
        with pytest.raises(DataValidationError):
            MeanShiftSpec(p=3, j=1, epsilon=float("inf"))


class TestSampleGaussian:
    def test_zero_mean_column_means(self):
        m = sample_gaussian(10_000, 5, seed=1234)
        col_means = m.values.mean(axis=0)
        assert np.all(np.abs(col_means) <= 4 / np.sqrt(10_000))

    def test_shifted_mean(self):
        spec = MeanShiftSpec(p=50, j=5, epsilon=0.25)
        m = sample_gaussian(4000, 50, mean=spec, seed=7)
        col_means = m.values.mean(axis=0)
        bound = 4 / np.sqrt(4000)
        assert np.all(np.abs(col_means[:5] - 0.25) <= bound)
        assert np.all(np.abs(col_means[5:]) <= bound)

    def test_deterministic(self):
        a = sample_gaussian(1, 1, seed=99)
        b = sample_gaussian(1, 1, seed=99)
        assert a.values[0, 0] == b.values[0, 0]

    def test_unit_variance(self):
        m = sample_gaussian(20_000, 2, seed=5)
        assert np.all(np.abs(m.values.std(axis=0) - 1.0) < 0.05)

    def test_invalid_shape(self):
        with pytest.raises(DataValidationError):
            sample_gaussian(0, 3)
        with pytest.raises(DataValidationError):
            sample_gaussian(3, 0)

    def test_mean_dimension_checked(self):
        with pytest.raises(DataValidationError):
            sample_gaussian(3, 4, mean=MeanShiftSpec(p=5, j=1, epsilon=0.1))


class TestDeriveSeed:
    def test_deterministic(self):
        assert derive_seed(7, 1, 2) == derive_seed(7, 1, 2)

    def test_distinct_paths(self):
        seeds = {derive_seed(7, i, j) for i in range(5) for j in range(5)}
        assert len(seeds) == 25


class TestLoadCsv:
    def test_basic(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1,2\n3,4\n")
        m = load_csv(path)
        assert m.values.tolist() == [[1.0, 2.0], [3.0, 4.0]]
        assert m.column_names is None

    def test_header_recorded(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("a,b\n1,2\n")
        m = load_csv(path)
        assert m.values.tolist() == [[1.0, 2.0]]
        assert m.column_names == ("a", "b")

    def test_scientific_notation(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1e-3,-2.5E+2\n")
        assert load_csv(path).values.tolist() == [[0.001, -250.0]]

    def test_ragged_row(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1,2\n3\n")
        with pytest.raises(CsvFormatError) as err:
            load_csv(path)
        assert err.value.row == 2

    def test_non_numeric_cell(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1,2\n3,oops\n")
        with pytest.raises(CsvFormatError) as err:
            load_csv(path)
        assert (err.value.row, err.value.column) == (2, 2)

    def test_nan_cell_rejected(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1,2\n3,nan\n")
        with pytest.raises(CsvFormatError) as err:
            load_csv(path)
        assert (err.value.row, err.value.column) == (2, 2)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("")
        with pytest.raises(CsvFormatError):
            load_csv(path)

    def test_header_only(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("a,b\n")
        with pytest.raises(CsvFormatError):
            load_csv(path)


class TestRoundTrip:
    def test_values_exact(self, tmp_path):
        rng = np.random.default_rng(8)
        original = rng.standard_normal((13, 4)) * np.logspace(-12, 12, 4)
        path = tmp_path / "m.csv"
        save_csv(original, path)
        loaded = load_csv(path)
        assert np.array_equal(loaded.values, original)

    def test_header_preserved(self, tmp_path):
        m = DataMatrix([[0.1, 0.2]], column_names=("alpha", "beta"))
        path = tmp_path / "m.csv"
        save_csv(m, path)
        loaded = load_csv(path)
        assert loaded.column_names == ("alpha", "beta")
        assert np.array_equal(loaded.values, m.values)

    def test_serialization_is_stable(self, tmp_path):
        m = sample_gaussian(5, 3, seed=3)
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        save_csv(m, p1)
        save_csv(m, p2)
        assert p1.read_bytes() == p2.read_bytes()
