"""Energy-distance and MMD two-sample tests with fast permutation back-ends.

The package provides three interchangeable permutation back-ends (standard
reshuffling, pooled-matrix pre-computation, and block element-swapping over
the three original pairwise matrices) that produce identical results from a
shared permutation stream, plus the permutation-free cross-ED/cross-MMD
baselines, synthetic Gaussian data generation, and a benchmark harness.
"""

from .bench import (
    BenchBackend,
    ExperimentConfig,
    ExperimentKind,
    ExperimentRecord,
    GridPoint,
    SummaryRow,
    config_from_mapping,
    format_summary_table,
    load_config,
    run_experiment,
    summarize,
    write_records,
)
from .crosstest import CrossTestResult, cross_ed_test, cross_mmd_test, normal_cdf
from .dataio import (
    MeanShiftSpec,
    derive_seed,
    load_csv,
    sample_gaussian,
    save_csv,
)
from .errors import (
    ConfigError,
    CsvFormatError,
    DataValidationError,
    DegenerateVarianceError,
    DimensionMismatchError,
    PermstatError,
)
from .matrices import (
    DataMatrix,
    MatrixKind,
    PairwiseMatrix,
    block_mean,
    euclidean_distance_matrix,
    gaussian_kernel_matrix,
    median_heuristic_bandwidth,
)
from .permute import (
    Backend,
    FixedDrawStream,
    PermutationIndexSet,
    PermutationStream,
    TestResult,
    efficient_perm_test,
    indexes_from_draw,
    perm_pvalue,
    permutation_indexes,
    precomputed_perm_test,
    reconstruct_permuted_matrices,
    standard_perm_test,
)
from .stats import (
    StatisticKind,
    energy_statistic,
    mmd_biased_statistic,
    two_sample_statistic,
)

__version__ = "0.1.0"

__all__ = [
    "Backend",
    "BenchBackend",
    "ConfigError",
    "CrossTestResult",
    "CsvFormatError",
    "DataMatrix",
    "DataValidationError",
    "DegenerateVarianceError",
    "DimensionMismatchError",
    "ExperimentConfig",
    "ExperimentKind",
    "ExperimentRecord",
    "FixedDrawStream",
    "GridPoint",
    "MatrixKind",
    "MeanShiftSpec",
    "PairwiseMatrix",
    "PermstatError",
    "PermutationIndexSet",
    "PermutationStream",
    "StatisticKind",
    "SummaryRow",
    "TestResult",
    "block_mean",
    "config_from_mapping",
    "cross_ed_test",
    "cross_mmd_test",
    "derive_seed",
    "efficient_perm_test",
    "energy_statistic",
    "euclidean_distance_matrix",
    "format_summary_table",
    "gaussian_kernel_matrix",
    "indexes_from_draw",
    "load_config",
    "load_csv",
    "median_heuristic_bandwidth",
    "mmd_biased_statistic",
    "normal_cdf",
    "perm_pvalue",
    "permutation_indexes",
    "precomputed_perm_test",
    "reconstruct_permuted_matrices",
    "run_experiment",
    "sample_gaussian",
    "save_csv",
    "standard_perm_test",
    "summarize",
    "two_sample_statistic",
    "write_records",
]
