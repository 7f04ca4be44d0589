"""Synthetic Gaussian data generation and CSV ingestion/serialization."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .errors import CsvFormatError, DataValidationError
from .matrices import DataMatrix, as_data_matrix


@dataclass(frozen=True)
class MeanShiftSpec:
    """Mean vector with the first ``j`` of ``p`` coordinates set to ``epsilon``."""

    p: int
    j: int
    epsilon: float

    def __post_init__(self):
        if self.p < 1:
            raise DataValidationError(f"dimension must be >= 1, got {self.p}")
        if not 0 <= self.j <= self.p:
            raise DataValidationError(
                f"shifted-coordinate count must satisfy 0 <= j <= p, "
                f"got j={self.j}, p={self.p}")
        if not math.isfinite(self.epsilon):
            raise DataValidationError("shift magnitude must be finite")

    def mean_vector(self) -> np.ndarray:
        mu = np.zeros(self.p)
        mu[:self.j] = self.epsilon
        return mu


def derive_seed(seed: int, *key: int) -> int:
    """Mix a master seed with an integer key path into a fresh 64-bit seed."""
    ss = np.random.SeedSequence(entropy=int(seed),
                                spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def sample_gaussian(n: int, p: int, mean: MeanShiftSpec | None = None,
                    seed: int = 0) -> DataMatrix:
    """Draw an n x p matrix of independent unit-variance normals.

    Variates are produced by the inverse-CDF transform applied to midpoint
    uniforms ``(k + 0.5) / 2**53`` from a seeded PCG64 stream, so the draw is
    a documented deterministic function of the seed.

    Parameters
    ----------
    n, p : int
        Sample count and dimension, both at least 1.
    mean : MeanShiftSpec, optional
        Per-coordinate mean shift; omitted means a zero mean vector.
    seed : int
        Generator seed.
    """
    if n < 1 or p < 1:
        raise DataValidationError(
            f"sample shape must be at least 1x1, got {n}x{p}")
    rng = np.random.default_rng(seed)
    k = rng.integers(0, 1 << 53, size=(n, p), dtype=np.int64)
    u = (k.astype(np.float64) + 0.5) * 2.0 ** -53
    z = ndtri(u)
    if mean is not None:
        if mean.p != p:
            raise DataValidationError(
                f"mean spec has dimension {mean.p}, data has {p}")
        z += mean.mean_vector()
    return DataMatrix(z)


def _parse_cell(cell: str) -> float | None:
    try:
        v = float(cell)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def load_csv(path) -> DataMatrix:
    """Read a rectangular numeric CSV into a DataMatrix.

    A first row with any cell that does not parse as a finite number is
    treated as a header and recorded as column names.  Row/column positions
    in error messages are 1-based file coordinates.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise CsvFormatError("empty file", path=path)

    width = len(rows[0])
    header = None
    start = 0
    if any(_parse_cell(cell) is None for cell in rows[0]):
        header = tuple(cell.strip() for cell in rows[0])
        start = 1
        if len(rows) == 1:
            raise CsvFormatError("no data rows after header", path=path)

    data = np.empty((len(rows) - start, width))
    for r in range(start, len(rows)):
        row = rows[r]
        if len(row) != width:
            raise CsvFormatError(
                f"ragged row: expected {width} values, got {len(row)}",
                path=path, row=r + 1)
        for c, cell in enumerate(row):
            v = _parse_cell(cell)
            if v is None:
                raise CsvFormatError(f"non-numeric value {cell.strip()!r}",
                                     path=path, row=r + 1, column=c + 1)
            data[r - start, c] = v
    return DataMatrix(data, column_names=header)


def save_csv(matrix, path) -> None:
    """Write a DataMatrix as CSV with 17-significant-digit values.

    The format round-trips float64 exactly; a header row is written when the
    matrix carries column names.
    """
    m = as_data_matrix(matrix)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if m.column_names is not None:
            writer.writerow(m.column_names)
        for row in m.values:
            writer.writerow([format(v, ".17g") for v in row])
