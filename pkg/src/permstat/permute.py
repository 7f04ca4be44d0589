"""Permutation two-sample tests: standard, pre-computed, and element-swapping.

All three back-ends draw group assignments from a shared
:class:`PermutationStream`, so they see the same permutations and produce the
same null samples.  They differ only in how the permuted-data matrices are
obtained:

* standard        -- reshuffle the raw rows and recompute all three pairwise
                     matrices at every iteration;
* precomputed     -- compute one pairwise matrix on the pooled data and
                     extract submatrices per iteration;
* efficient       -- compute the three original matrices once and rebuild
                     each permuted matrix purely by re-indexing their blocks.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DataValidationError, DimensionMismatchError
from .matrices import (
    PairwiseMatrix,
    as_data_matrix,
    euclidean_distance_matrix,
    gaussian_kernel_matrix,
    median_heuristic_bandwidth,
)
from .stats import StatisticKind, two_sample_statistic


class Backend(Enum):
    STANDARD = "standard"
    PRECOMPUTED = "precomputed"
    EFFICIENT = "efficient"


@dataclass(frozen=True)
class PermutationIndexSet:
    """Index bookkeeping for one permutation of the pooled two-sample data.

    ``i1``/``i2`` are the 1-based rows of x and of y assigned to the permuted
    first group; ``j1``/``j2`` the rows assigned to the permuted second group.
    ``i1s``/``i2s``/``j1s``/``j2s`` are the 1-based destination positions of
    those rows inside the rebuilt pairwise matrices.
    """

    n_x: int
    n_y: int
    i1: np.ndarray
    i2: np.ndarray
    i1s: np.ndarray
    i2s: np.ndarray
    j1: np.ndarray
    j2: np.ndarray
    j1s: np.ndarray
    j2s: np.ndarray


class PermutationStream:
    """Deterministic source of group-assignment draws.

    The draw for iteration ``i`` is a pure function of ``(seed, i)``: every
    iteration gets its own generator derived by mixing the seed with the
    iteration number, so back-ends and any worker-thread schedule see
    identical permutations.
    """

    def __init__(self, seed: int, iteration: int = 0):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise DataValidationError(
                f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = seed
        self.iteration = int(iteration)

    def substream(self, iteration: int) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed,
                                    spawn_key=(int(iteration),))
        return np.random.Generator(np.random.PCG64(ss))

    def draw_at(self, iteration: int, n: int, k: int) -> np.ndarray:
        """Sample k of (1..n) without replacement, in draw order."""
        if not 1 <= k <= n:
            raise DataValidationError(f"cannot draw {k} items from {n}")
        rng = self.substream(iteration)
        # Fisher-Yates shuffle; the first k positions are a uniform ordered
        # sample without replacement.
        return rng.permutation(n)[:k].astype(np.int64) + 1

    def next_draw(self, n: int, k: int) -> np.ndarray:
        out = self.draw_at(self.iteration, n, k)
        self.iteration += 1
        return out


class FixedDrawStream(PermutationStream):
    """Stream that replays scripted draws, one per iteration (for tests)."""

    def __init__(self, draws):
        super().__init__(seed=0)
        self._draws = [np.asarray(d, dtype=np.int64) for d in draws]

    def draw_at(self, iteration: int, n: int, k: int) -> np.ndarray:
        if iteration >= len(self._draws):
            raise DataValidationError(
                f"no scripted draw for iteration {iteration} "
                f"({len(self._draws)} provided)")
        draw = self._draws[iteration]
        if draw.size != k:
            raise DataValidationError(
                f"scripted draw {iteration} has {draw.size} items, expected {k}")
        return draw.copy()


def _complement(idx_p1: np.ndarray, n: int) -> np.ndarray:
    """The 1-based indices of (1..n) not in idx_p1, in ascending order."""
    mask = np.ones(n + 1, dtype=bool)
    mask[idx_p1] = False
    return np.nonzero(mask[1:])[0].astype(np.int64) + 1


def indexes_from_draw(n_x: int, n_y: int, idx_p1) -> PermutationIndexSet:
    """Map a drawn pooled-index subset to per-group matrix indices.

    ``idx_p1`` holds the 1-based pooled-data rows (x stacked above y)
    assigned to the permuted first group, in draw order.  Pooled indices at
    most ``n_x`` refer to rows of x; larger ones refer to rows of y.  The
    complement, taken in ascending order, forms the permuted second group.
    """
    n = n_x + n_y
    p1 = np.asarray(idx_p1, dtype=np.int64)
    if p1.ndim != 1 or p1.size != n_x:
        raise DataValidationError(
            f"draw must contain exactly n_x={n_x} indices, got {p1.size}")
    if p1.size and (p1.min() < 1 or p1.max() > n):
        raise DataValidationError(f"draw indices must lie in 1..{n}")
    p2 = _complement(p1, n)
    if p2.size != n_y:
        raise DataValidationError("draw contains repeated indices")

    in_x = p1 <= n_x
    i1 = p1[in_x]
    i2 = p1[~in_x] - n_x
    in_x2 = p2 <= n_x
    j1 = p2[in_x2]
    j2 = p2[~in_x2] - n_x
    m, q = i1.size, j1.size
    return PermutationIndexSet(
        n_x=n_x, n_y=n_y,
        i1=i1, i2=i2,
        i1s=np.arange(1, m + 1, dtype=np.int64),
        i2s=np.arange(m + 1, n_x + 1, dtype=np.int64),
        j1=j1, j2=j2,
        j1s=np.arange(1, q + 1, dtype=np.int64),
        j2s=np.arange(q + 1, n_y + 1, dtype=np.int64),
    )


def permutation_indexes(n_x: int, n_y: int,
                        stream: PermutationStream) -> PermutationIndexSet:
    """Draw one permutation from the stream and map it to matrix indices."""
    if n_x < 1 or n_y < 1:
        raise DataValidationError("group sizes must be at least 1")
    return indexes_from_draw(n_x, n_y, stream.next_draw(n_x + n_y, n_x))


class _BlockReconstructor:
    """Rebuilds permuted-data matrices by re-indexing the three base matrices.

    The permuted within-first matrix is the 2x2 block arrangement of
    base-matrix submatrices selected by (i1, i2); likewise for the other two
    outputs with (j1, j2).  The blocks are gathered in a single fused pass:
    the three base matrices are laid out in one flat arena and each output is
    one ``take`` with precomputed flat offsets.
    """

    def __init__(self, d_xx: np.ndarray, d_yy: np.ndarray, d_xy: np.ndarray,
                 store_transposed: bool = False):
        self.n_x = d_xx.shape[0]
        self.n_y = d_yy.shape[0]
        n_x, n_y = self.n_x, self.n_y
        parts = [np.ascontiguousarray(d_xx).ravel(),
                 np.ascontiguousarray(d_xy).ravel(),
                 np.ascontiguousarray(d_yy).ravel()]
        self._off_xy = n_x * n_x
        self._off_yy = self._off_xy + n_x * n_y
        # Debug option: materialize the transposed between-matrix instead of
        # addressing transposed blocks inside d_xy.
        self._off_yx = None
        if store_transposed:
            self._off_yx = self._off_yy + n_y * n_y
            parts.append(np.ascontiguousarray(d_xy.T).ravel())
        self._arena = np.concatenate(parts)
        self._ixx = np.empty((n_x, n_x), dtype=np.intp)
        self._iyy = np.empty((n_y, n_y), dtype=np.intp)
        self._ixy = np.empty((n_x, n_y), dtype=np.intp)

    def _transposed_block(self, out, rows_src, cols_src):
        """Flat offsets of d_xy[rows_src, cols_src].T written into ``out``."""
        if self._off_yx is None:
            # entry (a, b) reads d_xy[rows_src[b], cols_src[a]]
            np.add.outer(self._off_xy + cols_src, rows_src * self.n_y, out=out)
        else:
            # entry (a, b) reads d_yx[cols_src[a], rows_src[b]]
            np.add.outer(self._off_yx + cols_src * self.n_x, rows_src, out=out)

    def rebuild(self, idx: PermutationIndexSet):
        """Permuted (within_x, within_y, between) matrices for one draw."""
        n_x, n_y = self.n_x, self.n_y
        i1 = idx.i1 - 1
        i2 = idx.i2 - 1
        j1 = idx.j1 - 1
        j2 = idx.j2 - 1
        m, q = i1.size, j1.size
        o_xy, o_yy = self._off_xy, self._off_yy
        ixx, iyy, ixy = self._ixx, self._iyy, self._ixy

        np.add.outer(i1 * n_x, i1, out=ixx[:m, :m])
        np.add.outer(o_xy + i1 * n_y, i2, out=ixx[:m, m:])
        self._transposed_block(ixx[m:, :m], i1, i2)
        np.add.outer(o_yy + i2 * n_y, i2, out=ixx[m:, m:])

        np.add.outer(j1 * n_x, j1, out=iyy[:q, :q])
        np.add.outer(o_xy + j1 * n_y, j2, out=iyy[:q, q:])
        self._transposed_block(iyy[q:, :q], j1, j2)
        np.add.outer(o_yy + j2 * n_y, j2, out=iyy[q:, q:])

        np.add.outer(i1 * n_x, j1, out=ixy[:m, :q])
        np.add.outer(o_xy + i1 * n_y, j2, out=ixy[:m, q:])
        self._transposed_block(ixy[m:, :q], j1, i2)
        np.add.outer(o_yy + i2 * n_y, j2, out=ixy[m:, q:])

        arena = self._arena
        return arena.take(ixx), arena.take(iyy), arena.take(ixy)


def reconstruct_permuted_matrices(d_xx, d_yy, d_xy, idx: PermutationIndexSet,
                                  store_transposed: bool = False):
    """Rebuild the permuted-data matrices for one draw from the base matrices.

    Accepts the three base matrices as PairwiseMatrix or plain arrays and
    returns plain ``(within_x, within_y, between)`` arrays.
    """
    def values(m):
        return m.values if isinstance(m, PairwiseMatrix) else np.asarray(m, float)

    d_xx, d_yy, d_xy = values(d_xx), values(d_yy), values(d_xy)
    if d_xx.shape != (idx.n_x, idx.n_x) or d_yy.shape != (idx.n_y, idx.n_y) \
            or d_xy.shape != (idx.n_x, idx.n_y):
        raise DimensionMismatchError(
            f"base matrix shapes {d_xx.shape}, {d_yy.shape}, {d_xy.shape} do "
            f"not match group sizes ({idx.n_x}, {idx.n_y})")
    rec = _BlockReconstructor(d_xx, d_yy, d_xy, store_transposed=store_transposed)
    return rec.rebuild(idx)


@dataclass(frozen=True)
class TestResult:
    """Outcome of one permutation two-sample test."""

    observed: float
    null_sample: np.ndarray
    p_value: float
    b: int
    backend: Backend
    elapsed: float


def perm_pvalue(null_sample, observed: float) -> float:
    """Unbiased permutation p-value: (1 + #{null >= observed}) / (1 + b)."""
    ns = np.asarray(null_sample, dtype=np.float64)
    if ns.ndim != 1 or ns.size == 0:
        raise DataValidationError("null sample must be a nonempty 1-d sequence")
    exceed = int(np.count_nonzero(ns >= observed))
    return (1 + exceed) / (1 + ns.size)


def _validate_inputs(x, y, b: int, kind) -> tuple[np.ndarray, np.ndarray, StatisticKind]:
    xa, ya = as_data_matrix(x), as_data_matrix(y)
    if xa.cols != ya.cols:
        raise DimensionMismatchError(
            f"x has {xa.cols} columns but y has {ya.cols}")
    if b < 1:
        raise DataValidationError(f"permutation count must be >= 1, got {b}")
    try:
        kind = StatisticKind(kind)
    except ValueError:
        raise DataValidationError(f"unknown statistic kind: {kind!r}") from None
    return xa.values, ya.values, kind


def _resolve_bandwidth(kind: StatisticKind, xa, ya, bandwidth):
    if kind is StatisticKind.ENERGY_DISTANCE:
        return None
    if bandwidth is None:
        return median_heuristic_bandwidth(xa, ya)
    return float(bandwidth)


def _base_matrices(kind: StatisticKind, xa, ya, bandwidth):
    """The three original-data matrices (within_x, within_y, between)."""
    if kind is StatisticKind.ENERGY_DISTANCE:
        return (euclidean_distance_matrix(xa, xa),
                euclidean_distance_matrix(ya, ya),
                euclidean_distance_matrix(xa, ya))
    return (gaussian_kernel_matrix(xa, xa, bandwidth),
            gaussian_kernel_matrix(ya, ya, bandwidth),
            gaussian_kernel_matrix(xa, ya, bandwidth))


def _pooled_matrix(kind: StatisticKind, pooled, bandwidth) -> np.ndarray:
    if kind is StatisticKind.ENERGY_DISTANCE:
        return euclidean_distance_matrix(pooled, pooled).values
    return gaussian_kernel_matrix(pooled, pooled, bandwidth).values


def _run_iterations(b: int, threads: int, make_worker) -> np.ndarray:
    """Fill the null sample; results depend only on iteration indices."""
    if threads < 1:
        raise DataValidationError(f"threads must be >= 1, got {threads}")
    null = np.empty(b, dtype=np.float64)
    if threads == 1 or b == 1:
        worker = make_worker()
        for i in range(b):
            null[i] = worker(i)
        return null

    chunks = [c for c in np.array_split(np.arange(b), threads) if c.size]

    def run_chunk(chunk):
        worker = make_worker()
        for i in chunk:
            null[i] = worker(int(i))

    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        for future in [pool.submit(run_chunk, c) for c in chunks]:
            future.result()
    return null


def standard_perm_test(x, y, b: int, stream: PermutationStream,
                       kind: StatisticKind = StatisticKind.ENERGY_DISTANCE,
                       bandwidth: float | None = None,
                       threads: int = 1) -> TestResult:
    """Permutation test that reshuffles rows and recomputes matrices each time."""
    t0 = time.perf_counter()
    xa, ya, kind = _validate_inputs(x, y, b, kind)
    bandwidth = _resolve_bandwidth(kind, xa, ya, bandwidth)
    n_x, n_y = xa.shape[0], ya.shape[0]
    n = n_x + n_y

    within_x, within_y, between = _base_matrices(kind, xa, ya, bandwidth)
    observed = two_sample_statistic(kind, within_x, within_y, between)
    pooled = np.vstack([xa, ya])

    def make_worker():
        def run(i):
            p1 = stream.draw_at(i, n, n_x)
            p2 = _complement(p1, n)
            xs = pooled[p1 - 1]
            ys = pooled[p2 - 1]
            wx, wy, bet = _base_matrices(kind, xs, ys, bandwidth)
            return two_sample_statistic(kind, wx, wy, bet)
        return run

    null = _run_iterations(b, threads, make_worker)
    p = perm_pvalue(null, observed)
    return TestResult(observed, null, p, b, Backend.STANDARD,
                      time.perf_counter() - t0)


def precomputed_perm_test(x, y, b: int, stream: PermutationStream,
                          kind: StatisticKind = StatisticKind.ENERGY_DISTANCE,
                          bandwidth: float | None = None,
                          threads: int = 1) -> TestResult:
    """Permutation test over one pooled-data matrix, extracting submatrices."""
    t0 = time.perf_counter()
    xa, ya, kind = _validate_inputs(x, y, b, kind)
    bandwidth = _resolve_bandwidth(kind, xa, ya, bandwidth)
    n_x, n_y = xa.shape[0], ya.shape[0]
    n = n_x + n_y
    mat_kind = kind.matrix_kind

    pooled = np.vstack([xa, ya])
    big = _pooled_matrix(kind, pooled, bandwidth)
    observed = two_sample_statistic(
        kind,
        PairwiseMatrix(big[:n_x, :n_x], mat_kind),
        PairwiseMatrix(big[n_x:, n_x:], mat_kind),
        PairwiseMatrix(big[:n_x, n_x:], mat_kind),
    )

    def make_worker():
        def run(i):
            p1 = stream.draw_at(i, n, n_x)
            p2 = _complement(p1, n)
            a, c = p1 - 1, p2 - 1
            bet = big[np.ix_(a, c)]
            wx = big[np.ix_(a, a)]
            wy = big[np.ix_(c, c)]
            return two_sample_statistic(
                kind,
                PairwiseMatrix(wx, mat_kind),
                PairwiseMatrix(wy, mat_kind),
                PairwiseMatrix(bet, mat_kind),
            )
        return run

    null = _run_iterations(b, threads, make_worker)
    p = perm_pvalue(null, observed)
    return TestResult(observed, null, p, b, Backend.PRECOMPUTED,
                      time.perf_counter() - t0)


def efficient_perm_test(x, y, b: int, stream: PermutationStream,
                        kind: StatisticKind = StatisticKind.ENERGY_DISTANCE,
                        bandwidth: float | None = None,
                        threads: int = 1,
                        store_transposed: bool = False) -> TestResult:
    """Permutation test that rebuilds matrices by swapping base-matrix blocks.

    The three base matrices are computed once; every iteration re-indexes
    their blocks to assemble the permuted-data matrices.  No pairwise matrix
    is ever computed inside the permutation loop.
    """
    t0 = time.perf_counter()
    xa, ya, kind = _validate_inputs(x, y, b, kind)
    bandwidth = _resolve_bandwidth(kind, xa, ya, bandwidth)
    n_x, n_y = xa.shape[0], ya.shape[0]
    n = n_x + n_y
    mat_kind = kind.matrix_kind

    within_x, within_y, between = _base_matrices(kind, xa, ya, bandwidth)
    observed = two_sample_statistic(kind, within_x, within_y, between)

    def make_worker():
        rec = _BlockReconstructor(within_x.values, within_y.values,
                                  between.values,
                                  store_transposed=store_transposed)

        def run(i):
            idx = indexes_from_draw(n_x, n_y, stream.draw_at(i, n, n_x))
            wx, wy, bet = rec.rebuild(idx)
            return two_sample_statistic(
                kind,
                PairwiseMatrix(wx, mat_kind),
                PairwiseMatrix(wy, mat_kind),
                PairwiseMatrix(bet, mat_kind),
            )
        return run

    null = _run_iterations(b, threads, make_worker)
    p = perm_pvalue(null, observed)
    return TestResult(observed, null, p, b, Backend.EFFICIENT,
                      time.perf_counter() - t0)
