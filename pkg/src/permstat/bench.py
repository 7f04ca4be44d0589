"""Declarative benchmark and power-study harness.

An :class:`ExperimentConfig` names a grid of data shapes, the back-ends to
run, and replication counts; :func:`run_experiment` redraws fresh datasets
per replication (seeded deterministically from the master seed), times every
test call, and returns one flat record per (grid point, backend,
replication).  :func:`summarize` reduces records to timing and power rows.
"""

from __future__ import annotations

import csv
import json
import statistics as pystats
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .crosstest import cross_ed_test, cross_mmd_test
from .dataio import MeanShiftSpec, derive_seed, sample_gaussian
from .errors import ConfigError
from .permute import (
    PermutationStream,
    efficient_perm_test,
    precomputed_perm_test,
    standard_perm_test,
)
from .stats import StatisticKind


class ExperimentKind(Enum):
    TIMING_VS_N = "timing_vs_n"
    TIMING_VS_P = "timing_vs_p"
    NULL_CALIBRATION = "null_calibration"
    POWER_CURVE = "power_curve"


class BenchBackend(Enum):
    STANDARD = "standard"
    PRECOMPUTED = "precomputed"
    EFFICIENT = "efficient"
    CROSS_ED = "cross_ed"
    CROSS_MMD = "cross_mmd"


_PERM_RUNNERS = {
    BenchBackend.STANDARD: standard_perm_test,
    BenchBackend.PRECOMPUTED: precomputed_perm_test,
    BenchBackend.EFFICIENT: efficient_perm_test,
}


@dataclass(frozen=True)
class GridPoint:
    """One data-shape setting: group sizes, dimension, and mean shift."""

    n_x: int
    n_y: int
    p: int
    j: int = 0
    epsilon: float = 0.0

    def __post_init__(self):
        if self.n_x < 1 or self.n_y < 1 or self.p < 1:
            raise ConfigError(
                f"sizes must be >= 1, got n_x={self.n_x}, n_y={self.n_y}, "
                f"p={self.p}", field="grid")
        if not 0 <= self.j <= self.p:
            raise ConfigError(
                f"need 0 <= j <= p, got j={self.j}, p={self.p}", field="grid")


@dataclass(frozen=True)
class ExperimentConfig:
    kind: ExperimentKind
    grid: tuple[GridPoint, ...]
    b: int
    replications: int
    backends: tuple[BenchBackend, ...]
    seed: int
    alpha: float
    statistic: StatisticKind = StatisticKind.ENERGY_DISTANCE

    def __post_init__(self):
        if not self.grid:
            raise ConfigError("grid must be nonempty", field="grid")
        if self.b < 1:
            raise ConfigError(f"must be >= 1, got {self.b}", field="b")
        if self.replications < 1:
            raise ConfigError(f"must be >= 1, got {self.replications}",
                              field="replications")
        if not self.backends:
            raise ConfigError("at least one backend required", field="backends")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"must lie in (0, 1), got {self.alpha}",
                              field="alpha")
        if self.seed < 0:
            raise ConfigError(f"must be >= 0, got {self.seed}", field="seed")
        incompatible = {
            StatisticKind.ENERGY_DISTANCE: BenchBackend.CROSS_MMD,
            StatisticKind.MMD_BIASED_SQUARED: BenchBackend.CROSS_ED,
        }[self.statistic]
        if incompatible in self.backends:
            raise ConfigError(
                f"backend '{incompatible.value}' is incompatible with "
                f"statistic '{self.statistic.value}'", field="backends")


@dataclass(frozen=True)
class ExperimentRecord:
    """One timed test outcome."""

    kind: ExperimentKind
    point: GridPoint
    b: int
    backend: BenchBackend
    rep: int
    elapsed_s: float
    p_value: float


RECORD_COLUMNS = ("kind", "n_x", "n_y", "p", "j", "epsilon", "b", "backend",
                  "rep", "elapsed_s", "p_value")


def _record_row(rec: ExperimentRecord) -> list:
    return [rec.kind.value, rec.point.n_x, rec.point.n_y, rec.point.p,
            rec.point.j, repr(rec.point.epsilon), rec.b, rec.backend.value,
            rec.rep, repr(rec.elapsed_s), repr(rec.p_value)]


def _run_one(backend: BenchBackend, x, y, b: int, perm_seed: int,
             statistic: StatisticKind, threads: int) -> tuple[float, float]:
    """Run one test; returns (elapsed seconds, p-value)."""
    t0 = time.perf_counter()
    if backend is BenchBackend.CROSS_ED:
        p = cross_ed_test(x, y).p_value
    elif backend is BenchBackend.CROSS_MMD:
        p = cross_mmd_test(x, y).p_value
    else:
        runner = _PERM_RUNNERS[backend]
        p = runner(x, y, b, PermutationStream(perm_seed), kind=statistic,
                   threads=threads).p_value
    return time.perf_counter() - t0, p


def run_experiment(config: ExperimentConfig, threads: int = 1,
                   timing_isolated: bool = False) -> list[ExperimentRecord]:
    """Execute every (grid point, replication, backend) cell of the config.

    Fresh x and y datasets are drawn per replication; all backends in a
    replication see the same data and the same permutation seed, so timing
    comparisons are like-for-like.  Replications run serially, and
    ``timing_isolated`` additionally forces single-threaded back-ends so no
    two measurements ever share the machine.
    """
    if timing_isolated:
        threads = 1
    records = []
    for pi, point in enumerate(config.grid):
        shift = MeanShiftSpec(p=point.p, j=point.j, epsilon=point.epsilon)
        for rep in range(config.replications):
            x = sample_gaussian(point.n_x, point.p,
                                seed=derive_seed(config.seed, pi, rep, 0))
            y = sample_gaussian(point.n_y, point.p, mean=shift,
                                seed=derive_seed(config.seed, pi, rep, 1))
            perm_seed = derive_seed(config.seed, pi, rep, 2)
            for backend in config.backends:
                elapsed, p = _run_one(backend, x, y, config.b, perm_seed,
                                      config.statistic, threads)
                records.append(ExperimentRecord(
                    kind=config.kind, point=point, b=config.b,
                    backend=backend, rep=rep, elapsed_s=elapsed, p_value=p))
    return records


@dataclass(frozen=True)
class SummaryRow:
    point: GridPoint
    backend: BenchBackend
    runs: int
    elapsed_mean: float
    elapsed_median: float
    elapsed_min: float
    elapsed_max: float
    power: float
    power_sd: float


def summarize(records, alpha: float, bootstrap_samples: int = 200,
              bootstrap_seed: int = 0) -> list[SummaryRow]:
    """Per (grid point, backend) timing stats and empirical power.

    Power is the fraction of replications with p <= alpha; its uncertainty is
    the standard deviation of the power over bootstrap resamples of the
    replication p-values.
    """
    records = list(records)
    if not records:
        raise ConfigError("cannot summarize an empty record set")
    groups: dict[tuple, list[ExperimentRecord]] = {}
    for rec in records:
        groups.setdefault((rec.point, rec.backend), []).append(rec)

    rng = np.random.default_rng(bootstrap_seed)
    rows = []
    for (point, backend), group in groups.items():
        elapsed = [r.elapsed_s for r in group]
        rejected = np.array([r.p_value <= alpha for r in group], dtype=float)
        n = len(group)
        resampled = rng.integers(0, n, size=(bootstrap_samples, n))
        boot_powers = rejected[resampled].mean(axis=1)
        rows.append(SummaryRow(
            point=point, backend=backend, runs=n,
            elapsed_mean=pystats.fmean(elapsed),
            elapsed_median=pystats.median(elapsed),
            elapsed_min=min(elapsed),
            elapsed_max=max(elapsed),
            power=float(rejected.mean()),
            power_sd=float(boot_powers.std(ddof=1)) if bootstrap_samples > 1 else 0.0,
        ))
    return rows


def format_summary_table(rows) -> str:
    header = (f"{'n_x':>5} {'n_y':>5} {'p':>5} {'j':>4} {'epsilon':>8} "
              f"{'backend':<12} {'runs':>5} {'mean_s':>10} {'median_s':>10} "
              f"{'min_s':>10} {'max_s':>10} {'power':>7} {'power_sd':>9}")
    lines = [header]
    for r in rows:
        lines.append(
            f"{r.point.n_x:>5} {r.point.n_y:>5} {r.point.p:>5} "
            f"{r.point.j:>4} {r.point.epsilon:>8.4g} {r.backend.value:<12} "
            f"{r.runs:>5} {r.elapsed_mean:>10.4g} {r.elapsed_median:>10.4g} "
            f"{r.elapsed_min:>10.4g} {r.elapsed_max:>10.4g} "
            f"{r.power:>7.3f} {r.power_sd:>9.4f}")
    return "\n".join(lines)


def write_records_csv(records, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RECORD_COLUMNS)
        for rec in records:
            writer.writerow(_record_row(rec))


def write_records_jsonl(records, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            obj = dict(zip(RECORD_COLUMNS, _record_row(rec)))
            obj["epsilon"] = rec.point.epsilon
            obj["elapsed_s"] = rec.elapsed_s
            obj["p_value"] = rec.p_value
            fh.write(json.dumps(obj) + "\n")


def write_records(records, path) -> None:
    """Write records as JSON lines when the path ends in .jsonl, else CSV."""
    if str(path).endswith(".jsonl"):
        write_records_jsonl(records, path)
    else:
        write_records_csv(records, path)


# --- configuration documents -------------------------------------------------

_KIND_ALIASES = {k.value.replace("_", ""): k for k in ExperimentKind}
_BACKEND_ALIASES = {b.value.replace("_", ""): b for b in BenchBackend}
_STATISTIC_ALIASES = {"ed": StatisticKind.ENERGY_DISTANCE,
                      "mmd": StatisticKind.MMD_BIASED_SQUARED}

_CONFIG_FIELDS = {"kind", "grid", "b", "replications", "backends", "seed",
                  "alpha", "statistic"}


def _normalize(name: str) -> str:
    return str(name).strip().lower().replace("-", "").replace("_", "")


def _parse_grid_point(entry, index: int) -> GridPoint:
    if isinstance(entry, dict):
        extra = set(entry) - {"n_x", "n_y", "p", "j", "epsilon"}
        if extra:
            raise ConfigError(f"unknown grid keys {sorted(extra)} "
                              f"in entry {index}", field="grid")
        try:
            return GridPoint(n_x=int(entry["n_x"]), n_y=int(entry["n_y"]),
                             p=int(entry["p"]), j=int(entry.get("j", 0)),
                             epsilon=float(entry.get("epsilon", 0.0)))
        except KeyError as exc:
            raise ConfigError(f"grid entry {index} is missing {exc}",
                              field="grid") from None
    if isinstance(entry, (list, tuple)) and 3 <= len(entry) <= 5:
        vals = list(entry) + [0, 0.0][len(entry) - 3:]
        return GridPoint(n_x=int(vals[0]), n_y=int(vals[1]), p=int(vals[2]),
                         j=int(vals[3]), epsilon=float(vals[4]))
    raise ConfigError(
        f"grid entry {index} must be a mapping or a (n_x, n_y, p, j, epsilon) "
        f"sequence", field="grid")


def config_from_mapping(doc: dict) -> ExperimentConfig:
    """Validate a parsed JSON/TOML mapping into an ExperimentConfig."""
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a key-value mapping")
    unknown = set(doc) - _CONFIG_FIELDS
    if unknown:
        raise ConfigError(f"unknown fields {sorted(unknown)}",
                          field=sorted(unknown)[0])
    missing = _CONFIG_FIELDS - {"statistic"} - set(doc)
    if missing:
        raise ConfigError(f"missing required fields {sorted(missing)}",
                          field=sorted(missing)[0])

    kind = _KIND_ALIASES.get(_normalize(doc["kind"]))
    if kind is None:
        raise ConfigError(f"unknown experiment kind {doc['kind']!r}",
                          field="kind")
    if not isinstance(doc["grid"], (list, tuple)):
        raise ConfigError("must be a list of grid points", field="grid")
    grid = tuple(_parse_grid_point(e, i) for i, e in enumerate(doc["grid"]))

    backends = []
    if not isinstance(doc["backends"], (list, tuple)):
        raise ConfigError("must be a list of backend names", field="backends")
    for name in doc["backends"]:
        backend = _BACKEND_ALIASES.get(_normalize(name))
        if backend is None:
            raise ConfigError(f"unknown backend {name!r}", field="backends")
        backends.append(backend)

    statistic = _STATISTIC_ALIASES.get(_normalize(doc.get("statistic", "ed")))
    if statistic is None:
        raise ConfigError(f"unknown statistic {doc['statistic']!r}",
                          field="statistic")

    def as_int(field):
        try:
            return int(doc[field])
        except (TypeError, ValueError):
            raise ConfigError(f"must be an integer, got {doc[field]!r}",
                              field=field) from None

    try:
        alpha = float(doc["alpha"])
    except (TypeError, ValueError):
        raise ConfigError(f"must be a real number, got {doc['alpha']!r}",
                          field="alpha") from None

    return ExperimentConfig(kind=kind, grid=grid, b=as_int("b"),
                            replications=as_int("replications"),
                            backends=tuple(backends), seed=as_int("seed"),
                            alpha=alpha, statistic=statistic)


def load_config(path) -> ExperimentConfig:
    """Load an experiment config from a JSON or TOML document."""
    text = Path(path).read_text(encoding="utf-8")
    if str(path).endswith(".toml"):
        doc = _parse_toml(text, path)
    else:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError:
            doc = _parse_toml(text, path)
    return config_from_mapping(doc)


def _parse_toml(text: str, path) -> dict:
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
