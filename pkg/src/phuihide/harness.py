"""End-to-end runs: mine, select sensitive itemsets, sanitize, re-mine, evaluate.

``sep`` is the fraction of *all* mined PHUIs that is marked sensitive; the
selection size is ``max(1, round(sep * |PHUIs|))`` with halves rounded up.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from .baselines import BaselineVariant, sanitize_baseline
from .exceptions import ConfigError, InvariantError, PhuiError
from .io import FormatKind, parse_itemsets, read_dataset, save_dataset, write_itemsets
from .metrics import MetricsReport, evaluate
from .mining import mine_phuis
from .model import Dataset, Thresholds, as_fraction
from .sanitize import VictimPolicy, sanitize

ALGORITHMS = ("mu-map", "mu-mip", "smau", "smiu", "smse")
PERIODIC_ALGORITHMS = ("mu-map", "mu-mip")
SWEEP_AXES = ("sep", "minutil", "maxPer", "datasetPrefixSize")
SEP_CONVENTION = "sep = fraction of all mined PHUIs selected as sensitive; k = max(1, round-half-up(sep * |PHUIs|))"


class SelectionMode(str, enum.Enum):
    RANDOM = "random"
    INCREMENTAL = "incremental"


def selection_size(sep, n: int) -> int:
    return max(1, math.floor(as_fraction(sep) * n + Fraction(1, 2)))


def select_sensitive(phuis, sep, seed, mode=SelectionMode.RANDOM) -> list:
    """Pick ``max(1, round(sep * len(phuis)))`` itemsets from ``phuis``.

    ``RANDOM`` samples without replacement.  ``INCREMENTAL`` takes a prefix
    of one seeded permutation, so a larger ``sep`` under the same seed
    extends the smaller selection.
    """
    mode = SelectionMode(mode)
    if not phuis:
        raise ConfigError("no PHUIs to select sensitive itemsets from")
    sep_q = as_fraction(sep)
    if not 0 < sep_q <= 1:
        raise ConfigError(f"sep must lie in (0, 1], got {sep}")
    n = len(phuis)
    k = selection_size(sep_q, n)
    rng = np.random.default_rng(seed)
    if mode is SelectionMode.RANDOM:
        idx = rng.choice(n, size=k, replace=False)
    else:
        idx = rng.permutation(n)[:k]
    return [phuis[int(i)].itemset for i in idx]


@dataclass
class RunConfig:
    input: str | None = None
    format: FormatKind = FormatKind.QUANTITY
    utable: str | None = None
    thresholds: Thresholds = field(default_factory=Thresholds)
    sep: float | None = 0.05
    seed: int = 0
    algorithm: str = "mu-map"
    mode: SelectionMode = SelectionMode.RANDOM
    sensitive_file: str | None = None
    out: str | None = None
    dataset_prefix: int | None = None
    verify: bool = False
    dataset: Dataset | None = None  # in-memory input, takes precedence over ``input``
    sensitive: list | None = None  # in-memory sensitive itemsets, takes precedence over selection

    def validate(self) -> None:
        self.format = FormatKind(self.format)
        self.mode = SelectionMode(self.mode)
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; choose from {', '.join(ALGORITHMS)}")
        if self.sensitive is None and self.sensitive_file is None:
            if self.sep is None or not 0 < as_fraction(self.sep) <= 1:
                raise ConfigError(f"sep must lie in (0, 1], got {self.sep}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.dataset is None and self.input is None:
            raise ConfigError("no input dataset")
        if self.dataset_prefix is not None and self.dataset_prefix < 1:
            raise ConfigError("dataset prefix size must be positive")
        self.thresholds.validate()

    def as_dict(self) -> dict:
        return {
            "input": self.input,
            "format": FormatKind(self.format).value,
            "utable": self.utable,
            "thresholds": self.thresholds.as_dict(),
            "sep": None if self.sep is None else str(self.sep),
            "sep_convention": SEP_CONVENTION,
            "seed": self.seed,
            "algorithm": self.algorithm,
            "mode": SelectionMode(self.mode).value,
            "sensitive_file": self.sensitive_file,
            "dataset_prefix": self.dataset_prefix,
        }


@dataclass
class RunArtifacts:
    config: RunConfig
    original: Dataset
    sanitized: Dataset
    report: object
    metrics: MetricsReport
    pi_before: list
    pi_after: list
    sensitive: list
    timings: dict
    paths: dict = field(default_factory=dict)


def _staged(stage, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except PhuiError as exc:
        if not hasattr(exc, "stage"):
            exc.stage = stage
        raise


def run_sanitizer(algorithm, dataset, sensitive, thresholds, pi_before, verify=False):
    if algorithm == "mu-map":
        return sanitize(dataset, sensitive, thresholds, VictimPolicy.MAX_PERIOD, verify=verify)
    if algorithm == "mu-mip":
        return sanitize(dataset, sensitive, thresholds, VictimPolicy.MIN_PERIOD, verify=verify)
    spi = set(sensitive)
    non_sensitive = [r for r in pi_before if r.itemset not in spi]
    return sanitize_baseline(dataset, sensitive, thresholds.minutil, non_sensitive, BaselineVariant(algorithm))


def _load(config: RunConfig) -> Dataset:
    if config.dataset is not None:
        data = config.dataset
    else:
        data = _staged("parse", read_dataset, config.input, config.format, config.utable)
    if config.dataset_prefix is not None:
        data = data.head(config.dataset_prefix)
    return data


def _sensitive(config: RunConfig, pi_before) -> list:
    if config.sensitive is not None:
        chosen = [tuple(s) for s in config.sensitive]
    elif config.sensitive_file is not None:
        chosen = parse_itemsets(Path(config.sensitive_file).read_text(encoding="utf-8"))
    elif not pi_before:
        return []
    else:
        return select_sensitive(pi_before, config.sep, config.seed, config.mode)
    known = {r.itemset for r in pi_before}
    stray = [s for s in chosen if s not in known]
    if stray:
        raise ConfigError(f"sensitive itemsets are not PHUIs of the input: {stray}")
    return chosen


def _prepare(config: RunConfig):
    config.validate()
    data = _load(config)
    t0 = time.perf_counter()
    pi_before = _staged("mine", mine_phuis, data, config.thresholds)
    mine_seconds = time.perf_counter() - t0
    spi = _staged("select", _sensitive, config, pi_before)
    return data, pi_before, spi, mine_seconds


def _hide(config: RunConfig, data, pi_before, spi, mine_seconds) -> RunArtifacts:
    th = config.thresholds
    t0 = time.perf_counter()
    sanitized, report = _staged("sanitize", run_sanitizer, config.algorithm, data, spi, th, pi_before,
                                config.verify)
    hide_seconds = time.perf_counter() - t0
    report.header["selection"] = _selection_header(config)
    t0 = time.perf_counter()
    pi_after = _staged("remine", mine_phuis, sanitized, th)
    remine_seconds = time.perf_counter() - t0
    metrics = _staged("evaluate", evaluate, data, sanitized, pi_before, spi, pi_after)
    if config.algorithm in PERIODIC_ALGORITHMS and metrics.hf_set:
        exc = InvariantError(f"{config.algorithm} left sensitive itemsets minable: {metrics.hf_set}")
        exc.stage = "evaluate"
        raise exc
    timings = {"mine_seconds": mine_seconds, "hide_seconds": hide_seconds, "remine_seconds": remine_seconds}
    return RunArtifacts(config, data, sanitized, report, metrics, pi_before, pi_after, spi, timings)


def _selection_header(config: RunConfig) -> dict:
    if config.sensitive is not None or config.sensitive_file is not None:
        return {"source": "explicit", "sensitive_file": config.sensitive_file}
    return {"source": SelectionMode(config.mode).value, "sep": str(config.sep), "seed": config.seed,
            "sep_convention": SEP_CONVENTION}


def write_artifacts(art: RunArtifacts, out) -> dict:
    """Write every artifact of a run below ``out``.

    Everything except ``timings.json`` is a deterministic function of the
    input bytes and the configuration.
    """
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    kind = FormatKind(art.config.format)
    paths = {
        "sanitized": out / ("sanitized.txt" if kind is FormatKind.QUANTITY else "sanitized.spmf"),
        "report": out / "report.jsonl",
        "metrics_json": out / "metrics.json",
        "metrics_csv": out / "metrics.csv",
        "phuis_before": out / "phuis_before.json",
        "phuis_after": out / "phuis_after.json",
        "sensitive": out / "sensitive.txt",
        "run": out / "run.json",
        "timings": out / "timings.json",
    }
    if kind is FormatKind.QUANTITY:
        paths["utable"] = out / "utility_table.txt"
    save_dataset(art.sanitized, paths["sanitized"], kind, paths.get("utable"))
    paths["report"].write_text(art.report.to_jsonl(), encoding="utf-8")
    paths["metrics_json"].write_text(art.metrics.to_json(), encoding="utf-8")
    paths["metrics_csv"].write_text(art.metrics.to_csv(), encoding="utf-8")
    for key, records in (("phuis_before", art.pi_before), ("phuis_after", art.pi_after)):
        paths[key].write_text(json.dumps([r.as_dict() for r in records], indent=1) + "\n", encoding="utf-8")
    paths["sensitive"].write_text(write_itemsets(art.sensitive), encoding="utf-8")
    paths["run"].write_text(json.dumps(art.config.as_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    paths["timings"].write_text(json.dumps(art.timings, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    art.paths = {k: str(v) for k, v in paths.items()}
    return art.paths


def run_pipeline(config: RunConfig) -> RunArtifacts:
    art = _hide(config, *_prepare(config))
    if config.out is not None:
        write_artifacts(art, config.out)
    return art


SWEEP_COLUMNS = (
    "axis",
    "value",
    "algorithm",
    "n_transactions",
    "n_pi",
    "n_spi",
    "n_edits",
    "mine_seconds",
    "hide_seconds",
    "hf_pct",
    "mc_pct",
    "ac_pct",
    "ius",
    "dus",
    "dss",
    "error",
)


def _with_axis(config: RunConfig, axis: str, value) -> RunConfig:
    th = config.thresholds
    if axis == "sep":
        return replace(config, sep=value, out=None)
    if axis == "minutil":
        return replace(config, thresholds=replace(th, minutil=int(value)), out=None)
    if axis == "maxPer":
        return replace(config, thresholds=replace(th, max_per=int(value)), out=None)
    if axis == "datasetPrefixSize":
        return replace(config, dataset_prefix=int(value), out=None)
    raise ConfigError(f"unknown sweep axis {axis!r}; choose from {', '.join(SWEEP_AXES)}")


def sweep(config: RunConfig, axis: str, values, algorithms=ALGORITHMS) -> list:
    """One row per (value, algorithm); failures are recorded in the ``error`` column."""
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; choose from {', '.join(SWEEP_AXES)}")
    values = list(values)
    if not values:
        raise ConfigError("a sweep needs at least one value")
    rows = []
    for value in values:
        base = {"axis": axis, "value": value}
        try:
            cfg = _with_axis(config, axis, value)
            prepared = _prepare(cfg)
        except (PhuiError, OSError, ValueError) as exc:
            rows.extend({**base, "algorithm": a, "error": _describe(exc)} for a in algorithms)
            continue
        data, pi_before, spi, mine_seconds = prepared
        for algorithm in algorithms:
            row = {**base, "algorithm": algorithm, "n_transactions": len(data), "n_pi": len(pi_before),
                   "n_spi": len(spi), "mine_seconds": mine_seconds}
            try:
                art = _hide(replace(cfg, algorithm=algorithm), data, pi_before, spi, mine_seconds)
            except (PhuiError, ValueError) as exc:
                row["error"] = _describe(exc)
            else:
                m = art.metrics
                row.update(n_edits=len(art.report.steps), hide_seconds=art.timings["hide_seconds"],
                           hf_pct=m.hf_pct, mc_pct=m.mc_pct, ac_pct=m.ac_pct, ius=m.ius, dus=m.dus, dss=m.dss)
            rows.append(row)
    return rows


def _describe(exc) -> str:
    stage = getattr(exc, "stage", None)
    return f"{stage}: {type(exc).__name__}: {exc}" if stage else f"{type(exc).__name__}: {exc}"


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n", restval="")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
