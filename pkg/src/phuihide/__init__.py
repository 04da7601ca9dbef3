"""Mining and hiding periodic high-utility itemsets."""

from .baselines import BaselineSanitizer, BaselineVariant, sanitize_baseline
from .exceptions import (
    AbsentItemError,
    ConfigError,
    EmptySupportError,
    InvariantError,
    ParseError,
    PhuiError,
    UndefinedMetricError,
)
from .harness import RunArtifacts, RunConfig, SelectionMode, run_pipeline, select_sensitive, sweep
from .io import FormatKind, generate_synthetic, parse_quantity_format, parse_spmf_utility_format, read_dataset
from .metrics import MetricsReport, dss, dus, evaluate, ius
from .mining import PHUIMiner, compute_twu, mine_phuis, mine_phuis_bruteforce
from .model import Dataset, PeriodSummary, PHUIRecord, Thresholds
from .sanitize import MUMAP, MUMIP, PeriodicSanitizer, SanitizeReport, VictimPolicy, replay, sanitize

__version__ = "0.1.0"

__all__ = [
    "AbsentItemError",
    "BaselineSanitizer",
    "BaselineVariant",
    "ConfigError",
    "Dataset",
    "EmptySupportError",
    "FormatKind",
    "InvariantError",
    "MUMAP",
    "MUMIP",
    "MetricsReport",
    "PHUIMiner",
    "PHUIRecord",
    "ParseError",
    "PeriodSummary",
    "PeriodicSanitizer",
    "PhuiError",
    "RunArtifacts",
    "RunConfig",
    "SanitizeReport",
    "SelectionMode",
    "Thresholds",
    "UndefinedMetricError",
    "VictimPolicy",
    "compute_twu",
    "dss",
    "dus",
    "evaluate",
    "generate_synthetic",
    "ius",
    "mine_phuis",
    "mine_phuis_bruteforce",
    "parse_quantity_format",
    "parse_spmf_utility_format",
    "read_dataset",
    "replay",
    "run_pipeline",
    "sanitize",
    "sanitize_baseline",
    "select_sensitive",
    "sweep",
]
