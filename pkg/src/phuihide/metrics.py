"""Side-effect and similarity measures between a database and its sanitized copy.

Percent denominators: hiding failure over the sensitive set, missing cost
over the non-sensitive PHUIs, artificial cost over all original PHUIs.
Each report carries the three denominators so the numbers can be read
back unambiguously.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import dataclass, field

from .exceptions import ConfigError, UndefinedMetricError
from .model import Dataset, PHUIRecord

CSV_COLUMNS = (
    "hf_pct",
    "mc_pct",
    "ac_pct",
    "ius",
    "dus",
    "dss",
    "n_spi",
    "n_non_sensitive",
    "n_pi",
)


def _itemsets(records) -> set:
    return {r.itemset if isinstance(r, PHUIRecord) else tuple(r) for r in records}


def side_effect_sets(pi_original, spi, pi_sanitized):
    """Hiding failure, missing cost and artificial cost as sorted itemset lists."""
    pi, sens, after = _itemsets(pi_original), _itemsets(spi), _itemsets(pi_sanitized)
    if not sens <= pi:
        raise ConfigError(f"sensitive itemsets not among the original PHUIs: {sorted(sens - pi)}")
    hf = sens & after
    mc = (pi - sens) - after
    ac = after - pi
    return sorted(hf), sorted(mc), sorted(ac)


def side_effect_percentages(sets, pi_original, spi):
    hf, mc, ac = sets
    n_pi = len(_itemsets(pi_original))
    n_spi = len(_itemsets(spi))
    n_ns = n_pi - n_spi
    return (
        100.0 * len(hf) / n_spi if n_spi else 0.0,
        100.0 * len(mc) / n_ns if n_ns else 0.0,
        100.0 * len(ac) / n_pi if n_pi else 0.0,
    )


def ius(pi_original_records, pi_sanitized_records) -> float:
    before = sum(r.utility for r in pi_original_records)
    after = sum(r.utility for r in pi_sanitized_records)
    if before == 0:
        raise UndefinedMetricError("no PHUI utility in the original database")
    return after / before


def dus(original: Dataset, sanitized: Dataset) -> float:
    before = original.total_utility()
    if before == 0:
        raise UndefinedMetricError("the original database has zero utility")
    return sanitized.total_utility() / before


def dus_from_report(original: Dataset, report) -> float:
    before = original.total_utility()
    if before == 0:
        raise UndefinedMetricError("the original database has zero utility")
    return (before - report.removed_utility) / before


def _frequency_vector(dataset: Dataset) -> list:
    signatures = [frozenset(row) for row in dataset.transactions]
    counts = Counter(signatures)
    return [counts[s] for s in signatures]


def dss(original: Dataset, sanitized: Dataset) -> float:
    """Cosine similarity of the per-slot transaction-frequency vectors.

    A slot's frequency is the number of transactions with the same set of
    items (quantities ignored).
    """
    if len(original) != len(sanitized):
        raise ConfigError(f"databases differ in size ({len(original)} vs {len(sanitized)})")
    if not any(original.transactions):
        raise UndefinedMetricError("the original database has no items")
    f, g = _frequency_vector(original), _frequency_vector(sanitized)
    dot = sum(a * b for a, b in zip(f, g))
    return dot / math.sqrt(sum(a * a for a in f) * sum(b * b for b in g))


@dataclass
class MetricsReport:
    hf_set: list
    mc_set: list
    ac_set: list
    hf_pct: float
    mc_pct: float
    ac_pct: float
    ius: float
    dus: float
    dss: float
    n_spi: int
    n_non_sensitive: int
    n_pi: int
    notes: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "hf_set": [list(s) for s in self.hf_set],
            "mc_set": [list(s) for s in self.mc_set],
            "ac_set": [list(s) for s in self.ac_set],
            "hf_pct": self.hf_pct,
            "mc_pct": self.mc_pct,
            "ac_pct": self.ac_pct,
            "ius": self.ius,
            "dus": self.dus,
            "dss": self.dss,
            "denominators": {
                "hf_pct": "n_spi",
                "mc_pct": "n_non_sensitive",
                "ac_pct": "n_pi",
                "n_spi": self.n_spi,
                "n_non_sensitive": self.n_non_sensitive,
                "n_pi": self.n_pi,
            },
            **({"notes": self.notes} if self.notes else {}),
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n"

    def csv_row(self) -> dict:
        return {c: getattr(self, c) for c in CSV_COLUMNS}

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerow(self.csv_row())
        return buf.getvalue()


def evaluate(original: Dataset, sanitized: Dataset, pi_original, spi, pi_sanitized) -> MetricsReport:
    """All side-effect and similarity measures in one report.

    When the original database has no PHUIs at all, IUS is reported as 1
    (nothing to lose) instead of raising.
    """
    sets = side_effect_sets(pi_original, spi, pi_sanitized)
    hf_pct, mc_pct, ac_pct = side_effect_percentages(sets, pi_original, spi)
    notes = {}
    if pi_original:
        ius_value = ius(pi_original, pi_sanitized)
    else:
        ius_value = 1.0
        notes["ius"] = "no PHUIs in the original database; reported as 1"
    n_pi = len(_itemsets(pi_original))
    n_spi = len(_itemsets(spi))
    return MetricsReport(
        *sets,
        hf_pct=hf_pct,
        mc_pct=mc_pct,
        ac_pct=ac_pct,
        ius=ius_value,
        dus=dus(original, sanitized),
        dss=dss(original, sanitized),
        n_spi=n_spi,
        n_non_sensitive=n_pi - n_spi,
        n_pi=n_pi,
        notes=notes,
    )
