"""Utility-only sanitizers in the style of SMAU, SMIU and SMSE.

These ignore periods entirely: an itemset counts as hidden once its utility
drops below ``minutil``.  Victim transactions are those supporting the
fewest non-sensitive itemsets (ties: higher itemset utility, then smaller
tid).  The victim item is the member with the largest utility in the
transaction (SMAU), the smallest (SMIU), or the one contained in the fewest
non-sensitive itemsets (SMSE, ties by smaller utility).
"""

from __future__ import annotations

import enum
from collections import Counter

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .model import Dataset, PHUIRecord, max_period
from .sanitize import Action, EditStep, HideReason, SanitizeReport, required_reduction_units
from .validation import check_dataset, check_itemsets


class BaselineVariant(str, enum.Enum):
    SMAU = "smau"
    SMIU = "smiu"
    SMSE = "smse"


def _as_itemsets(records) -> list:
    return [r.itemset if isinstance(r, PHUIRecord) else tuple(r) for r in records or ()]


def sanitize_baseline(dataset: Dataset, sensitive_itemsets, phi: int, non_sensitive_phuis, variant):
    """Hide ``sensitive_itemsets`` by utility alone; returns ``(dataset, report)``."""
    variant = BaselineVariant(variant)
    data = dataset.copy()
    itemsets = check_itemsets(sensitive_itemsets, data)
    non_sensitive = [s for s in _as_itemsets(non_sensitive_phuis) if s not in set(itemsets)]
    containment = Counter(i for s in non_sensitive for i in s)
    eu = data.utilities
    n = len(data)

    def ns_supported(row):
        return sum(1 for s in non_sensitive if all(i in row for i in s))

    def utilities_of(s, tids):
        out = {}
        for tid in tids:
            row = data.transactions[tid - 1]
            if all(i in row for i in s):
                out[tid] = sum(row[i] * eu[i] for i in s)
        return out

    tracked = {s: utilities_of(s, range(1, n + 1)) for s in itemsets}
    order = sorted(itemsets, key=lambda s: (-sum(tracked[s].values()), s))
    report = SanitizeReport(
        algorithm=variant.value,
        header={"minutil": phi, "order": [list(s) for s in order], "non_sensitive": len(non_sensitive)},
    )

    for s in order:
        while True:
            per_tid = tracked[s] = utilities_of(s, tracked[s])
            total = sum(per_tid.values())
            if not per_tid:
                report.hidden_by[s] = HideReason.SUPPORT
                break
            if total < phi:
                report.hidden_by[s] = HideReason.UTILITY
                break
            du = total - phi
            tid = min(per_tid, key=lambda t: (ns_supported(data.transactions[t - 1]), -per_tid[t], t))
            row = data.transactions[tid - 1]
            if variant is BaselineVariant.SMAU:
                item = min(s, key=lambda i: (-row[i] * eu[i], i))
            elif variant is BaselineVariant.SMIU:
                item = min(s, key=lambda i: (row[i] * eu[i], i))
            else:
                item = min(s, key=lambda i: (containment[i], row[i] * eu[i], i))
            if row[item] * eu[item] <= du:
                dq = row[item]
            else:
                dq = min(required_reduction_units(du, eu[item]), row[item])
            if dq == row[item]:
                removed = data.delete_item(tid, item)
                action = Action.DELETE
            else:
                removed = data.reduce_quantity(tid, item, dq)
                action = Action.REDUCE
            after = utilities_of(s, per_tid)
            report.steps.append(EditStep(s, tid, item, action, dq, du, removed, sum(after.values()), len(after),
                                         max_period(sorted(after), n)))
    return data, report


class BaselineSanitizer(TransformerMixin, BaseEstimator):
    """Estimator wrapper around :func:`sanitize_baseline`.

    ``fit(X, sensitive_itemsets, non_sensitive_phuis=...)`` records the
    itemsets; ``transform(X)`` returns the sanitized copy and sets
    ``report_``.
    """

    def __init__(self, minutil=0, variant="smau"):
        self.minutil = minutil
        self.variant = variant

    def fit(self, X, y=None, non_sensitive_phuis=None):
        dataset = check_dataset(X)
        BaselineVariant(self.variant)
        self.sensitive_itemsets_ = check_itemsets(y, dataset)
        self.non_sensitive_ = _as_itemsets(non_sensitive_phuis)
        return self

    def transform(self, X):
        check_is_fitted(self, "sensitive_itemsets_")
        out, self.report_ = sanitize_baseline(check_dataset(X), self.sensitive_itemsets_, self.minutil,
                                              self.non_sensitive_, self.variant)
        return out
