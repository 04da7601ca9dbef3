"""Input validation helpers shared by the estimators."""

from __future__ import annotations

from collections.abc import Mapping, Sequence

from .exceptions import ConfigError, EmptySupportError
from .model import Dataset, Thresholds, make_itemset, occurrences


def check_dataset(X, copy=False) -> Dataset:
    """Coerce ``X`` into a :class:`Dataset`.

    Accepts a Dataset or a ``(transactions, utilities)`` pair.
    """
    if isinstance(X, Dataset):
        return X.copy() if copy else X
    if isinstance(X, Sequence) and len(X) == 2 and isinstance(X[1], Mapping):
        return Dataset(X[0], X[1])
    raise TypeError(f"expected a Dataset or (transactions, utilities) pair, got {type(X).__name__}")


def check_thresholds(minutil, min_per, max_per, min_avg, max_avg) -> Thresholds:
    return Thresholds(minutil=minutil, min_per=min_per, max_per=max_per, min_avg=min_avg, max_avg=max_avg)


def check_itemsets(itemsets, dataset: Dataset | None = None) -> list:
    """Canonicalize a collection of itemsets, rejecting duplicates.

    When ``dataset`` is given, every itemset must occur in it at least once.
    """
    if itemsets is None:
        return []
    out = []
    seen = set()
    for raw in itemsets:
        try:
            itemset = make_itemset(raw)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if itemset in seen:
            raise ConfigError(f"itemset {itemset} listed twice")
        seen.add(itemset)
        out.append(itemset)
    if dataset is not None:
        for itemset in out:
            if not occurrences(dataset, itemset):
                raise EmptySupportError(f"itemset {itemset} occurs in no transaction")
    return out
