"""Domain types and utility/period arithmetic for quantitative transaction data.

A :class:`Dataset` is an ordered list of transaction slots, each mapping
item id to purchased quantity, plus an external-utility table.  Transaction
ids are 1-based slot positions.  Slots may be empty, which keeps ids and
``len(dataset)`` stable when sanitization removes every item of a
transaction.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral, Real
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from .exceptions import AbsentItemError, ConfigError

Item = int
Itemset = tuple  # tuple[int, ...], strictly ascending, non-empty


def make_itemset(items: Iterable[int]) -> Itemset:
    """Return the canonical (sorted, duplicate-free) tuple form of ``items``."""
    items = list(items)
    out = tuple(sorted(set(items)))
    if not out:
        raise ValueError("an itemset must contain at least one item")
    if len(out) != len(items):
        raise ValueError(f"duplicate items in itemset {items!r}")
    for item in out:
        if not isinstance(item, Integral) or item < 0:
            raise ValueError(f"item ids must be non-negative integers, got {item!r}")
    return tuple(int(i) for i in out)


def as_fraction(value) -> Fraction:
    """Exact rational form of a user-supplied real.

    Floats go through their shortest decimal repr so that ``0.1`` means one
    tenth rather than the nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Integral):
        return Fraction(int(value))
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, Real):
        return Fraction(repr(float(value)))
    raise TypeError(f"cannot interpret {value!r} as a real number")


class Transaction(NamedTuple):
    tid: int
    entries: tuple  # ((item, quantity), ...) ascending by item


class Dataset:
    """Ordered transaction slots with quantities and an external-utility table.

    Parameters
    ----------
    transactions : iterable of mapping
        One ``{item: quantity}`` mapping per slot, in tid order.
    utilities : mapping
        External utility per item.  Must cover every item that occurs.
    """

    def __init__(self, transactions: Iterable[Mapping[int, int]], utilities: Mapping[int, int]):
        self.utilities = {}
        for item, eu in utilities.items():
            if not isinstance(item, Integral) or item < 0:
                raise ValueError(f"item ids must be non-negative integers, got {item!r}")
            if not isinstance(eu, Integral) or eu < 1:
                raise ValueError(f"external utility of item {item} must be a positive integer, got {eu!r}")
            self.utilities[int(item)] = int(eu)
        self.transactions = []
        for pos, trans in enumerate(transactions, start=1):
            row = {}
            for item in sorted(trans):
                qty = trans[item]
                if not isinstance(qty, Integral) or qty < 1:
                    raise ValueError(f"T{pos}: quantity of item {item} must be a positive integer, got {qty!r}")
                if item not in self.utilities:
                    raise ValueError(f"T{pos}: item {item} has no external utility")
                row[int(item)] = int(qty)
            self.transactions.append(row)
        if not self.transactions:
            raise ValueError("a dataset needs at least one transaction slot")

    # -- container protocol ------------------------------------------------

    def __len__(self) -> int:
        return len(self.transactions)

    @property
    def size(self) -> int:
        return len(self.transactions)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.transactions == other.transactions and self.utilities == other.utilities

    def __repr__(self) -> str:
        return f"Dataset(n_transactions={len(self)}, n_items={len(self.items())})"

    def copy(self) -> "Dataset":
        new = Dataset.__new__(Dataset)
        new.utilities = dict(self.utilities)
        new.transactions = [dict(t) for t in self.transactions]
        return new

    def _check_tid(self, tid: int) -> None:
        if not isinstance(tid, Integral) or not 1 <= tid <= len(self.transactions):
            raise IndexError(f"tid {tid!r} outside 1..{len(self.transactions)}")

    def transaction(self, tid: int) -> dict:
        self._check_tid(tid)
        return self.transactions[tid - 1]

    def __iter__(self) -> Iterator[Transaction]:
        for tid, row in enumerate(self.transactions, start=1):
            yield Transaction(tid, tuple(row.items()))

    def items(self) -> list:
        """Sorted ids of items occurring in at least one transaction."""
        seen = set()
        for row in self.transactions:
            seen.update(row)
        return sorted(seen)

    def transaction_utility(self, tid: int) -> int:
        eu = self.utilities
        return sum(q * eu[i] for i, q in self.transaction(tid).items())

    def total_utility(self) -> int:
        eu = self.utilities
        return sum(q * eu[i] for row in self.transactions for i, q in row.items())

    def head(self, n: int) -> "Dataset":
        """The first ``n`` transaction slots (scalability protocol)."""
        if n < 1:
            raise ValueError("prefix size must be positive")
        new = Dataset.__new__(Dataset)
        new.utilities = dict(self.utilities)
        new.transactions = [dict(t) for t in self.transactions[:n]]
        return new

    # -- edits -------------------------------------------------------------

    def delete_item(self, tid: int, item: int) -> int:
        """Remove ``item`` from transaction ``tid``; return the utility removed."""
        row = self.transaction(tid)
        if item not in row:
            raise AbsentItemError(f"item {item} not in T{tid}")
        return row.pop(item) * self.utilities[item]

    def reduce_quantity(self, tid: int, item: int, amount: int) -> int:
        """Lower the quantity of ``item`` in ``tid`` by ``amount`` units.

        Reaching zero removes the item.  Returns the utility removed.
        """
        row = self.transaction(tid)
        if item not in row:
            raise AbsentItemError(f"item {item} not in T{tid}")
        if amount < 1 or amount > row[item]:
            raise ValueError(f"cannot reduce item {item} in T{tid} by {amount} (quantity {row[item]})")
        if amount == row[item]:
            del row[item]
        else:
            row[item] -= amount
        return amount * self.utilities[item]


@dataclass(frozen=True)
class Thresholds:
    """Mining constraints.

    ``min_per`` and ``min_avg`` may be 0 to switch the lower bounds off;
    ``max_per`` and ``max_avg`` must be positive.  Average-period bounds are
    held as exact fractions.
    """

    minutil: int
    min_per: int
    max_per: int
    min_avg: Fraction
    max_avg: Fraction

    def __init__(self, minutil=0, min_per=1, max_per=1, min_avg=1, max_avg=1):
        object.__setattr__(self, "minutil", minutil)
        object.__setattr__(self, "min_per", min_per)
        object.__setattr__(self, "max_per", max_per)
        object.__setattr__(self, "min_avg", as_fraction(min_avg))
        object.__setattr__(self, "max_avg", as_fraction(max_avg))
        self.validate()

    def validate(self) -> None:
        for name in ("minutil", "min_per", "max_per"):
            value = getattr(self, name)
            if not isinstance(value, Integral) or isinstance(value, bool):
                raise ConfigError(f"{name} must be an integer, got {value!r}")
        if self.minutil < 0:
            raise ConfigError("minutil must be non-negative")
        if self.min_per < 0 or self.max_per < 1:
            raise ConfigError("need min_per >= 0 and max_per >= 1")
        if self.min_per > self.max_per:
            raise ConfigError(f"min_per {self.min_per} exceeds max_per {self.max_per}")
        if self.min_avg < 0 or self.max_avg <= 0:
            raise ConfigError("need min_avg >= 0 and max_avg > 0")
        if self.min_avg > self.max_avg:
            raise ConfigError(f"min_avg {self.min_avg} exceeds max_avg {self.max_avg}")

    def as_dict(self) -> dict:
        return {
            "minutil": self.minutil,
            "min_per": self.min_per,
            "max_per": self.max_per,
            "min_avg": str(self.min_avg),
            "max_avg": str(self.max_avg),
        }


@dataclass(frozen=True)
class PeriodSummary:
    occurrences: tuple
    periods: tuple
    min_per: int
    max_per: int
    avg_per: Fraction

    @property
    def support(self) -> int:
        return len(self.occurrences)


@dataclass(frozen=True)
class PHUIRecord:
    itemset: Itemset
    utility: int
    summary: PeriodSummary = field(repr=False)

    @property
    def support(self) -> int:
        return self.summary.support

    def as_dict(self) -> dict:
        s = self.summary
        return {
            "itemset": list(self.itemset),
            "utility": self.utility,
            "support": s.support,
            "min_per": s.min_per,
            "max_per": s.max_per,
            "avg_per": str(s.avg_per),
        }


def summarize_periods(tids: Sequence[int], n_transactions: int) -> PeriodSummary:
    """Period list and its statistics for an ascending occurrence list.

    Gaps are measured against virtual boundaries at tid 0 and tid
    ``n_transactions``.  The minimum period ignores the two boundary gaps;
    with fewer than three gaps it is defined as the maximum period.
    """
    bounds = [0, *tids, n_transactions]
    periods = tuple(b - a for a, b in zip(bounds, bounds[1:]))
    max_per = max(periods)
    interior = periods[1:-1]
    min_per = min(interior) if interior else max_per
    avg_per = Fraction(n_transactions, len(tids) + 1)
    return PeriodSummary(tuple(tids), periods, min_per, max_per, avg_per)


def max_period(tids: Sequence[int], n_transactions: int) -> int:
    """Largest gap of ``tids`` with the same boundary convention."""
    prev = 0
    best = 0
    for t in tids:
        if t - prev > best:
            best = t - prev
        prev = t
    return max(best, n_transactions - prev)


def item_utility(dataset: Dataset, item: int, tid: int) -> int:
    row = dataset.transaction(tid)
    if item not in row:
        raise AbsentItemError(f"item {item} not in T{tid}")
    return row[item] * dataset.utilities[item]


def itemset_utility_in_transaction(dataset: Dataset, itemset: Sequence[int], tid: int):
    """Utility of ``itemset`` in ``tid``, or ``None`` when it is not contained."""
    row = dataset.transaction(tid)
    eu = dataset.utilities
    total = 0
    for item in itemset:
        qty = row.get(item)
        if qty is None:
            return None
        total += qty * eu[item]
    return total


def occurrences(dataset: Dataset, itemset: Sequence[int]) -> list:
    """Ascending tids of the transactions containing ``itemset``."""
    return [tid for tid, row in enumerate(dataset.transactions, start=1) if all(i in row for i in itemset)]


def itemset_utility(dataset: Dataset, itemset: Sequence[int]) -> int:
    total = 0
    for tid in range(1, len(dataset) + 1):
        u = itemset_utility_in_transaction(dataset, itemset, tid)
        if u is not None:
            total += u
    return total


def period_summary(dataset: Dataset, itemset: Sequence[int]) -> PeriodSummary:
    return summarize_periods(occurrences(dataset, itemset), len(dataset))


def min_support_bound(n_transactions: int, max_avg) -> Fraction:
    """Support below which the average period exceeds ``max_avg``: ``|D| / max_avg - 1``."""
    max_avg = as_fraction(max_avg)
    if max_avg <= 0:
        raise ConfigError("max_avg must be positive")
    return Fraction(n_transactions) / max_avg - 1


def satisfies(summary: PeriodSummary, utility: int, thresholds: Thresholds) -> bool:
    """True when an itemset with these statistics is a periodic high-utility itemset.

    Itemsets that occur nowhere never qualify, even when every bound is
    vacuous.
    """
    return (
        summary.support > 0
        and utility >= thresholds.minutil
        and summary.min_per >= thresholds.min_per
        and summary.max_per <= thresholds.max_per
        and thresholds.min_avg <= summary.avg_per <= thresholds.max_avg
    )


def remove_tid(tids: list, tid: int) -> None:
    """Delete ``tid`` from an ascending list in place."""
    pos = bisect_left(tids, tid)
    if pos == len(tids) or tids[pos] != tid:
        raise KeyError(tid)
    del tids[pos]
