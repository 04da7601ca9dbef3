"""Periodic high-utility itemset mining.

:func:`mine_phuis` is a depth-first utility-list search.  Items are ordered
by ascending TWU (ties by id); each list entry keeps the itemset's utility
in one transaction and the utility of the items that may still extend it
there.  A subtree is cut only by bounds that are anti-monotone along the
extension order:

* the item's TWU, or the prefix's utility plus remaining utility, is below
  ``minutil``;
* the prefix's support is below ``|D| / max_avg - 1`` (every extension has
  an average period above ``max_avg``);
* the prefix's maximum period exceeds ``max_per``.

The lower bounds ``min_per`` and ``min_avg`` are never used for pruning,
only for the final filter.  :func:`mine_phuis_bruteforce` enumerates the
whole item lattice and is the test oracle.
"""

from __future__ import annotations

from itertools import combinations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .exceptions import ConfigError
from .model import (
    Dataset,
    PHUIRecord,
    Thresholds,
    itemset_utility,
    max_period,
    min_support_bound,
    period_summary,
    satisfies,
    summarize_periods,
)
from .validation import check_dataset, check_thresholds

BRUTEFORCE_MAX_ITEMS = 20


def compute_twu(dataset: Dataset) -> dict:
    """Transaction-weighted utilization of every item in ``dataset.utilities``."""
    twu = dict.fromkeys(dataset.utilities, 0)
    eu = dataset.utilities
    for row in dataset.transactions:
        tu = sum(q * eu[i] for i, q in row.items())
        for item in row:
            twu[item] += tu
    return twu


def _search(prefix, plist, ext, out, n, th, min_sup):
    # plist / each ext list: parallel (tids, iutils, rutils) lists
    for idx, (item, (tids, iu, ru)) in enumerate(ext):
        sup = len(tids)
        if sup == 0 or sup < min_sup:
            continue
        if max_period(tids, n) > th.max_per:
            continue
        itemset = prefix + (item,)
        utility = sum(iu)
        summary = summarize_periods(tids, n)
        if satisfies(summary, utility, th):
            out.append(PHUIRecord(tuple(sorted(itemset)), utility, summary))
        if utility + sum(ru) < th.minutil:
            continue
        children = []
        for other, (otids, oiu, oru) in ext[idx + 1:]:
            children.append((other, _join(plist, (tids, iu, ru), (otids, oiu, oru))))
        if children:
            _search(itemset, (tids, iu, ru), children, out, n, th, min_sup)


def _join(plist, xl, yl):
    xt, xi, xr = xl
    yt, yi, yr = yl
    ptids, piu = (plist[0], plist[1]) if plist is not None else (None, None)
    tids, iu, ru = [], [], []
    a = b = c = 0
    while a < len(xt) and b < len(yt):
        if xt[a] < yt[b]:
            a += 1
        elif xt[a] > yt[b]:
            b += 1
        else:
            tid = xt[a]
            u = xi[a] + yi[b]
            if ptids is not None:
                while ptids[c] < tid:
                    c += 1
                u -= piu[c]
            tids.append(tid)
            iu.append(u)
            ru.append(yr[b])
            a += 1
            b += 1
    return tids, iu, ru


def mine_phuis(dataset: Dataset, thresholds: Thresholds) -> list:
    """All periodic high-utility itemsets, sorted by itemset."""
    n = len(dataset)
    th = thresholds
    min_sup = min_support_bound(n, th.max_avg)
    twu = compute_twu(dataset)
    promising = [i for i, w in twu.items() if w >= th.minutil and w > 0]
    order = sorted(promising, key=lambda i: (twu[i], i))
    rank = {item: r for r, item in enumerate(order)}
    lists = {item: ([], [], []) for item in order}
    eu = dataset.utilities
    for tid, row in enumerate(dataset.transactions, start=1):
        kept = sorted((i for i in row if i in rank), key=rank.__getitem__)
        utils = [row[i] * eu[i] for i in kept]
        remaining = sum(utils)
        for item, u in zip(kept, utils):
            remaining -= u
            tids, iu, ru = lists[item]
            tids.append(tid)
            iu.append(u)
            ru.append(remaining)
    out = []
    _search((), None, [(i, lists[i]) for i in order], out, n, th, min_sup)
    out.sort(key=lambda r: r.itemset)
    return out


def mine_phuis_bruteforce(dataset: Dataset, thresholds: Thresholds) -> list:
    """Exhaustive enumeration of every non-empty subset of the item universe."""
    universe = dataset.items()
    if len(universe) > BRUTEFORCE_MAX_ITEMS:
        raise ConfigError(f"item universe of {len(universe)} exceeds the brute-force limit {BRUTEFORCE_MAX_ITEMS}")
    out = []
    for k in range(1, len(universe) + 1):
        for itemset in combinations(universe, k):
            summary = period_summary(dataset, itemset)
            utility = itemset_utility(dataset, itemset)
            if satisfies(summary, utility, thresholds):
                out.append(PHUIRecord(itemset, utility, summary))
    out.sort(key=lambda r: r.itemset)
    return out


class PHUIMiner(BaseEstimator):
    """Estimator wrapper around :func:`mine_phuis`.

    Parameters
    ----------
    minutil : int
        Minimum utility.
    min_per, max_per : int
        Bounds on the minimum and maximum period.
    min_avg, max_avg : real
        Bounds on the average period.
    bruteforce : bool, default=False
        Use the exhaustive oracle instead of the pruned search.

    Attributes
    ----------
    phuis_ : list of PHUIRecord
    twu_ : dict
    n_transactions_ : int
    """

    def __init__(self, minutil=0, min_per=1, max_per=1, min_avg=1, max_avg=1, bruteforce=False):
        self.minutil = minutil
        self.min_per = min_per
        self.max_per = max_per
        self.min_avg = min_avg
        self.max_avg = max_avg
        self.bruteforce = bruteforce

    @property
    def thresholds(self) -> Thresholds:
        return check_thresholds(self.minutil, self.min_per, self.max_per, self.min_avg, self.max_avg)

    def fit(self, X, y=None):
        dataset = check_dataset(X)
        th = self.thresholds
        miner = mine_phuis_bruteforce if self.bruteforce else mine_phuis
        self.phuis_ = miner(dataset, th)
        self.twu_ = compute_twu(dataset)
        self.n_transactions_ = len(dataset)
        return self

    def itemsets(self) -> list:
        check_is_fitted(self, "phuis_")
        return [r.itemset for r in self.phuis_]

    def predict(self, X) -> list:
        """Which of the mined itemsets are still PHUIs of ``X``."""
        check_is_fitted(self, "phuis_")
        dataset = check_dataset(X)
        th = self.thresholds
        return [satisfies(period_summary(dataset, s), itemset_utility(dataset, s), th) for s in self.itemsets()]
