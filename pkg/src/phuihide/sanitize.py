"""Hiding sensitive periodic high-utility itemsets by editing transactions.

Each sensitive itemset gets two ledgers:

* a :class:`SISL` holding its current total utility, its utility in every
  supporting transaction, its largest period and its support;
* a SIL, one :class:`SILRow` per (supporting transaction, member item) with
  the item's utility and quantity there and the item's largest period over
  the whole database.

Itemsets are processed longest first.  While an itemset would still be
mined (utility at least ``minutil``, largest period within ``max_per`` and
support at least ``|D| / max_avg - 1``), the transaction where it earns the
most is edited: the member item with the largest (``MAX_PERIOD``) or
smallest (``MIN_PERIOD``) item period is deleted when its utility there does
not exceed the surplus over ``minutil``, and otherwise its quantity is cut
just enough to push the itemset's utility below ``minutil``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import EmptySupportError, InvariantError
from .model import Dataset, Thresholds, make_itemset, max_period, min_support_bound, occurrences, remove_tid
from .validation import check_dataset, check_itemsets, check_thresholds


class VictimPolicy(str, enum.Enum):
    MAX_PERIOD = "max_period"
    MIN_PERIOD = "min_period"


class HideReason(str, enum.Enum):
    UTILITY = "utility"
    MAXPER = "maxper"
    SUPPORT = "support"


class Action(str, enum.Enum):
    DELETE = "delete"
    REDUCE = "reduce"


@dataclass
class SISL:
    itemset: tuple
    su: int
    tids: list
    utilities: dict
    lp: int
    n_transactions: int

    @property
    def sup(self) -> int:
        return len(self.tids)

    @property
    def tid_utilities(self) -> list:
        return [(t, self.utilities[t]) for t in self.tids]

    def drop(self, tid: int) -> int:
        u = self.utilities.pop(tid)
        remove_tid(self.tids, tid)
        self.su -= u
        self.lp = max_period(self.tids, self.n_transactions)
        return u


@dataclass
class SILRow:
    tid: int
    item: int
    iu: int
    cnt: int
    mp: int

    def astuple(self) -> tuple:
        return (self.tid, self.item, self.iu, self.cnt, self.mp)


@dataclass(frozen=True)
class EditStep:
    """One edit, with the processed itemset's ledger state after it."""

    itemset: tuple
    tid: int
    item: int
    action: Action
    quantity: int
    du: int
    removed_utility: int
    su: int
    sup: int
    lp: int

    def as_dict(self) -> dict:
        return {
            "type": "edit",
            "itemset": list(self.itemset),
            "tid": self.tid,
            "item": self.item,
            "action": self.action.value,
            "quantity": self.quantity,
            "du": self.du,
            "removed_utility": self.removed_utility,
            "su": self.su,
            "sup": self.sup,
            "lp": self.lp,
        }


@dataclass
class SanitizeReport:
    algorithm: str
    steps: list = field(default_factory=list)
    hidden_by: dict = field(default_factory=dict)
    header: dict = field(default_factory=dict)

    @property
    def removed_utility(self) -> int:
        return sum(s.removed_utility for s in self.steps)

    def edited_tids(self) -> set:
        return {s.tid for s in self.steps}

    def to_jsonl(self) -> str:
        lines = [{"type": "header", "algorithm": self.algorithm, **self.header}]
        lines.extend(s.as_dict() for s in self.steps)
        lines.extend({"type": "hidden", "itemset": list(k), "reason": v.value} for k, v in self.hidden_by.items())
        return "".join(json.dumps(obj, sort_keys=True) + "\n" for obj in lines)

    @classmethod
    def from_jsonl(cls, text: str) -> "SanitizeReport":
        report = cls(algorithm="")
        for line in text.splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            kind = obj.pop("type")
            if kind == "header":
                report.algorithm = obj.pop("algorithm")
                report.header = obj
            elif kind == "edit":
                obj["itemset"] = tuple(obj["itemset"])
                obj["action"] = Action(obj["action"])
                report.steps.append(EditStep(**obj))
            elif kind == "hidden":
                report.hidden_by[tuple(obj["itemset"])] = HideReason(obj["reason"])
            else:
                raise ValueError(f"unknown record type {kind!r}")
        return report


def replay(dataset: Dataset, report: SanitizeReport) -> Dataset:
    """Apply the edits of ``report`` to a copy of ``dataset``."""
    out = dataset.copy()
    for step in report.steps:
        if step.action is Action.DELETE:
            out.delete_item(step.tid, step.item)
        else:
            out.reduce_quantity(step.tid, step.item, step.quantity)
    return out


def build_sisl(dataset: Dataset, itemset) -> SISL:
    itemset = make_itemset(itemset)
    eu = dataset.utilities
    tids, utilities = [], {}
    for tid, row in enumerate(dataset.transactions, start=1):
        if all(i in row for i in itemset):
            tids.append(tid)
            utilities[tid] = sum(row[i] * eu[i] for i in itemset)
    if not tids:
        raise EmptySupportError(f"itemset {itemset} occurs in no transaction")
    n = len(dataset)
    return SISL(itemset, sum(utilities.values()), tids, utilities, max_period(tids, n), n)


def build_sil(dataset: Dataset, itemset, item_periods=None) -> list:
    """SIL rows ordered by (tid, item).

    ``item_periods`` may supply precomputed item maximum periods.
    """
    itemset = make_itemset(itemset)
    n = len(dataset)
    if item_periods is None:
        item_periods = {i: max_period(occurrences(dataset, (i,)), n) for i in itemset}
    eu = dataset.utilities
    rows = []
    for tid, row in enumerate(dataset.transactions, start=1):
        if all(i in row for i in itemset):
            rows.extend(SILRow(tid, i, row[i] * eu[i], row[i], item_periods[i]) for i in itemset)
    if not rows:
        raise EmptySupportError(f"itemset {itemset} occurs in no transaction")
    return rows


def select_victim_transaction(sisl: SISL) -> int:
    """Tid where the itemset has the highest utility; ties go to the smaller tid."""
    if not sisl.tids:
        raise EmptySupportError(f"itemset {sisl.itemset} has no supporting transaction")
    return min(sisl.tids, key=lambda t: (-sisl.utilities[t], t))


def select_victim_item(rows, policy) -> int:
    """Item with the extreme item period; ties go to larger utility, then smaller id."""
    policy = VictimPolicy(policy)
    rows = list(rows)
    if not rows:
        raise ValueError("no SIL rows to choose from")
    sign = -1 if policy is VictimPolicy.MAX_PERIOD else 1
    return min(rows, key=lambda r: (sign * r.mp, -r.iu, r.item)).item


def required_reduction_units(du: int, eu: int) -> int:
    """Smallest quantity cut ``dq`` with ``dq * eu > du``."""
    if du < 0 or eu < 1:
        raise ValueError("need du >= 0 and eu >= 1")
    return du // eu + 1


class _Ledgers:
    """SISL/SIL bookkeeping for all sensitive itemsets over one dataset."""

    def __init__(self, dataset: Dataset, itemsets):
        self.dataset = dataset
        self.n = len(dataset)
        members = sorted({i for s in itemsets for i in s})
        self.item_tids = {i: [] for i in members}
        for tid, row in enumerate(dataset.transactions, start=1):
            for i in members:
                if i in row:
                    self.item_tids[i].append(tid)
        self.mp = {i: max_period(t, self.n) for i, t in self.item_tids.items()}
        self.sisl = {}
        self.sil = {}
        self.containing = {i: [] for i in members}
        for s in itemsets:
            self.sisl[s] = build_sisl(dataset, s)
            table = {}
            for r in build_sil(dataset, s, self.mp):
                table.setdefault(r.tid, {})[r.item] = r
            self.sil[s] = table
            for i in s:
                self.containing[i].append(s)

    def delete(self, tid: int, item: int, live) -> None:
        remove_tid(self.item_tids[item], tid)
        mp = self.mp[item] = max_period(self.item_tids[item], self.n)
        for s in self.containing[item]:
            if s not in live:
                continue
            sisl = self.sisl[s]
            if tid in sisl.utilities:
                sisl.drop(tid)
                del self.sil[s][tid]
            for rows in self.sil[s].values():
                rows[item].mp = mp

    def reduce(self, tid: int, item: int, dq: int, live) -> None:
        amount = dq * self.dataset.utilities[item]
        for s in self.containing[item]:
            if s not in live:
                continue
            sisl = self.sisl[s]
            if tid in sisl.utilities:
                sisl.utilities[tid] -= amount
                sisl.su -= amount
                row = self.sil[s][tid][item]
                row.cnt -= dq
                row.iu -= amount

    def check(self, s) -> None:
        sisl = self.sisl[s]
        if sisl.su != sum(sisl.utilities.values()) or list(sisl.utilities) != sisl.tids:
            raise InvariantError(f"SISL of {s} is internally inconsistent")
        if set(self.sil[s]) != set(sisl.tids):
            raise InvariantError(f"SIL and SISL of {s} disagree on supporting transactions")

    def verify(self, live) -> None:
        """Compare every live ledger with a from-scratch rebuild."""
        for s in live:
            fresh = build_sisl(self.dataset, s) if occurrences(self.dataset, s) else None
            sisl = self.sisl[s]
            if fresh is None:
                if sisl.tids:
                    raise InvariantError(f"SISL of {s} lists tids {sisl.tids} but the itemset no longer occurs")
                continue
            if (sisl.su, sisl.tid_utilities, sisl.lp) != (fresh.su, fresh.tid_utilities, fresh.lp):
                raise InvariantError(
                    f"SISL drift for {s}: have su={sisl.su} sup={sisl.sup} lp={sisl.lp}, "
                    f"recomputed su={fresh.su} sup={fresh.sup} lp={fresh.lp}"
                )
            have = sorted(r.astuple() for rows in self.sil[s].values() for r in rows.values())
            want = sorted(r.astuple() for r in build_sil(self.dataset, s))
            if have != want:
                raise InvariantError(f"SIL drift for {s}")


def _hide_reason(sisl: SISL, th: Thresholds, min_sup: Fraction):
    # support first: a deletion that also drops utility below minutil is
    # reported as removing the occurrence
    if sisl.sup == 0 or sisl.sup < min_sup:
        return HideReason.SUPPORT
    if sisl.lp > th.max_per:
        return HideReason.MAXPER
    if sisl.su < th.minutil:
        return HideReason.UTILITY
    return None


def processing_order(ledgers: _Ledgers, itemsets) -> list:
    """Longest first, then larger utility, then lexicographic."""
    return sorted(itemsets, key=lambda s: (-len(s), -ledgers.sisl[s].su, s))


def sanitize(dataset: Dataset, sensitive_itemsets, thresholds: Thresholds, policy=VictimPolicy.MAX_PERIOD,
             verify=False):
    """Hide ``sensitive_itemsets``; returns ``(sanitized_dataset, report)``.

    The input dataset is left untouched.  With ``verify=True`` every ledger
    is rebuilt from scratch after each edit and compared.
    """
    policy = VictimPolicy(policy)
    th = thresholds
    data = dataset.copy()
    itemsets = check_itemsets(sensitive_itemsets, data)
    led = _Ledgers(data, itemsets)
    order = processing_order(led, itemsets)
    min_sup = min_support_bound(len(data), th.max_avg)
    report = SanitizeReport(
        algorithm="mu-map" if policy is VictimPolicy.MAX_PERIOD else "mu-mip",
        header={"thresholds": th.as_dict(), "min_sup": str(min_sup), "order": [list(s) for s in order]},
    )
    live = set(order)
    eu = data.utilities

    for s in order:
        if s not in live:
            continue
        sisl = led.sisl[s]
        while True:
            reason = _hide_reason(sisl, th, min_sup)
            if reason is not None:
                live.discard(s)
                report.hidden_by[s] = reason
                break
            du = sisl.su - th.minutil
            tid = select_victim_transaction(sisl)
            rows = led.sil[s][tid]
            item = select_victim_item(rows.values(), policy)
            row = rows[item]
            if row.iu <= du:
                dq = row.cnt
            else:
                dq = required_reduction_units(du, eu[item])
            if dq >= row.cnt:
                removed = data.delete_item(tid, item)
                led.delete(tid, item, live)
                action = Action.DELETE
            else:
                removed = data.reduce_quantity(tid, item, dq)
                led.reduce(tid, item, dq, live)
                action = Action.REDUCE
            report.steps.append(EditStep(s, tid, item, action, dq, du, removed, sisl.su, sisl.sup, sisl.lp))
            led.check(s)
            if verify:
                led.verify(live)
            for other in [o for o in order if o in live and o != s]:
                reason = _hide_reason(led.sisl[other], th, min_sup)
                if reason is not None:
                    live.discard(other)
                    report.hidden_by[other] = reason

    missing = set(itemsets) - set(report.hidden_by)
    if missing:
        raise InvariantError(f"itemsets left unhidden: {sorted(missing)}")
    return data, report


class PeriodicSanitizer(TransformerMixin, BaseEstimator):
    """Hide sensitive itemsets while accounting for item periodicity.

    ``fit(X, sensitive_itemsets)`` builds the initial SISL/SIL ledgers;
    ``transform(X)`` returns a sanitized copy of ``X`` and stores the edit
    log in ``report_``.

    Parameters
    ----------
    minutil : int
    max_per : int
    max_avg : real
    policy : {"max_period", "min_period"}
        ``"max_period"`` is MU-MAP, ``"min_period"`` is MU-MIP.
    verify : bool, default=False
        Rebuild and compare every ledger after each edit.
    """

    def __init__(self, minutil=0, max_per=1, max_avg=1, policy="max_period", verify=False):
        self.minutil = minutil
        self.max_per = max_per
        self.max_avg = max_avg
        self.policy = policy
        self.verify = verify

    def _thresholds(self) -> Thresholds:
        return check_thresholds(self.minutil, 0, self.max_per, 0, self.max_avg)

    def fit(self, X, y=None):
        dataset = check_dataset(X)
        VictimPolicy(self.policy)
        self._thresholds()
        self.sensitive_itemsets_ = check_itemsets(y, dataset)
        led = _Ledgers(dataset, self.sensitive_itemsets_)
        self.sisl_ = led.sisl
        self.sil_ = {s: [r for rows in table.values() for r in rows.values()] for s, table in led.sil.items()}
        self.order_ = processing_order(led, self.sensitive_itemsets_)
        self.min_sup_ = min_support_bound(len(dataset), self.max_avg)
        return self

    def transform(self, X):
        check_is_fitted(self, "sensitive_itemsets_")
        dataset = check_dataset(X)
        out, self.report_ = sanitize(dataset, self.sensitive_itemsets_, self._thresholds(), self.policy,
                                     verify=self.verify)
        return out


def MUMAP(minutil=0, max_per=1, max_avg=1, verify=False) -> PeriodicSanitizer:
    return PeriodicSanitizer(minutil, max_per, max_avg, policy="max_period", verify=verify)


def MUMIP(minutil=0, max_per=1, max_avg=1, verify=False) -> PeriodicSanitizer:
    return PeriodicSanitizer(minutil, max_per, max_avg, policy="min_period", verify=verify)
