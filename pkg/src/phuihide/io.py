"""Text formats for transaction-utility databases and a seeded generator.

Two layouts are supported:

``quantity``
    One transaction per line as ``item:qty`` tokens, plus a separate utility
    table with ``item utility`` lines.  A blank line is an empty transaction.

``spmf``
    The SPMF utility layout ``i1 i2 ...:TU:u1 u2 ...``.  Item utilities are
    stored as quantities against an external utility of 1.  An empty
    transaction is written as ``:0:``.
"""

from __future__ import annotations

import enum
from pathlib import Path

import numpy as np

from .exceptions import ParseError
from .model import Dataset, make_itemset


class FormatKind(str, enum.Enum):
    QUANTITY = "quantity"
    SPMF_UTILITY = "spmf"


def _lines(text: str) -> list:
    text = text.replace("\r\n", "\n")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def _int(token: str, lineno: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"malformed {what} {token!r}", lineno) from None


def parse_utility_table(text: str) -> dict:
    table = {}
    for lineno, line in enumerate(_lines(text), start=1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 2:
            raise ParseError(f"expected 'item utility', got {line!r}", lineno)
        item = _int(parts[0], lineno, "item")
        eu = _int(parts[1], lineno, "utility")
        if item < 0:
            raise ParseError(f"negative item id {item}", lineno)
        if eu < 1:
            raise ParseError(f"external utility must be positive, got {eu}", lineno)
        if item in table:
            raise ParseError(f"duplicate utility entry for item {item}", lineno)
        table[item] = eu
    return table


def parse_quantity_format(transactions_text: str, utility_table_text: str) -> Dataset:
    utilities = parse_utility_table(utility_table_text)
    rows = []
    for lineno, line in enumerate(_lines(transactions_text), start=1):
        row = {}
        for token in line.split():
            item_s, sep, qty_s = token.partition(":")
            if not sep:
                raise ParseError(f"expected 'item:qty', got {token!r}", lineno)
            item = _int(item_s, lineno, "item")
            qty = _int(qty_s, lineno, "quantity")
            if item < 0:
                raise ParseError(f"negative item id {item}", lineno)
            if qty <= 0:
                raise ParseError(f"quantity of item {item} must be positive, got {qty}", lineno)
            if item in row:
                raise ParseError(f"item {item} appears twice", lineno)
            if item not in utilities:
                raise ParseError(f"item {item} missing from the utility table", lineno)
            row[item] = qty
        rows.append(row)
    if not rows:
        raise ParseError("no transactions")
    return Dataset(rows, utilities)


def parse_spmf_utility_format(text: str) -> Dataset:
    rows = []
    utilities = {}
    for lineno, line in enumerate(_lines(text), start=1):
        stripped = line.strip()
        if stripped[:1] in ("#", "%", "@"):
            continue
        if not stripped:
            rows.append({})
            continue
        fields = stripped.split(":")
        if len(fields) != 3:
            raise ParseError(f"expected 'items:TU:utilities', got {line!r}", lineno)
        items = [_int(t, lineno, "item") for t in fields[0].split()]
        tu = _int(fields[1].strip(), lineno, "transaction utility")
        utils = [_int(t, lineno, "utility") for t in fields[2].split()]
        if len(items) != len(utils):
            raise ParseError(f"{len(items)} items but {len(utils)} utilities", lineno)
        row = {}
        for item, u in zip(items, utils):
            if item < 0:
                raise ParseError(f"negative item id {item}", lineno)
            if u <= 0:
                raise ParseError(f"utility of item {item} must be positive, got {u}", lineno)
            if item in row:
                raise ParseError(f"item {item} appears twice", lineno)
            row[item] = u
            utilities[item] = 1
        if sum(utils) != tu:
            raise ParseError(f"declared TU {tu} but utilities sum to {sum(utils)}", lineno)
        rows.append(row)
    if not rows:
        raise ParseError("no transactions")
    return Dataset(rows, utilities)


def write_dataset(dataset: Dataset, kind=FormatKind.QUANTITY) -> str:
    """Canonical text of the transactions (the utility table is written separately)."""
    kind = FormatKind(kind)
    out = []
    if kind is FormatKind.QUANTITY:
        for row in dataset.transactions:
            out.append(" ".join(f"{i}:{q}" for i, q in sorted(row.items())))
    else:
        eu = dataset.utilities
        for row in dataset.transactions:
            items = sorted(row)
            utils = [row[i] * eu[i] for i in items]
            out.append(f"{' '.join(map(str, items))}:{sum(utils)}:{' '.join(map(str, utils))}")
    return "".join(line + "\n" for line in out)


def write_utility_table(dataset: Dataset) -> str:
    return "".join(f"{item} {eu}\n" for item, eu in sorted(dataset.utilities.items()))


def read_dataset(path, kind=FormatKind.QUANTITY, utility_table=None) -> Dataset:
    kind = FormatKind(kind)
    text = Path(path).read_text(encoding="utf-8")
    if kind is FormatKind.SPMF_UTILITY:
        return parse_spmf_utility_format(text)
    if utility_table is None:
        raise ParseError("the quantity format needs a utility table file")
    return parse_quantity_format(text, Path(utility_table).read_text(encoding="utf-8"))


def save_dataset(dataset: Dataset, path, kind=FormatKind.QUANTITY, utility_table=None) -> None:
    kind = FormatKind(kind)
    Path(path).write_text(write_dataset(dataset, kind), encoding="utf-8")
    if kind is FormatKind.QUANTITY and utility_table is not None:
        Path(utility_table).write_text(write_utility_table(dataset), encoding="utf-8")


def parse_itemsets(text: str) -> list:
    """One itemset per line, items separated by whitespace; ``#`` starts a comment."""
    out = []
    for lineno, line in enumerate(_lines(text), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            out.append(make_itemset(_int(t, lineno, "item") for t in line.split()))
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    return out


def write_itemsets(itemsets) -> str:
    return "".join(" ".join(map(str, s)) + "\n" for s in itemsets)


def generate_synthetic(
    seed,
    n_transactions,
    n_items,
    avg_len,
    max_qty,
    max_eu,
    periodicity_bias=0.0,
    *,
    stride=2,
    planted_item=1,
    min_qty=1,
    min_eu=1,
) -> Dataset:
    """Random quantitative database, deterministic for a given ``seed``.

    Transaction lengths are ``1 + Poisson(avg_len - 1)`` clipped to
    ``[1, n_items]``.  Items are ids ``1..n_items``.  At every
    ``stride``-th slot (tids 1, 1+stride, ...) the ``planted_item`` is
    added with probability ``periodicity_bias``.
    """
    for name, value in (("n_transactions", n_transactions), ("n_items", n_items), ("avg_len", avg_len),
                        ("max_qty", max_qty), ("max_eu", max_eu), ("stride", stride)):
        if value <= 0:
            raise ValueError(f"{name} must be positive")
    if not 0.0 <= periodicity_bias <= 1.0:
        raise ValueError("periodicity_bias must lie in [0, 1]")
    if not 1 <= min_qty <= max_qty or not 1 <= min_eu <= max_eu:
        raise ValueError("need 1 <= min_qty <= max_qty and 1 <= min_eu <= max_eu")
    if not 1 <= planted_item <= n_items:
        raise ValueError("planted_item must be one of the generated item ids")
    rng = np.random.default_rng(seed)
    ids = np.arange(1, n_items + 1)
    utilities = {int(i): int(rng.integers(min_eu, max_eu + 1)) for i in ids}
    rows = []
    for pos in range(n_transactions):
        length = int(min(n_items, 1 + rng.poisson(max(avg_len - 1, 0))))
        chosen = {int(i) for i in rng.choice(ids, size=length, replace=False)}
        if pos % stride == 0 and rng.random() < periodicity_bias:
            chosen.add(planted_item)
        rows.append({i: int(rng.integers(min_qty, max_qty + 1)) for i in sorted(chosen)})
    return Dataset(rows, utilities)
