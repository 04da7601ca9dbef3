from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phuihide import ConfigError, Dataset, Thresholds
from phuihide.exceptions import AbsentItemError
from phuihide.model import (
    item_utility,
    itemset_utility,
    itemset_utility_in_transaction,
    make_itemset,
    max_period,
    min_support_bound,
    period_summary,
    satisfies,
    summarize_periods,
)

A, B, C, D_, E, F, G, H, I = range(1, 10)


def test_item_utility_examples(running):
    assert item_utility(running, A, 1) == 48
    assert item_utility(running, I, 1) == 20
    assert item_utility(Dataset([{1: 1}], {1: 1}), 1, 1) == 1


def test_item_utility_absent_raises(running):
    with pytest.raises(AbsentItemError):
        item_utility(running, A, 2)


def test_itemset_utility_in_transaction(running):
    assert itemset_utility_in_transaction(running, (A, I), 1) == 68
    assert itemset_utility_in_transaction(running, (A, I), 2) is None
    assert itemset_utility_in_transaction(running, (A, B, I), 8) == 139


def test_itemset_utility(running):
    assert itemset_utility(running, (A, I)) == 440
    assert itemset_utility(running, (A,)) == 312
    assert itemset_utility(running, (42,)) == 0


def test_transaction_utilities_match_table(running):
    tu = [running.transaction_utility(t) for t in range(1, 11)]
    assert tu == [171, 65, 80, 187, 169, 115, 70, 192, 96, 140]
    assert running.total_utility() == 1285


def test_period_summary_row_e(running):
    s = period_summary(running, (E,))
    assert s.occurrences == (1, 2, 4, 6, 9)
    assert s.periods == (1, 1, 2, 2, 3, 1)
    assert (s.max_per, s.min_per) == (3, 1)
    assert s.avg_per == Fraction(5, 3)
    assert round(float(s.avg_per), 2) == 1.67


def test_period_summary_row_h_drops_boundary_gaps(running):
    s = period_summary(running, (H,))
    assert s.occurrences == (1, 4, 7, 10)
    assert s.periods == (1, 3, 3, 3, 0)
    assert s.min_per == 3


def test_period_summary_agi(running):
    s = period_summary(running, (A, G, I))
    assert s.support == 4
    assert s.max_per == 4
    assert s.avg_per == 2


def test_summary_of_absent_itemset():
    s = summarize_periods([], 5)
    assert s.support == 0
    assert s.periods == (5,)
    assert s.max_per == 5


def test_single_occurrence_min_per_falls_back_to_max():
    s = summarize_periods([3], 10)
    assert s.periods == (3, 7)
    assert s.min_per == s.max_per == 7


@pytest.mark.parametrize("n, max_avg, expected", [(10, 2, 4), (10, 3, Fraction(7, 3))])
def test_min_support_bound(n, max_avg, expected):
    assert min_support_bound(n, max_avg) == expected


def test_min_support_bound_rejects_nonpositive():
    with pytest.raises(ConfigError):
        min_support_bound(10, 0)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(1, 40), max_avg=st.fractions(min_value=Fraction(1, 4), max_value=20), data=st.data())
def test_support_bound_equivalent_to_avg_period(n, max_avg, data):
    tids = sorted(data.draw(st.sets(st.integers(1, n), min_size=1)))
    s = summarize_periods(tids, n)
    assert (s.support >= min_support_bound(n, max_avg)) == (s.avg_per <= max_avg)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(1, 40), data=st.data())
def test_periods_sum_to_database_size(n, data):
    tids = sorted(data.draw(st.sets(st.integers(1, n))))
    s = summarize_periods(tids, n)
    assert sum(s.periods) == n
    assert len(s.periods) == len(tids) + 1
    assert s.max_per == max(s.periods) == max_period(tids, n)
    assert s.min_per <= s.max_per


def test_make_itemset_canonical():
    assert make_itemset([3, 1, 2]) == (1, 2, 3)
    with pytest.raises(ValueError):
        make_itemset([1, 1])
    with pytest.raises(ValueError):
        make_itemset([])


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset([], {1: 1})
    with pytest.raises(ValueError):
        Dataset([{1: 0}], {1: 1})
    with pytest.raises(ValueError):
        Dataset([{2: 1}], {1: 1})


def test_dataset_edits_and_copy(running):
    copy = running.copy()
    assert copy == running
    assert copy.reduce_quantity(8, I, 1) == 10
    assert copy.delete_item(8, I) == 10
    assert I not in copy.transaction(8)
    assert I in running.transaction(8)
    assert copy != running


def test_dataset_rejects_bad_edits(running):
    with pytest.raises(AbsentItemError):
        running.copy().delete_item(2, A)
    with pytest.raises(ValueError):
        running.copy().reduce_quantity(8, I, 3)
    with pytest.raises(IndexError):
        running.transaction(11)


def test_head(running):
    assert len(running.head(4)) == 4
    assert running.head(4).transaction(4) == running.transaction(4)


def test_thresholds_validation():
    assert Thresholds(0, 0, 1, 0, 1).min_avg == 0
    for bad in [dict(minutil=-1), dict(max_per=0), dict(max_avg=0), dict(min_avg=3, max_avg=2),
                dict(min_per=2, max_per=1), dict(minutil=1.5)]:
        with pytest.raises(ConfigError):
            Thresholds(**{**dict(minutil=1, min_per=1, max_per=2, min_avg=1, max_avg=2), **bad})


def test_satisfies_needs_an_occurrence():
    th = Thresholds(0, 0, 100, 0, 100)
    assert not satisfies(summarize_periods([], 3), 0, th)
    assert satisfies(summarize_periods([2], 3), 0, th)
