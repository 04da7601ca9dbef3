import numpy as np
import pytest
from sklearn.base import clone

from phuihide import (
    MUMAP,
    MUMIP,
    Dataset,
    EmptySupportError,
    SanitizeReport,
    Thresholds,
    mine_phuis,
    mine_phuis_bruteforce,
    replay,
    sanitize,
)
from phuihide.io import generate_synthetic
from phuihide.model import occurrences
from phuihide.sanitize import (
    Action,
    HideReason,
    SILRow,
    VictimPolicy,
    build_sil,
    build_sisl,
    required_reduction_units,
    select_victim_item,
    select_victim_transaction,
)

A, B, I = 1, 2, 9


def test_sisl_examples(running):
    abi = build_sisl(running, (A, B, I))
    assert (abi.su, abi.sup) == (405, 4)
    assert abi.utilities[8] == 139
    ai = build_sisl(running, (A, I))
    assert (ai.su, ai.sup, ai.lp) == (440, 5, 4)


def test_sisl_single_transaction():
    d = Dataset([{1: 1}, {}, {}], {1: 2})
    s = build_sisl(d, (1,))
    assert s.sup == 1 and s.lp == 2


def test_sisl_of_absent_itemset_raises(running):
    with pytest.raises(EmptySupportError):
        build_sisl(running, (6, 7, 8))


def test_sil_rows_at_t8(running):
    rows = [r.astuple() for r in build_sil(running, (A, B, I)) if r.tid == 8]
    assert rows == [(8, A, 56, 7, 3), (8, B, 63, 9, 2), (8, I, 20, 2, 4)]


def test_victim_transaction(running):
    assert select_victim_transaction(build_sisl(running, (A, B, I))) == 8
    edited = running.copy()
    edited.delete_item(8, I)
    ai = build_sisl(edited, (A, I))
    assert select_victim_transaction(ai) == 5
    assert ai.utilities[5] == 154


def test_victim_transaction_tie_goes_to_smaller_tid():
    d = Dataset([{1: 1}, {1: 2}, {1: 2}], {1: 1})
    assert select_victim_transaction(build_sisl(d, (1,))) == 2


def test_victim_item_policies(running):
    rows = [r for r in build_sil(running, (A, B, I)) if r.tid == 8]
    assert select_victim_item(rows, VictimPolicy.MAX_PERIOD) == I
    assert select_victim_item(rows, VictimPolicy.MIN_PERIOD) == B


def test_victim_item_tie_prefers_larger_utility():
    rows = [SILRow(1, 1, 5, 1, 3), SILRow(1, 2, 9, 1, 3), SILRow(1, 3, 9, 1, 3)]
    assert select_victim_item(rows, "max_period") == 2
    assert select_victim_item(rows, "min_period") == 2


@pytest.mark.parametrize("du, eu, expected", [(145, 10, 15), (140, 10, 15), (0, 5, 1), (9, 10, 1), (10, 10, 2)])
def test_required_reduction_units(du, eu, expected):
    dq = required_reduction_units(du, eu)
    assert dq == expected
    assert dq * eu > du >= (dq - 1) * eu


def test_worked_trace(running, running_thresholds, running_sensitive):
    out, report = sanitize(running, running_sensitive, running_thresholds, VictimPolicy.MAX_PERIOD, verify=True)
    steps = [(s.action, s.item, s.tid) for s in report.steps]
    assert steps == [(Action.DELETE, I, 8), (Action.DELETE, I, 5)]
    first = report.steps[0]
    assert (first.itemset, first.du, first.removed_utility, first.su, first.sup) == ((A, B, I), 145, 20, 266, 3)
    assert report.hidden_by == {s: HideReason.SUPPORT for s in running_sensitive}
    assert report.header["min_sup"] == "4"
    assert out.total_utility() == 1285 - 20 - 90
    assert running.total_utility() == 1285


def test_worked_trace_remined(running, running_thresholds, running_sensitive):
    out, _ = sanitize(running, running_sensitive, running_thresholds)
    after = {r.itemset for r in mine_phuis(out, running_thresholds)}
    assert after == {(1,), (1, 2), (1, 4), (1, 7)}
    assert not after & set(running_sensitive)


def test_min_period_policy(running, running_thresholds, running_sensitive):
    out, report = sanitize(running, running_sensitive, running_thresholds, VictimPolicy.MIN_PERIOD, verify=True)
    assert report.algorithm == "mu-mip"
    assert (report.steps[0].item, report.steps[0].tid) == (B, 8)
    after = {r.itemset for r in mine_phuis(out, running_thresholds)}
    assert not after & set(running_sensitive)


def test_empty_sensitive_list(running, running_thresholds):
    out, report = sanitize(running, [], running_thresholds)
    assert out == running
    assert report.steps == [] and report.hidden_by == {}


def test_single_reduce_hides_by_utility():
    d = Dataset([{1: 5, 2: 1}, {1: 5, 2: 1}], {1: 10, 2: 1})
    th = Thresholds(100, 0, 2, 0, 2)
    assert [r.itemset for r in mine_phuis_bruteforce(d, th)] == [(1,), (1, 2)]
    out, report = sanitize(d, [(1, 2)], th, verify=True)
    assert len(report.steps) == 1
    step = report.steps[0]
    assert (step.action, step.item, step.tid, step.quantity, step.du) == (Action.REDUCE, 1, 1, 1, 2)
    assert report.hidden_by == {(1, 2): HideReason.UTILITY}
    assert (1, 2) not in {r.itemset for r in mine_phuis_bruteforce(out, th)}


def test_unknown_sensitive_itemset_rejected(running, running_thresholds):
    with pytest.raises(EmptySupportError):
        sanitize(running, [(6, 7, 8)], running_thresholds)


def test_report_jsonl_round_trip(running, running_thresholds, running_sensitive):
    _, report = sanitize(running, running_sensitive, running_thresholds)
    text = report.to_jsonl()
    back = SanitizeReport.from_jsonl(text)
    assert back.steps == report.steps
    assert back.hidden_by == report.hidden_by
    assert back.to_jsonl() == text
    assert len(text.splitlines()) == 1 + 2 + 3


def test_replay(running, running_thresholds, running_sensitive):
    out, report = sanitize(running, running_sensitive, running_thresholds)
    assert replay(running, SanitizeReport.from_jsonl(report.to_jsonl())) == out


def _random_case(seed):
    rng = np.random.default_rng(seed)
    d = generate_synthetic(seed, int(rng.integers(8, 25)), int(rng.integers(4, 9)), float(rng.uniform(2, 4)), 6, 8,
                           float(rng.uniform(0, 1)))
    th = Thresholds(int(d.total_utility() * rng.uniform(0.01, 0.1)), 1, int(rng.integers(3, len(d) // 2 + 4)), 1,
                    int(rng.integers(2, 6)))
    return rng, d, th


@pytest.mark.parametrize("seed", range(60))
@pytest.mark.parametrize("policy", list(VictimPolicy))
def test_ledgers_stay_coherent_and_hide_everything(seed, policy):
    rng, d, th = _random_case(seed)
    pi = mine_phuis(d, th)
    if not pi:
        pytest.skip("no PHUIs for this draw")
    k = int(rng.integers(1, len(pi) + 1))
    spi = [pi[i].itemset for i in rng.choice(len(pi), size=k, replace=False)]
    out, report = sanitize(d, spi, th, policy, verify=True)
    after = {r.itemset for r in mine_phuis(out, th)}
    assert not after & set(spi)
    assert set(report.hidden_by) == set(spi)
    assert replay(d, report) == out
    for s in spi:
        assert len(occurrences(out, s)) <= len(occurrences(d, s))


def test_estimator_api(running, running_sensitive):
    est = MUMAP(minutil=260, max_per=6, max_avg=2, verify=True)
    assert est.get_params()["policy"] == "max_period"
    est.fit(running, running_sensitive)
    assert est.min_sup_ == 4
    assert est.order_ == [(A, B, I), (A, I), (B, I)]
    assert est.sisl_[(A, I)].su == 440
    out = est.transform(running)
    assert len(est.report_.steps) == 2
    assert out.total_utility() == 1175
    assert clone(est).get_params() == est.get_params()
    mip = MUMIP(minutil=260, max_per=6, max_avg=2).fit(running, running_sensitive)
    assert mip.get_params()["policy"] == "min_period"
    assert mip.fit_transform(running, running_sensitive) != running
