from pathlib import Path

import pytest

from phuihide import Thresholds
from phuihide.io import parse_itemsets, read_dataset

DATA = Path(__file__).parent / "data"

_criteria = {}


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def running():
    return read_dataset(DATA / "running_transactions.txt", "quantity", DATA / "running_utilities.txt")


@pytest.fixture
def running_thresholds():
    return Thresholds(minutil=260, min_per=1, max_per=6, min_avg=1, max_avg=2)


@pytest.fixture
def running_sensitive():
    return parse_itemsets((DATA / "running_sensitive.txt").read_text())


def pytest_runtest_logreport(report):
    number = getattr(report, "criterion", None)
    if number is None:
        return
    if report.when != "call" and not (report.failed or report.skipped):
        return
    outcomes, _ = _criteria.setdefault(number, (set(), report.criterion_label))
    outcomes.add("FAIL" if report.failed else "SKIP" if report.skipped else "PASS")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is not None:
        rep.criterion = mark.args[0]
        rep.criterion_label = mark.args[1] if len(mark.args) > 1 else ""


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        outcomes, label = _criteria[number]
        outcome = next(o for o in ("FAIL", "PASS", "SKIP") if o in outcomes)
        partial = " (some checks skipped)" if outcome != "SKIP" and "SKIP" in outcomes else ""
        terminalreporter.write_line(f"criterion {number:>2}: {outcome}  {label}{partial}")
