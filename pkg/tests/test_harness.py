import csv
import io
from dataclasses import replace

import pytest

from phuihide import ConfigError, InvariantError, RunConfig, Thresholds, mine_phuis, run_pipeline, select_sensitive
from phuihide.harness import ALGORITHMS, SEP_CONVENTION, SWEEP_COLUMNS, selection_size, sweep, sweep_csv
from phuihide.io import generate_synthetic


@pytest.fixture
def running_phuis(running, running_thresholds):
    return mine_phuis(running, running_thresholds)


@pytest.fixture
def running_config(data_dir, running_thresholds, tmp_path):
    return RunConfig(
        input=str(data_dir / "running_transactions.txt"),
        utable=str(data_dir / "running_utilities.txt"),
        thresholds=running_thresholds,
        sensitive_file=str(data_dir / "running_sensitive.txt"),
        algorithm="mu-map",
        out=str(tmp_path / "run"),
    )


def test_selection_regression(running_phuis):
    assert select_sensitive(running_phuis, 0.375, 1, "random") == [(1, 4), (1, 2, 9), (1, 9)]


def test_selection_everything(running_phuis):
    for seed in range(5):
        assert sorted(select_sensitive(running_phuis, 1.0, seed)) == [r.itemset for r in running_phuis]


def test_incremental_prefix(running_phuis):
    small = select_sensitive(running_phuis, 0.25, 9, "incremental")
    large = select_sensitive(running_phuis, 0.5, 9, "incremental")
    assert len(small) == 2 and len(large) == 4
    assert large[:2] == small


@pytest.mark.parametrize("sep, n, k", [(0.01, 8, 1), (0.0625, 8, 1), (0.1875, 8, 2), (0.05, 172, 9), (1, 3, 3)])
def test_selection_size(sep, n, k):
    assert selection_size(sep, n) == k


def test_selection_errors(running_phuis):
    with pytest.raises(ConfigError):
        select_sensitive([], 0.5, 0)
    for sep in (0, -0.1, 1.5):
        with pytest.raises(ConfigError):
            select_sensitive(running_phuis, sep, 0)


def test_running_pipeline(running_config):
    art = run_pipeline(running_config)
    remined = {r.itemset for r in art.pi_after}
    non_sensitive = {r.itemset for r in art.pi_before} - set(art.sensitive)
    assert remined == non_sensitive - set(art.metrics.mc_set)
    assert art.metrics.ac_set == [] and art.metrics.hf_set == []
    assert set(art.timings) == {"mine_seconds", "hide_seconds", "remine_seconds"}
    assert art.report.header["selection"]["source"] == "explicit"
    for path in art.paths.values():
        assert open(path).read()


def test_selection_header_records_sep_convention(running, running_thresholds):
    art = run_pipeline(RunConfig(dataset=running, thresholds=running_thresholds, sep=0.25, seed=3))
    assert art.report.header["selection"]["sep_convention"] == SEP_CONVENTION
    assert len(art.sensitive) == 2


def test_pipeline_is_deterministic(running_config, tmp_path):
    a = run_pipeline(running_config)
    b = run_pipeline(replace(running_config, out=str(tmp_path / "again")))
    for key, path in a.paths.items():
        if key == "timings":
            continue
        assert open(path, "rb").read() == open(b.paths[key], "rb").read(), key


@pytest.mark.parametrize("sep", [0, 1.5, None])
def test_bad_sep(running, running_thresholds, sep):
    with pytest.raises(ConfigError):
        run_pipeline(RunConfig(dataset=running, thresholds=running_thresholds, sep=sep))


def test_bad_algorithm_and_seed(running, running_thresholds):
    with pytest.raises(ConfigError):
        run_pipeline(RunConfig(dataset=running, thresholds=running_thresholds, algorithm="mu-max"))
    with pytest.raises(ConfigError):
        run_pipeline(RunConfig(dataset=running, thresholds=running_thresholds, seed=-1))
    with pytest.raises(ConfigError):
        run_pipeline(RunConfig(thresholds=running_thresholds))


def test_sensitive_itemset_must_be_a_phui(running, running_thresholds):
    with pytest.raises(ConfigError) as info:
        run_pipeline(RunConfig(dataset=running, thresholds=running_thresholds, sensitive=[(3,)]))
    assert info.value.stage == "select"


def test_parse_errors_carry_stage(tmp_path, running_thresholds):
    (tmp_path / "d.txt").write_text("1:x\n")
    (tmp_path / "u.txt").write_text("1 1\n")
    cfg = RunConfig(input=str(tmp_path / "d.txt"), utable=str(tmp_path / "u.txt"), thresholds=running_thresholds)
    with pytest.raises(Exception) as info:
        run_pipeline(cfg)
    assert info.value.stage == "parse"


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_empty_sensitive_set_is_a_no_op(running, running_thresholds, algorithm):
    art = run_pipeline(RunConfig(dataset=running, thresholds=running_thresholds, sensitive=[], algorithm=algorithm))
    m = art.metrics
    assert (m.hf_pct, m.mc_pct, m.ac_pct) == (0, 0, 0)
    assert m.ius == m.dus == m.dss == 1.0


def test_no_phuis_gives_degenerate_row(running):
    th = Thresholds(10**6, 1, 6, 1, 2)
    art = run_pipeline(RunConfig(dataset=running, thresholds=th, sep=0.5))
    assert art.pi_before == [] and art.sensitive == []
    assert art.metrics.ius == 1.0 and art.metrics.dus == 1.0


def test_prefix_truncation(running, running_thresholds):
    art = run_pipeline(RunConfig(dataset=running, thresholds=running_thresholds, sensitive=[], dataset_prefix=6))
    assert len(art.original) == 6


def test_sweep_shape():
    d = generate_synthetic(5, 60, 12, 4, 5, 10, 0.6)
    cfg = RunConfig(dataset=d, thresholds=Thresholds(int(d.total_utility() * 0.05), 1, 12, 1, 4), seed=2)
    values = [0.01, 0.02, 0.03, 0.04, 0.05, 0.06]
    rows = sweep(cfg, "sep", values)
    assert len(rows) == len(values) * len(ALGORITHMS)
    assert all(not r.get("error") for r in rows)
    parsed = list(csv.DictReader(io.StringIO(sweep_csv(rows))))
    assert tuple(parsed[0]) == SWEEP_COLUMNS
    assert len(parsed) == 30


def test_sweep_records_errors_in_row(running, running_thresholds):
    cfg = RunConfig(dataset=running, thresholds=running_thresholds, sep=0.5)
    rows = sweep(cfg, "maxPer", [6, 0], ["mu-map"])
    assert not rows[0].get("error")
    assert "ConfigError" in rows[1]["error"]


def test_sweep_prefix_and_minutil_axes(running, running_thresholds):
    cfg = RunConfig(dataset=running, thresholds=running_thresholds, sep=0.5)
    rows = sweep(cfg, "datasetPrefixSize", [5, 10], ["mu-map", "smau"])
    assert [r["n_transactions"] for r in rows] == [5, 5, 10, 10]
    rows = sweep(cfg, "minutil", [260, 400], ["mu-mip"])
    assert rows[0]["n_pi"] == 8 and rows[1]["n_pi"] == 2


def test_sweep_rejects_unknown_axis(running, running_thresholds):
    with pytest.raises(ConfigError):
        sweep(RunConfig(dataset=running, thresholds=running_thresholds), "phi", [1])
    with pytest.raises(ConfigError):
        sweep(RunConfig(dataset=running, thresholds=running_thresholds), "sep", [])


def test_hiding_failure_is_fatal(monkeypatch, running, running_thresholds):
    import phuihide.harness as harness

    def leaky(algorithm, dataset, sensitive, thresholds, pi_before, verify=False):
        out, report = harness.sanitize(dataset, [], thresholds)
        return out, report

    monkeypatch.setattr(harness, "run_sanitizer", leaky)
    with pytest.raises(InvariantError):
        run_pipeline(RunConfig(dataset=running, thresholds=running_thresholds, sensitive=[(1, 9)]))
