import json
import math

import pytest

from hornphase.errors import EmptyCell, NotNormalized
from hornphase.experiments import (
    CSV_HEADER,
    ExperimentConfig,
    TrialRecord,
    cross_check,
    emit_report,
    parse_records_csv,
    parse_stats_json,
    run_sweep,
    run_trial,
    summarize,
    summarize_sweep,
    write_outputs,
)
from hornphase.generator import effective_rate
from hornphase.stats import TAIL, binned, ccdf_table, empirical_pmf, normal_ci, tv_distance


def test_tv_examples():
    assert tv_distance([0.5, 0.5], [0.5, 0.5]) == 0
    assert tv_distance({0: 1.0}, {1: 1.0}) == 1
    assert tv_distance([0.5, 0.5], [0.25, 0.75]) == 0.25


def test_tv_rejects_unnormalized():
    with pytest.raises(NotNormalized):
        tv_distance([0.5, 0.4], [1.0])
    with pytest.raises(NotNormalized):
        tv_distance([1.2, -0.2], [1.0])


def test_empirical_and_binned():
    pmf = empirical_pmf([0, 0, 1, 5], support=range(3))
    assert pmf == {0: 0.5, 1: 0.25, TAIL: 0.25}
    assert binned({0: 0.5, 1: 0.3, 2: 0.2}, [0, 1]) == pytest.approx({0: 0.5, 1: 0.3, TAIL: 0.2})
    assert ccdf_table([1, 2, 2, 3], [0, 2, 4]).tolist() == [1.0, 0.75, 0.0]


def test_normal_ci_example():
    p, lo, hi, se = normal_ci(10, 20)
    assert p == 0.5
    assert (hi - lo) / 2 == pytest.approx(1.96 * math.sqrt(0.25 / 20))
    assert round((hi - lo) / 2, 3) == 0.219


def test_sweep_record_count_and_rate():
    cfg = ExperimentConfig(n_values=[10], rates=[1.0], trials=2, master_seed=7)
    records = run_sweep(cfg)
    assert len(records) == 2
    assert [r.trial for r in records] == [0, 1]
    rate = effective_rate(10, 1024, "strict")
    assert all(r.m == 1024 and r.lam == rate.lam and r.c == 1.0 for r in records)


def test_sweep_byte_identical_across_workers():
    base = dict(n_values=[8, 10], rates=[0.5, 2.0], trials=25, master_seed=7)
    runs = [emit_report(run_sweep(ExperimentConfig(workers=w, **base)), None, "csv") for w in (1, 8, 1)]
    assert runs[0] == runs[1] == runs[2]


def test_env_overrides_workers(monkeypatch):
    monkeypatch.setenv("HORNPHASE_WORKERS", "4")
    cfg = ExperimentConfig(n_values=[6], rates=[1.0], trials=10)
    assert emit_report(run_sweep(cfg), None, "csv") == emit_report(
        [run_trial(6, 64, "strict", 0, t) for t in range(10)], None, "csv"
    )


def test_zero_clause_cell_is_always_sat():
    records = run_sweep(ExperimentConfig(n_values=[12], rates=[0], rate_mode="m", trials=30))
    stats = summarize(records)
    assert stats.sat_fraction == 1.0
    assert stats.hist_sat == {0: 30}


def test_failed_trials_are_recorded():
    cfg = ExperimentConfig(n_values=[12], rates=[1.0], trials=3, memory_budget=100)
    records = run_sweep(cfg)
    assert [r.status for r in records] == ["ERROR"] * 3
    with pytest.raises(EmptyCell):
        summarize(records)
    assert b"ERROR" in emit_report(records, None, "csv")


def test_summarize_empty():
    with pytest.raises(EmptyCell):
        summarize([])


def test_summary_histograms_sum_to_counts():
    records = run_sweep(ExperimentConfig(n_values=[14], rates=[1.0], trials=300, master_seed=3))
    s = summarize(records)
    assert sum(s.hist_sat.values()) == s.sat_count
    assert sum(s.hist_unsat.values()) == s.trials - s.sat_count
    assert s.ci_hi - s.ci_lo == pytest.approx(2 * 1.96 * s.se)
    assert 0 <= s.tv_rho <= 1 and set(s.tv_eta) == {"sqrt", "linear"}
    assert s.lambda_limit == 2.0


def test_csv_round_trip_and_header():
    records = run_sweep(ExperimentConfig(n_values=[6], rates=[1.5], trials=1))
    data = emit_report(records, None, "csv")
    lines = data.decode().splitlines()
    assert lines[0] == ",".join(CSV_HEADER) == "n,m,c,lambda,kind,trial,seed,status,iterations,final_stage,ms"
    assert len(lines) == 2
    assert parse_records_csv(data) == records


def test_csv_reals_keep_full_precision():
    r = TrialRecord(n=3, m=1, c=0.1, lam=1 / 3, kind="strict", trial=0, seed=1, status="SAT", iterations=0, final_stage=3)
    assert "0.33333333333333331" in emit_report([r], None, "csv").decode()
    assert parse_records_csv(emit_report([r], None, "csv"))[0].lam == 1 / 3


def test_json_round_trip():
    records = run_sweep(ExperimentConfig(n_values=[8, 9], rates=[1.0], trials=40, master_seed=2))
    stats = summarize_sweep(records)
    assert parse_stats_json(emit_report(records, stats, "json")) == stats
    payload = json.loads(emit_report(records, stats, "json"))
    assert len(payload["cells"]) == 2


def test_plot_rows():
    records = run_sweep(ExperimentConfig(n_values=[8], rates=[0.5, 1.0], trials=10))
    text = emit_report(records, summarize_sweep(records), "plot").decode().splitlines()
    assert text[0].startswith("#")
    assert len(text) == 3
    assert all(len(row.split()) == 7 for row in text[1:])


def test_config_json(tmp_path):
    cfg = ExperimentConfig(n_values=[10], rates=[1.0], trials=5, master_seed=9, outputs={"csv": str(tmp_path / "r.csv")})
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    again = ExperimentConfig.from_json(path)
    assert again == cfg
    records = run_sweep(again)
    write_outputs(again, records, summarize_sweep(records))
    assert (tmp_path / "r.csv").read_bytes() == emit_report(records, None, "csv")
    with pytest.raises((TypeError, ValueError)):
        ExperimentConfig.from_dict({"n_values": [3], "rates": [1], "bogus": 1})


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(n_values=[10], rates=[1.0], trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig(n_values=[10], rates=[1.0], rate_mode="q")


def test_cross_check_small():
    report = cross_check(300, master_seed=4)
    assert report.ok, report.disagreements
    assert 0 < report.sat_count < 300


def test_monotone_trend_n18():
    cs = [0.05, 0.25, 0.5, 1, 2, 4]
    cfg = ExperimentConfig(n_values=[18], rates=cs, trials=120, master_seed=18)
    stats = summarize_sweep(run_sweep(cfg))
    fractions = [s.sat_fraction for s in stats]
    assert [s.c for s in stats] == pytest.approx(cs, rel=1e-4)
    assert fractions[0] >= 0.95 and fractions[-1] <= 0.05
    for a, b in zip(stats, stats[1:]):
        assert b.ci_lo <= a.ci_hi  # non-increasing up to interval overlap
