import json
import os

import pytest

from hedonic_pac.distributions import BoundedRandomDistribution
from hedonic_pac.harness import (
    BOUNDED_FAMILY,
    EPS_GRID,
    ExperimentConfig,
    check_bounded_claims,
    run_experiment,
    sample_size,
    table1_suite,
    trial_rng,
    wilson_interval,
)


def test_wilson_interval_behaviour():
    lo, hi = wilson_interval(90, 100)
    assert lo < 0.9 < hi
    assert wilson_interval(0, 0) == (0.0, 1.0)
    lo, hi = wilson_interval(200, 200)
    assert hi == 1.0 and lo > 0.97
    # a 172/200 run keeps 0.9 inside its interval; 170/200 does not
    assert wilson_interval(172, 200)[1] >= 0.9
    assert wilson_interval(170, 200)[1] < 0.9


def test_sample_size_formula():
    # ceil((1/0.3) * ln(100/0.1)) = 24
    assert sample_size(0.3, 0.1, 10) == 24
    assert sample_size(0.25, 0.1, 10, factor=2) == 56
    assert sample_size(0.25, 0.1, 10, factor=8) == 222


def test_trial_rng_deterministic_and_distinct():
    assert trial_rng(3, 5).random() == trial_rng(3, 5).random()
    assert trial_rng(3, 5).random() != trial_rng(3, 6).random()


def test_config_json_round_trip_and_unknown_fields():
    config = ExperimentConfig.from_json('{"experiment": "w-stability", "trials": 3}')
    assert config.trials == 3
    with pytest.raises(ValueError):
        ExperimentConfig.from_json('{"experiment": "x", "bogus": 1}')
    with pytest.raises(ValueError):
        ExperimentConfig("w-stability", trials=0)


def test_unknown_experiment_rejected():
    with pytest.raises(ValueError):
        run_experiment(ExperimentConfig("no-such-thing"))


def test_resolved_fills_defaults_without_clobbering():
    config = ExperimentConfig("w-stability", trials=7).resolved(trials=200, n=10)
    assert config.trials == 7
    assert config.n == 10


def test_experiment_csv_is_deterministic(tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    for out in (out1, out2):
        run_experiment(ExperimentConfig("w-stability", trials=5, seed=3, out=str(out)))
    assert out1.with_suffix(".csv").read_bytes() == out2.with_suffix(".csv").read_bytes()
    data = json.loads(out1.with_suffix(".json").read_text())
    assert data["aggregate"]["trials"] == 5


def test_parallel_trials_do_not_change_results(tmp_path):
    base = tmp_path / "serial"
    run_experiment(ExperimentConfig("br-consistency", trials=8, seed=1, out=str(base)))
    os.environ["HEDONIC_PAC_THREADS"] = "4"
    try:
        threaded = tmp_path / "threaded"
        run_experiment(ExperimentConfig("br-consistency", trials=8, seed=1, out=str(threaded)))
    finally:
        del os.environ["HEDONIC_PAC_THREADS"]
    assert base.with_suffix(".csv").read_bytes() == threaded.with_suffix(".csv").read_bytes()


def test_csv_schema_columns_fixed():
    report = run_experiment(ExperimentConfig("shattering"))
    header = report.to_csv().splitlines()[0]
    assert header == ("schema_version,experiment,trial,seed,n,m,"
                      "eps,delta,lam,metric,value,success")
    assert all(row["schema_version"] == 1 for row in report.rows)


def test_aggregate_recomputable_from_rows():
    report = run_experiment(ExperimentConfig("ea-consistency", trials=12, seed=2))
    successes = sum(1 for row in report.rows if row["success"])
    assert report.aggregate["successes"] == successes
    assert report.aggregate["success_fraction"] == successes / len(report.rows)


def test_bounded_claims_checker_on_one_distribution():
    lam, n, seed = BOUNDED_FAMILY[0]
    dist = BoundedRandomDistribution(n, lam, seed=seed)
    result = check_bounded_claims(dist, lam, EPS_GRID)
    assert result == {"sandwich": True, "event_bounds": True}


def test_bounded_claims_checker_spots_violations():
    # a skewed distribution defeats the lambda=1 sandwich
    dist = BoundedRandomDistribution(6, 4, seed=0)
    result = check_bounded_claims(dist, 1, EPS_GRID)
    assert not result["sandwich"]


def test_table1_suite_small_run():
    report = table1_suite(trials=10, seed=0)
    assert len(report.rows) == 5
    assert report.passed
    cells = [row["metric"] for row in report.rows]
    assert "anonymous:stabilizable=no" in cells
    assert "bottom-responsive:learnable=no" in cells
