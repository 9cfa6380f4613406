"""Acceptance suite: one test per release criterion.

Each test prints a PASS/FAIL line with its wall time; run with
``pytest tests/test_acceptance.py -v -s`` to see them all. Thresholds and
tolerances are pinned here, not configurable.
"""

import time
from hedonic_pac.coalitions import iter_coalitions
from hedonic_pac.core import blocks, solve_core
from hedonic_pac.games import (
    anonymous_i1,
    anonymous_i2,
    anonymous_i2_stable_partition,
    anonymous_profile,
)
from hedonic_pac.harness import (
    ExperimentConfig,
    run_experiment,
    wilson_interval,
)
from hedonic_pac.learners import (
    anonymous_value_grid,
    pseudo_shatters,
    size_decreasing_witness,
)


def report(number: int, name: str, passed: bool, elapsed: float, budget: float,
           detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    extra = f"  [{detail}]" if detail else ""
    print(f"ACCEPTANCE {number}: {name}: {status} in {elapsed:.2f}s "
          f"(budget {budget:.0f}s){extra}")


def test_acceptance_1_anonymous_counterexample():
    start = time.perf_counter()
    result = solve_core(anonymous_profile(anonymous_i1()), 7)
    empty_ok = result.is_empty

    profile2 = anonymous_profile(anonymous_i2())
    pi = anonymous_i2_stable_partition()
    checked = [blocks(s, pi, profile2) for s in iter_coalitions(7)]
    stable_ok = len(checked) == 127 and not any(checked)

    elapsed = time.perf_counter() - start
    passed = empty_ok and stable_ok and elapsed < 10
    report(1, "anonymous counterexample (empty core + certified twin)",
           passed, elapsed, 10,
           f"I1 empty={empty_ok}, I2 blockers={sum(checked)}/127")
    assert empty_ok
    assert stable_ok
    assert elapsed < 10


def test_acceptance_2_consistency_suites():
    start = time.perf_counter()
    br = run_experiment(ExperimentConfig("br-consistency", n=8, m=50,
                                         trials=200, seed=11))
    ea = run_experiment(ExperimentConfig("ea-consistency", n=8, m=50,
                                         trials=200, seed=12))
    elapsed = time.perf_counter() - start
    br_ok = br.aggregate["successes"] == 200
    ea_ok = ea.aggregate["successes"] == 200
    passed = br_ok and ea_ok and elapsed < 30
    report(2, "stabilizer consistency suites (200/200 each)", passed, elapsed, 30,
           f"bottom-responsive {br.aggregate['successes']}/200, "
           f"enemies-aversion {ea.aggregate['successes']}/200")
    assert br_ok and ea_ok
    assert elapsed < 30


def test_acceptance_3_w_games_stabilization():
    start = time.perf_counter()
    result = run_experiment(ExperimentConfig("w-stability", n=10, eps=0.3,
                                             delta=0.1, lam=1, trials=200, seed=0))
    elapsed = time.perf_counter() - start
    successes = result.aggregate["successes"]
    fraction = result.aggregate["success_fraction"]
    lo, hi = wilson_interval(successes, 200)
    # pass if the observed fraction meets 0.9 or its 95% CI still covers it
    passed_stat = fraction >= 0.9 or hi >= 0.9
    assert result.rows[0]["m"] == 24  # ceil((1/0.3) ln(100/0.1))
    passed = passed_stat and elapsed < 120
    report(3, "pairing stabilizer eps-PAC success rate", passed, elapsed, 120,
           f"{successes}/200 trials below eps, CI [{lo:.3f}, {hi:.3f}]")
    assert passed_stat
    assert elapsed < 120


def test_acceptance_4_w_games_estimation():
    start = time.perf_counter()
    result = run_experiment(ExperimentConfig("w-estimate", n=10, eps=0.25,
                                             delta=0.1, lam=1, trials=200, seed=0))
    elapsed = time.perf_counter() - start
    fraction = result.aggregate["success_fraction"]
    passed = fraction >= 0.9 and elapsed < 60
    report(4, "pairwise estimates are eps-estimates for all players",
           passed, elapsed, 60,
           f"fraction {fraction:.3f} at m={result.rows[0]['m']}")
    assert fraction >= 0.9
    assert elapsed < 60


def test_acceptance_5_bounded_distribution_bounds():
    start = time.perf_counter()
    result = run_experiment(ExperimentConfig("bounded-dist-bounds"))
    elapsed = time.perf_counter() - start
    ok = result.aggregate["successes"] == result.aggregate["rows"] == 20
    passed = ok and elapsed < 120
    report(5, "probability sandwich + event lower bounds (exact, 20 dists)",
           passed, elapsed, 120,
           f"{result.aggregate['successes']}/20 distributions")
    assert ok
    assert elapsed < 120


def test_acceptance_6_hcn_equivalence():
    start = time.perf_counter()
    result = run_experiment(ExperimentConfig("hcn-equivalence", n=8,
                                             trials=50, seed=6))
    elapsed = time.perf_counter() - start
    ok = result.aggregate["successes"] == result.aggregate["rows"] == 250
    passed = ok and elapsed < 60
    report(6, "net conversions match native evaluators exactly", passed,
           elapsed, 60, f"{result.aggregate['successes']}/250 instance-class rows")
    assert ok
    assert elapsed < 60


def test_acceptance_7_learner_consistency():
    start = time.perf_counter()
    result = run_experiment(ExperimentConfig("learner-consistency", n=8,
                                             trials=100, seed=7))
    elapsed = time.perf_counter() - start
    ok = result.aggregate["successes"] == result.aggregate["rows"] == 600
    passed = ok and elapsed < 120
    report(7, "every learner consistent on 100 random instance/sample pairs",
           passed, elapsed, 120,
           f"{result.aggregate['successes']}/600 learner rows")
    assert ok
    assert elapsed < 120


def test_acceptance_8_shattering_facts():
    start = time.perf_counter()
    pairs, family = size_decreasing_witness(5, player=0)
    witness_ok = len(pairs) == 6 and pseudo_shatters(family, pairs)

    refuted = True
    n = 7
    for k in range(2, n):
        same_size = [c for c in range(1, 1 << n) if c.bit_count() == k]
        for a in range(len(same_size)):
            for b in range(a + 1, len(same_size)):
                s1, s2 = same_size[a], same_size[b]
                if s1 & s2 and pseudo_shatters(anonymous_value_grid(n, (0, 1)),
                                               [(s1, 0), (s2, 0)]):
                    refuted = False
    elapsed = time.perf_counter() - start
    passed = witness_ok and refuted and elapsed < 30
    report(8, "shattering witness + anonymous no-shatter refutation",
           passed, elapsed, 30,
           f"witness 2^{len(pairs)} labelings, refutation over all same-size pairs")
    assert witness_ok
    assert refuted
    assert elapsed < 30


def test_acceptance_9_exact_regime_zero_blocking():
    start = time.perf_counter()
    result = run_experiment(ExperimentConfig("w-exact", n=8, eps=0.1,
                                             trials=20, seed=9))
    elapsed = time.perf_counter() - start
    ok = result.aggregate["successes"] == result.aggregate["rows"] == 20
    passed = ok and elapsed < 30
    report(9, "all-pairs samples give partitions no coalition blocks",
           passed, elapsed, 30, f"{result.aggregate['successes']}/20 games")
    assert ok
    assert elapsed < 30
