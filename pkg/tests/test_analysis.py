"""Statistics, fits, experiment drivers, the collision baseline, benchmarks."""

from __future__ import annotations

import io
import itertools
import json
import math

import numpy as np
import pytest

from simonlab.analysis import (
    BENCH_CSV_HEADER,
    EXPERIMENT_CSV_HEADER,
    CollisionTrial,
    ExperimentRow,
    FitError,
    ShotEstimate,
    benchmark_solvers,
    classical_collision_trial,
    expected_shots_both,
    fit_success_curve,
    prob_both,
    run_penalty_experiment,
    run_success_sweep,
    write_bench_csv,
    write_experiment_csv,
    write_fit_json,
)
from simonlab.sampler import AnnealSchedule

FAST = AnnealSchedule(sweeps=60)


def _prob_both_by_enumeration(p_z, p_zp, k):
    """Exact reference: sum over all 3^k shot-outcome sequences."""
    total = 0.0
    probs = (p_z, p_zp, 1.0 - p_z - p_zp)
    for seq in itertools.product((0, 1, 2), repeat=k):
        if 0 in seq and 1 in seq:
            weight = 1.0
            for outcome in seq:
                weight *= probs[outcome]
            total += weight
    return total


def test_prob_both_against_enumeration():
    for p_z, p_zp in [(0.5, 0.5), (0.3, 0.2), (0.1, 0.6), (0.25, 0.25)]:
        for k in (1, 2, 3, 5):
            exact = _prob_both_by_enumeration(p_z, p_zp, k)
            assert prob_both(p_z, p_zp, k) == pytest.approx(exact, abs=1e-12)


def test_prob_both_special_values():
    assert prob_both(0.5, 0.5, 2) == 0.5
    assert prob_both(0.5, 0.5, 1) == 0.0
    assert prob_both(0.3, 0.2, 1) == 0.0


def test_prob_both_monotone_in_k_with_limit_one():
    values = [prob_both(0.2, 0.3, k) for k in range(1, 120)]
    # nondecreasing up to float summation noise
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
    assert values[-1] == pytest.approx(1.0, abs=1e-6)
    assert all(0.0 <= v <= 1.0 for v in values)


def test_prob_both_symmetry():
    for k in (2, 7):
        assert prob_both(0.1, 0.4, k) == pytest.approx(
            prob_both(0.4, 0.1, k), abs=1e-12
        )


def test_prob_both_validation():
    with pytest.raises(ValueError):
        prob_both(0.0, 0.5, 2)
    with pytest.raises(ValueError):
        prob_both(0.6, 0.6, 2)
    with pytest.raises(ValueError):
        prob_both(0.3, 0.3, 0)


def test_expected_shots_values():
    assert expected_shots_both(0.5, 0.5) == pytest.approx(3.0)
    assert expected_shots_both(0.05, 0.05) == pytest.approx(30.0)
    assert expected_shots_both(0.2, 0.3) == expected_shots_both(0.3, 0.2)
    with pytest.raises(ValueError):
        expected_shots_both(0.0, 0.5)


def test_expected_shots_monte_carlo():
    """Waiting-time simulation via the first-hit decomposition: first success
    arrives geometrically at rate p+p', then the missing state geometrically
    at its own rate."""
    rng = np.random.default_rng(2024)
    trials = 100_000
    for p_z, p_zp in [(0.5, 0.5), (0.3, 0.2), (0.1, 0.1)]:
        first = rng.geometric(p_z + p_zp, size=trials)
        hit_a_first = rng.random(trials) < p_z / (p_z + p_zp)
        second_rate = np.where(hit_a_first, p_zp, p_z)
        waits = first + rng.geometric(second_rate)
        se = waits.std(ddof=1) / math.sqrt(trials)
        assert abs(waits.mean() - expected_shots_both(p_z, p_zp)) < 3 * se


def test_shot_estimate_wrapper():
    est = ShotEstimate(0.25, 0.25)
    assert est.prob_both_at(2) == prob_both(0.25, 0.25, 2)
    assert est.expected_shots_both == pytest.approx(expected_shots_both(0.25, 0.25))
    with pytest.raises(ValueError):
        ShotEstimate(0.9, 0.2)


def test_fit_recovers_planted_exponential():
    ns = np.arange(5, 51, 5)
    rates = 0.8 * np.exp(-0.1 * ns)
    fit = fit_success_curve(ns, rates, "exponential")
    assert fit.coefficient == pytest.approx(-0.1, abs=1e-9)
    assert fit.amplitude == pytest.approx(0.8, abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.points == len(ns)


def test_fit_recovers_planted_gaussian():
    ns = np.arange(5, 51, 5)
    rates = np.exp(-(ns ** 2) / 200.0)
    fit = fit_success_curve(ns, rates, "gaussian")
    assert fit.coefficient == pytest.approx(-1 / 200, abs=1e-9)
    assert fit.amplitude == pytest.approx(1.0, abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)


def test_fit_model_ranking():
    ns = np.arange(5, 51, 5)
    exp_rates = np.exp(-0.12 * ns)
    gauss_rates = np.exp(-(ns ** 2) / 300.0)
    assert (
        fit_success_curve(ns, exp_rates, "exponential").r_squared
        > fit_success_curve(ns, exp_rates, "gaussian").r_squared
    )
    assert (
        fit_success_curve(ns, gauss_rates, "gaussian").r_squared
        > fit_success_curve(ns, gauss_rates, "exponential").r_squared
    )


def test_fit_predict_inverts_model():
    ns = [4, 8, 12, 16]
    rates = [0.5 * math.exp(-0.2 * n) for n in ns]
    fit = fit_success_curve(ns, rates, "exponential")
    for n, rate in zip(ns, rates):
        assert fit.predict(n) == pytest.approx(rate, rel=1e-9)


def test_fit_drops_zero_rows():
    ns = [5, 10, 15, 20]
    rates = [0.5, 0.0, 0.125, 0.0625]
    fit = fit_success_curve(ns, rates, "exponential")
    assert fit.points == 3


def test_fit_errors():
    with pytest.raises(FitError):
        fit_success_curve([5, 10, 15], [0.0, 0.0, 0.0])
    with pytest.raises(FitError):
        fit_success_curve([5, 10], [0.3, 0.0])
    with pytest.raises(ValueError):
        fit_success_curve([5, 10], [0.3, 0.2], "cubic")
    with pytest.raises(ValueError):
        fit_success_curve([5, 10], [0.3])
    with pytest.raises(ValueError):
        fit_success_curve([5, 10], [0.3, -0.1])


def test_experiment_empty_sizes():
    assert run_penalty_experiment([], shots=10, schedule=FAST) == []


def test_experiment_rejects_unknown_scheme():
    with pytest.raises(ValueError):
        run_penalty_experiment([3], schemes=("zero",), shots=10, schedule=FAST)
    with pytest.raises(ValueError):
        run_penalty_experiment([3], shots=0, schedule=FAST)
    with pytest.raises(ValueError):
        run_penalty_experiment([3], shots=10, retries=0, schedule=FAST)


def test_experiment_row_grid_and_order():
    rows = run_penalty_experiment(
        [4, 3], schemes=("uniform", "balanced"), shots=60, schedule=FAST, seed=5
    )
    assert [(r.n, r.scheme) for r in rows] == [
        (3, "balanced"), (3, "uniform"), (4, "balanced"), (4, "uniform"),
    ]
    for row in rows:
        assert row.shots == 60
        assert 0.0 <= row.p_z <= 1.0
        assert 0.0 <= row.p_zp <= 1.0
        assert row.wall_time_s > 0


def test_experiment_small_instance_sees_both():
    rows = run_penalty_experiment(
        [3], schemes=("balanced",), shots=100, schedule=AnnealSchedule(), seed=1
    )
    assert len(rows) == 1
    assert rows[0].both_seen


def test_experiment_is_seed_deterministic():
    kwargs = dict(schemes=("balanced", "random"), shots=40, schedule=FAST)
    a = run_penalty_experiment([3, 4], seed=7, **kwargs)
    b = run_penalty_experiment([3, 4], seed=7, **kwargs)
    c = run_penalty_experiment([3, 4], seed=8, **kwargs)
    strip = lambda rows: [(r.n, r.scheme, r.p_z, r.p_zp, r.both_seen) for r in rows]
    assert strip(a) == strip(b)
    assert strip(a) != strip(c)


def test_experiment_retries_change_failed_cells_only():
    # with retries allowed, a cell that already saw both states is untouched
    base = run_penalty_experiment(
        [3], schemes=("balanced",), shots=200, schedule=AnnealSchedule(), seed=0
    )
    retried = run_penalty_experiment(
        [3], schemes=("balanced",), shots=200, schedule=AnnealSchedule(), seed=0,
        retries=3,
    )
    assert base[0].both_seen
    assert (base[0].p_z, base[0].p_zp) == (retried[0].p_z, retried[0].p_zp)


def test_success_sweep_returns_rows_and_fits():
    result = run_success_sweep(
        [3, 4, 5], shots=150, schedule=AnnealSchedule(sweeps=120), seed=2
    )
    assert len(result.rows) == 3
    assert {row.scheme for row in result.rows} == {"balanced"}
    assert result.exponential.model_tag == "exponential"
    assert result.gaussian.model_tag == "gaussian"
    assert result.best_fit in (result.exponential, result.gaussian)


def test_success_sweep_needs_three_sizes():
    with pytest.raises(ValueError):
        run_success_sweep([3, 4], shots=10, schedule=FAST)


def test_collision_n2_case_analysis():
    """Only two outputs exist for four inputs, so a collision must land on
    query 2 or 3."""
    for seed in range(40):
        trial = classical_collision_trial(2, seed=seed)
        assert trial.queries in (2, 3)
        assert trial.period == (1, 1)


def test_collision_period_is_all_ones():
    for n in (3, 5, 8):
        for seed in (0, 1, 2):
            trial = classical_collision_trial(n, seed=seed)
            assert trial.period == (1,) * n
            assert trial.input_a != trial.input_b


def test_collision_query_growth():
    rng_seeds = range(300)
    medians = []
    for n in (8, 12, 16):
        counts = [classical_collision_trial(n, seed=s).queries for s in rng_seeds]
        medians.append(float(np.median(counts)))
    assert medians[0] < medians[1] < medians[2]


def test_collision_bounds():
    with pytest.raises(ValueError):
        classical_collision_trial(1, seed=0)
    with pytest.raises(ValueError):
        classical_collision_trial(31, seed=0)


def test_benchmark_empty_when_no_repetitions():
    assert benchmark_solvers([3, 4], repetitions=0) == []


def test_benchmark_rows_and_enumeration_cap():
    rows = benchmark_solvers(
        [3, 10], repetitions=2, solvers=("dp", "enumeration")
    )
    tags = [(r.n, r.solver_tag) for r in rows]
    # n=10 has 28 variables, beyond the default enumeration cap
    assert tags == [(3, "dp"), (3, "enumeration"), (10, "dp")]
    for row in rows:
        assert row.median_wall_time_s >= 0


def test_benchmark_rejects_unknown_solver():
    with pytest.raises(ValueError):
        benchmark_solvers([3], repetitions=1, solvers=("quantum",))


def test_benchmark_sampler_path():
    rows = benchmark_solvers(
        [3], repetitions=1, solvers=("sampler",),
        schedule=FAST, shots_block=50, max_shots=400,
    )
    assert [(r.n, r.solver_tag) for r in rows] == [(3, "sampler")]


def test_experiment_csv_header_exact():
    assert ",".join(EXPERIMENT_CSV_HEADER) == "n,scheme,p_z,p_zp,both_seen,shots,wall_time_s"
    row = ExperimentRow(
        n=3, scheme="balanced", p_z=0.5, p_zp=0.25, both_seen=True,
        shots=100, wall_time_s=0.125,
    )
    buf = io.StringIO()
    write_experiment_csv([row], buf, comment="cmdline")
    lines = buf.getvalue().splitlines()
    assert lines[0] == "# cmdline"
    assert lines[1] == "n,scheme,p_z,p_zp,both_seen,shots,wall_time_s"
    assert lines[2] == "3,balanced,0.5,0.25,1,100,0.125000"


def test_bench_csv_shape():
    rows = benchmark_solvers([3], repetitions=1, solvers=("dp",))
    buf = io.StringIO()
    write_bench_csv(rows, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(BENCH_CSV_HEADER)
    assert lines[1].startswith("3,dp,")


def test_fit_json_payload():
    fit = fit_success_curve([4, 8, 12], [0.4, 0.2, 0.1], "exponential")
    buf = io.StringIO()
    write_fit_json([fit], buf, meta={"source": "unit"})
    doc = json.loads(buf.getvalue())
    assert doc["meta"] == {"source": "unit"}
    entry = doc["fits"][0]
    assert entry["model"] == "exponential"
    assert len(entry["params"]) == 2
    assert 0.0 <= entry["r_squared"] <= 1.0


def test_collision_trial_record_fields():
    trial = CollisionTrial(n=3, queries=4, input_a=0b001, input_b=0b110)
    assert trial.period == (1, 1, 1)
