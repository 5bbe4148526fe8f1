"""Success statistics and experiment drivers.

Covers the arithmetic around "how many shots until both ground states show
up", the penalty-scheme comparison and size-sweep experiments, log-space
scaling fits, a classical collision-query baseline for context, and a small
wall-clock benchmark harness.  Everything that draws randomness takes an
explicit seed and derives per-run streams from it, so row order never depends
on execution order.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from time import perf_counter
from typing import IO, Sequence

import numpy as np

from .exact import DEFAULT_ENUMERATION_CAP, solve_brute_force, solve_chain_dp
from .qubo import (
    Bits,
    OracleSpec,
    PenaltyConfig,
    QuboModel,
    build_qubo,
    predict_ground_pair,
)
from .sampler import AnnealSchedule, sample, success_stats

_MASK64 = (1 << 64) - 1

#: Penalty schemes meaningful in the comparison experiment (the zero scheme
#: never isolates a pair, so it is excluded here even though the builder
#: accepts it).
EXPERIMENT_SCHEMES = ("balanced", "random", "uniform")

EXPERIMENT_CSV_HEADER = ("n", "scheme", "p_z", "p_zp", "both_seen", "shots", "wall_time_s")
BENCH_CSV_HEADER = ("n", "solver_tag", "median_wall_time_s")

FIT_MODELS = ("exponential", "gaussian")

BENCH_SOLVERS = ("dp", "enumeration", "sampler")


class FitError(RuntimeError):
    """Not enough usable data points to fit a scaling curve."""


def _check_pair_probs(p_z: float, p_zp: float) -> None:
    if not (0.0 < p_z and 0.0 < p_zp):
        raise ValueError(
            "both probabilities must be positive; a zero-probability state is "
            "unreachable and the expected wait is infinite"
        )
    if p_z + p_zp > 1.0 + 1e-12:
        raise ValueError("p_z + p_zp cannot exceed 1 for disjoint outcomes")


def prob_both(p_z: float, p_zp: float, k: int) -> float:
    """Chance that k independent shots see both target states at least once.

    Inclusion-exclusion over the two "state missed in every shot" events:
    1 - (1-p_z)^k - (1-p_zp)^k + (1-p_z-p_zp)^k.
    """
    _check_pair_probs(p_z, p_zp)
    if k < 1:
        raise ValueError("k must be a positive integer")
    value = 1.0 - (1.0 - p_z) ** k - (1.0 - p_zp) ** k + (1.0 - p_z - p_zp) ** k
    return min(1.0, max(0.0, value))


def expected_shots_both(p_z: float, p_zp: float) -> float:
    """Expected number of shots until both target states have been seen.

    Waiting time to collect a two-coupon set: 1/p_z + 1/p_zp - 1/(p_z + p_zp).
    """
    _check_pair_probs(p_z, p_zp)
    return 1.0 / p_z + 1.0 / p_zp - 1.0 / (p_z + p_zp)


@dataclass(frozen=True)
class ShotEstimate:
    """Both-states statistics for one ground pair's hit probabilities."""

    p_z: float
    p_zp: float

    def __post_init__(self) -> None:
        _check_pair_probs(self.p_z, self.p_zp)

    def prob_both_at(self, k: int) -> float:
        return prob_both(self.p_z, self.p_zp, k)

    @property
    def expected_shots_both(self) -> float:
        return expected_shots_both(self.p_z, self.p_zp)


@dataclass(frozen=True)
class ExperimentRow:
    """One (size, penalty scheme) cell of the comparison experiment."""

    n: int
    scheme: str
    p_z: float
    p_zp: float
    both_seen: bool
    shots: int
    wall_time_s: float

    @property
    def success_rate(self) -> float:
        """Fraction of shots landing on either member of the target pair."""
        return self.p_z + self.p_zp


@dataclass(frozen=True)
class FitResult:
    """Least-squares fit of success rate against size, in log coordinates.

    ``exponential`` models rate = amplitude * exp(coefficient * n),
    ``gaussian`` models rate = amplitude * exp(coefficient * n^2); a decaying
    curve has negative coefficient either way.  r_squared is computed in the
    fitted (log) coordinates and is only meaningful with >= 3 points.
    """

    model_tag: str
    amplitude: float
    coefficient: float
    r_squared: float
    points: int

    def predict(self, n: float) -> float:
        x = n * n if self.model_tag == "gaussian" else n
        return self.amplitude * math.exp(self.coefficient * x)

    def to_dict(self) -> dict:
        return {
            "model": self.model_tag,
            "params": [self.amplitude, self.coefficient],
            "r_squared": self.r_squared,
            "points": self.points,
        }


def fit_success_curve(
    sizes: Sequence[int], rates: Sequence[float], model_tag: str = "exponential"
) -> FitResult:
    """Fit a decay model to success rates by linear regression in log space.

    Zero-rate points carry no log-space information and are dropped rather
    than floored (flooring would bias the slope); at least two nonzero points
    must remain.
    """
    if model_tag not in FIT_MODELS:
        raise ValueError(f"model_tag must be one of {FIT_MODELS}, got {model_tag!r}")
    ns = np.asarray(sizes, dtype=np.float64)
    ys = np.asarray(rates, dtype=np.float64)
    if ns.shape != ys.shape:
        raise ValueError("sizes and rates must have matching lengths")
    if np.any(ys < 0):
        raise ValueError("success rates cannot be negative")
    keep = ys > 0
    if keep.sum() < 2:
        raise FitError(
            f"need at least 2 nonzero success rates to fit, got {int(keep.sum())}"
        )
    x = ns[keep] ** 2 if model_tag == "gaussian" else ns[keep]
    y = np.log(ys[keep])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(resid @ resid)
    centered = y - y.mean()
    ss_tot = float(centered @ centered)
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return FitResult(
        model_tag=model_tag,
        amplitude=float(np.exp(intercept)),
        coefficient=float(slope),
        r_squared=r_squared,
        points=int(keep.sum()),
    )


def _derived_seeds(seed: int, *tags: int, count: int = 2) -> tuple[int, ...]:
    """Stable per-task substreams: same (seed, tags) always gives the same
    words, independent of how many other tasks ran first."""
    seq = np.random.SeedSequence(entropy=[seed & _MASK64, *tags])
    return tuple(int(w) for w in seq.generate_state(count, np.uint64))


def _scheme_penalties(
    scheme: str, n: int, magnitude: float, penalty_seed: int
) -> PenaltyConfig:
    if scheme == "balanced":
        return PenaltyConfig.balanced(n, magnitude)
    if scheme == "uniform":
        return PenaltyConfig.uniform(n, magnitude)
    if scheme == "random":
        return PenaltyConfig.random(n, magnitude, seed=penalty_seed)
    raise ValueError(f"scheme must be one of {EXPERIMENT_SCHEMES}, got {scheme!r}")


def run_penalty_experiment(
    n_list: Sequence[int],
    schemes: Sequence[str] = EXPERIMENT_SCHEMES,
    shots: int = 4000,
    schedule: AnnealSchedule | None = None,
    seed: int = 0,
    magnitude: float = 2,
    retries: int = 1,
) -> list[ExperimentRow]:
    """Sample every (n, scheme) cell and score hits on the predicted pair.

    ``retries`` re-runs a cell with fresh derived seeds (fresh sign draws for
    the random scheme) until both pair states are seen or attempts run out;
    the reported row is the last attempt and its wall time covers the whole
    cell.  Rows come out sorted by n then scheme regardless of input order.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    if retries < 1:
        raise ValueError("retries must be at least 1")
    bad = set(schemes) - set(EXPERIMENT_SCHEMES)
    if bad:
        raise ValueError(
            f"experiment schemes must be among {EXPERIMENT_SCHEMES}: {sorted(bad)}"
        )
    rows: list[ExperimentRow] = []
    for n in sorted(n_list):
        spec = OracleSpec(n)
        for scheme in sorted(set(schemes)):
            scheme_tag = EXPERIMENT_SCHEMES.index(scheme)
            start = perf_counter()
            stats = None
            for attempt in range(retries):
                run_seed, penalty_seed = _derived_seeds(seed, n, scheme_tag, attempt)
                penalties = _scheme_penalties(scheme, n, magnitude, penalty_seed)
                model = build_qubo(spec, penalties)
                pair = predict_ground_pair(spec, penalties)
                samples = sample(model, schedule, shots, master_seed=run_seed)
                stats = success_stats(samples, pair)
                if stats.both_seen:
                    break
            rows.append(
                ExperimentRow(
                    n=n,
                    scheme=scheme,
                    p_z=stats.p_z,
                    p_zp=stats.p_zp,
                    both_seen=stats.both_seen,
                    shots=shots,
                    wall_time_s=perf_counter() - start,
                )
            )
    return rows


@dataclass(frozen=True)
class SweepResult:
    """Size sweep under balanced penalties, with both scaling fits."""

    rows: tuple[ExperimentRow, ...]
    exponential: FitResult
    gaussian: FitResult

    @property
    def best_fit(self) -> FitResult:
        return max((self.exponential, self.gaussian), key=lambda f: f.r_squared)


def run_success_sweep(
    n_list: Sequence[int],
    shots: int = 4000,
    schedule: AnnealSchedule | None = None,
    seed: int = 0,
    magnitude: float = 2,
    retries: int = 1,
) -> SweepResult:
    """Success rate vs size under balanced penalties, fit both decay models."""
    if len(n_list) < 3:
        raise ValueError("need at least 3 sizes to fit scaling curves")
    rows = run_penalty_experiment(
        n_list,
        schemes=("balanced",),
        shots=shots,
        schedule=schedule,
        seed=seed,
        magnitude=magnitude,
        retries=retries,
    )
    sizes = [row.n for row in rows]
    rates = [row.success_rate for row in rows]
    return SweepResult(
        rows=tuple(rows),
        exponential=fit_success_curve(sizes, rates, "exponential"),
        gaussian=fit_success_curve(sizes, rates, "gaussian"),
    )


# ---------------------------------------------------------------------------
# Classical baseline
# ---------------------------------------------------------------------------

MAX_COLLISION_N = 30


@dataclass(frozen=True)
class CollisionTrial:
    """Result of classically querying the oracle until an output collision."""

    n: int
    queries: int
    input_a: int
    input_b: int

    @property
    def period(self) -> Bits:
        code = self.input_a ^ self.input_b
        return tuple((code >> j) & 1 for j in range(self.n))


def _oracle_output(x: int, n: int) -> int:
    # bit g of the output is bit g XOR bit g+1 of the input
    return (x ^ (x >> 1)) & ((1 << (n - 1)) - 1)


def classical_collision_trial(n: int, seed: int) -> CollisionTrial:
    """Query distinct uniformly random inputs until two share an output.

    The pair-complement structure of the oracle guarantees the colliding
    inputs differ in every bit.  Capped at n = 30: the seen-output map can
    approach 2^(n-1) entries in the worst case.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if n > MAX_COLLISION_N:
        raise ValueError(f"n capped at {MAX_COLLISION_N} for the collision baseline")
    rng = np.random.Generator(np.random.Philox(key=seed & _MASK64))
    total = 1 << n
    tried: set[int] = set()
    seen: dict[int, int] = {}
    queries = 0
    while True:
        x = int(rng.integers(0, total))
        if x in tried:
            continue
        tried.add(x)
        queries += 1
        out = _oracle_output(x, n)
        if out in seen:
            return CollisionTrial(n=n, queries=queries, input_a=seen[out], input_b=x)
        seen[out] = x


# ---------------------------------------------------------------------------
# Benchmarks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BenchRow:
    n: int
    solver_tag: str
    median_wall_time_s: float


def _sample_until_both(
    model: QuboModel,
    pair,
    schedule: AnnealSchedule | None,
    seed: int,
    shots_block: int,
    max_shots: int,
) -> int:
    """Run annealing blocks until both pair states appear; returns shots used."""
    seen_a = seen_b = False
    used = 0
    block = 0
    while not (seen_a and seen_b) and used < max_shots:
        block_seed, = _derived_seeds(seed, block, count=1)
        samples = sample(model, schedule, shots_block, master_seed=block_seed)
        seen_a = seen_a or samples.hits(pair.state_a) > 0
        seen_b = seen_b or samples.hits(pair.state_b) > 0
        used += shots_block
        block += 1
    return used


def benchmark_solvers(
    n_list: Sequence[int],
    repetitions: int = 3,
    solvers: Sequence[str] = BENCH_SOLVERS,
    magnitude: float = 2,
    schedule: AnnealSchedule | None = None,
    seed: int = 0,
    shots_block: int = 200,
    max_shots: int = 20000,
    max_vars: int = DEFAULT_ENUMERATION_CAP,
) -> list[BenchRow]:
    """Median wall time per (n, solver) cell, single-threaded.

    Enumeration cells above the cap are skipped rather than failing; zero
    repetitions yields no rows.
    """
    if repetitions <= 0:
        return []
    bad = set(solvers) - set(BENCH_SOLVERS)
    if bad:
        raise ValueError(f"solvers must be among {BENCH_SOLVERS}: {sorted(bad)}")
    rows: list[BenchRow] = []
    for n in sorted(n_list):
        spec = OracleSpec(n)
        penalties = PenaltyConfig.balanced(n, magnitude)
        model = build_qubo(spec, penalties)
        pair = predict_ground_pair(spec, penalties)
        for tag in sorted(set(solvers)):
            if tag == "enumeration" and spec.total_vars > max_vars:
                continue
            times = []
            for rep in range(repetitions):
                start = perf_counter()
                if tag == "dp":
                    solve_chain_dp(model, spec)
                elif tag == "enumeration":
                    solve_brute_force(model, max_vars=max_vars)
                else:
                    rep_seed, = _derived_seeds(seed, n, rep, count=1)
                    _sample_until_both(
                        model, pair, schedule, rep_seed, shots_block, max_shots
                    )
                times.append(perf_counter() - start)
            rows.append(
                BenchRow(
                    n=n, solver_tag=tag, median_wall_time_s=float(np.median(times))
                )
            )
    return rows


# ---------------------------------------------------------------------------
# Writers
# ---------------------------------------------------------------------------

def write_experiment_csv(
    rows: Sequence[ExperimentRow], fp: IO[str], comment: str | None = None
) -> None:
    if comment:
        fp.write(f"# {comment}\n")
    writer = csv.writer(fp)
    writer.writerow(EXPERIMENT_CSV_HEADER)
    for row in rows:
        writer.writerow(
            [
                row.n,
                row.scheme,
                row.p_z,
                row.p_zp,
                int(row.both_seen),
                row.shots,
                f"{row.wall_time_s:.6f}",
            ]
        )


def write_bench_csv(
    rows: Sequence[BenchRow], fp: IO[str], comment: str | None = None
) -> None:
    if comment:
        fp.write(f"# {comment}\n")
    writer = csv.writer(fp)
    writer.writerow(BENCH_CSV_HEADER)
    for row in rows:
        writer.writerow([row.n, row.solver_tag, f"{row.median_wall_time_s:.6f}"])


def write_fit_json(
    fits: Sequence[FitResult], fp: IO[str], meta: dict | None = None
) -> None:
    doc: dict = {"fits": [fit.to_dict() for fit in fits]}
    if meta is not None:
        doc["meta"] = meta
    json.dump(doc, fp, indent=2)
    fp.write("\n")
