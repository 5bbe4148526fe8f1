#!/usr/bin/env python3
"""Hot-kernel timing: compiled extension vs pure-Python fallback.

Times the exhaustive energy-table kernel and the Metropolis walk on identical
inputs for both implementations and reports medians plus the speedup.  Run
from a checkout with the package installed:

    python3 benchmarks/backend_bench.py
    python3 benchmarks/backend_bench.py --sizes 3,5,7 --csv out.csv
"""

from __future__ import annotations

import argparse
import csv
import statistics
import sys
from time import perf_counter

import numpy as np

from simonlab import _kernels_py
from simonlab.qubo import OracleSpec, PenaltyConfig, adjacency_csr, build_qubo

try:
    from simonlab import _kernels as _compiled
except ImportError:
    _compiled = None


def _arrays(n: int, dtype):
    model = build_qubo(OracleSpec(n), PenaltyConfig.balanced(n))
    h = np.array(model.linear_vector, dtype=dtype)
    indptr, indices, weights = adjacency_csr(model, dtype=dtype)
    return h, indptr, indices, weights


def _median_time(fn, repetitions: int) -> float:
    times = []
    for _ in range(repetitions):
        start = perf_counter()
        fn()
        times.append(perf_counter() - start)
    return statistics.median(times)


def bench_energy_table(n: int, repetitions: int) -> dict:
    h, indptr, indices, weights = _arrays(n, np.int64)
    row = {"kernel": "energy_table", "n": n, "variables": 3 * n - 2}
    row["pure_s"] = _median_time(
        lambda: _kernels_py.energy_table(h, indptr, indices, weights), repetitions
    )
    if _compiled is not None:
        row["compiled_s"] = _median_time(
            lambda: _compiled.energy_table(h, indptr, indices, weights), repetitions
        )
    return row


def bench_metropolis(n: int, repetitions: int, sweeps: int = 200) -> dict:
    h, indptr, indices, weights = _arrays(n, np.float64)
    nvars = h.size
    betas = np.geomspace(0.1, 5.0, sweeps)
    rng = np.random.default_rng(0)
    uniforms = rng.random(sweeps * nvars)
    init = rng.integers(0, 2, size=nvars, dtype=np.uint8)

    def run_pure():
        _kernels_py.metropolis_run(
            init.copy(), h, indptr, indices, weights, betas, uniforms
        )

    row = {"kernel": "metropolis", "n": n, "variables": nvars}
    row["pure_s"] = _median_time(run_pure, repetitions)
    if _compiled is not None:

        def run_compiled():
            _compiled.metropolis_run(
                init.copy(), h, indptr, indices, weights, betas, uniforms
            )

        row["compiled_s"] = _median_time(run_compiled, repetitions)
    return row


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="3,5,7",
                        help="comma-separated n values (energy table caps at n=8)")
    parser.add_argument("--metropolis-sizes", default="8,32,100")
    parser.add_argument("--repetitions", type=int, default=5)
    parser.add_argument("--csv", help="also write rows to this path")
    args = parser.parse_args(argv)

    rows = []
    for n in (int(t) for t in args.sizes.split(",")):
        rows.append(bench_energy_table(n, args.repetitions))
    for n in (int(t) for t in args.metropolis_sizes.split(",")):
        rows.append(bench_metropolis(n, args.repetitions))

    if _compiled is None:
        print("compiled extension unavailable; pure timings only", file=sys.stderr)

    header = f"{'kernel':<14}{'n':>5}{'vars':>6}{'pure (s)':>12}{'compiled (s)':>14}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    for row in rows:
        pure = row["pure_s"]
        compiled = row.get("compiled_s")
        speedup = f"{pure / compiled:8.1f}x" if compiled else "      n/a"
        comp_text = f"{compiled:14.6f}" if compiled else f"{'-':>14}"
        print(f"{row['kernel']:<14}{row['n']:>5}{row['variables']:>6}"
              f"{pure:12.6f}{comp_text}{speedup}")

    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fp:
            writer = csv.writer(fp)
            writer.writerow(["kernel", "n", "variables", "pure_s", "compiled_s"])
            for row in rows:
                writer.writerow([
                    row["kernel"], row["n"], row["variables"],
                    f"{row['pure_s']:.6f}",
                    f"{row['compiled_s']:.6f}" if "compiled_s" in row else "",
                ])
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
