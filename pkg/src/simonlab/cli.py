"""Command-line front end.

Subcommands mirror the library layers: ``build`` emits a model file,
``spectrum``/``solve`` run the exact machinery on it, ``sample`` runs the
annealer, and ``experiment``/``bench`` drive the batch studies.  Every output
file records the exact invocation (a ``#`` comment line for CSV, a ``meta``
field for JSON), and all randomness flows from explicit ``--seed`` values.

Exit codes: 0 success, 1 no unique ground pair, 2 bad configuration,
3 computation refused (caps, structure, fits), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from contextlib import contextmanager

from . import __version__
from .analysis import (
    BENCH_SOLVERS,
    EXPERIMENT_SCHEMES,
    FitError,
    benchmark_solvers,
    fit_success_curve,
    run_penalty_experiment,
    write_bench_csv,
    write_experiment_csv,
    write_fit_json,
)
from .exact import (
    DEFAULT_ENUMERATION_CAP,
    ChainStructureError,
    EnumerationCapError,
    enumerate_spectrum,
    solve_chain_dp,
)
from .qubo import (
    OracleSpec,
    PenaltyConfig,
    build_qubo,
    infer_oracle_spec,
    load_model,
    save_model,
    validate_penalties,
)
from .sampler import AnnealSchedule, sample

EXIT_OK = 0
EXIT_NO_UNIQUE_PAIR = 1
EXIT_CONFIG = 2
EXIT_COMPUTE = 3
EXIT_IO = 4


@contextmanager
def _open_out(path: str | None):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fp:
            yield fp


def _info(args, message: str) -> None:
    if not args.quiet:
        print(message, file=sys.stderr)


def _parse_sizes(text: str) -> list[int]:
    """Comma-separated sizes; a token may be a start:stop[:step] range
    (inclusive stop), e.g. '5:50:5' or '3,4,8'."""
    sizes: list[int] = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if ":" in token:
            parts = [int(p) for p in token.split(":")]
            if len(parts) == 2:
                start, stop, step = parts[0], parts[1], 1
            elif len(parts) == 3:
                start, stop, step = parts
            else:
                raise ValueError(f"bad size range {token!r}")
            if step < 1:
                raise ValueError("size range step must be positive")
            sizes.extend(range(start, stop + 1, step))
        else:
            sizes.append(int(token))
    if not sizes:
        raise ValueError("no sizes given")
    return sizes


def _schedule_from(args) -> AnnealSchedule:
    return AnnealSchedule(
        beta_start=args.beta_start,
        beta_end=args.beta_end,
        sweeps=args.sweeps,
        interpolation=args.interpolation,
    )


def _penalties_from(args, n: int) -> PenaltyConfig:
    if args.scheme == "zero":
        return PenaltyConfig.zero(n)
    if args.scheme == "uniform":
        return PenaltyConfig.uniform(n, args.magnitude)
    if args.scheme == "balanced":
        return PenaltyConfig.balanced(n, args.magnitude)
    if args.scheme == "random":
        return PenaltyConfig.random(n, args.magnitude, seed=args.seed)
    # explicit
    if args.penalties is None:
        raise ValueError("--scheme explicit requires --penalties")
    values = [float(v) for v in args.penalties.split(",")]
    return PenaltyConfig.explicit(values)


def _load_chain_model(path: str):
    with open(path, "r", encoding="utf-8") as fp:
        model = load_model(fp)
    spec = infer_oracle_spec(model)
    if spec is None:
        raise ChainStructureError(
            f"{path} does not hold a chain-family model (x/o/a labels)"
        )
    return model, spec


def _bitstring(bits) -> str:
    return "".join(map(str, bits))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_build(args) -> int:
    spec = OracleSpec(args.size)
    penalties = _penalties_from(args, args.size)
    model = build_qubo(spec, penalties)
    for warning in validate_penalties(spec, penalties):
        _info(args, f"warning: {warning}")
    _info(args, f"{model.num_variables} variables ({spec.n} inputs)")
    with _open_out(args.out) as fp:
        save_model(model, fp, penalties=penalties, meta={"invocation": args.invocation})
    return EXIT_OK


def cmd_spectrum(args) -> int:
    model, spec = _load_chain_model(args.qubo)
    report = enumerate_spectrum(model, spec, max_vars=args.cap)
    _info(
        args,
        f"{report.num_states} states in {len(report.levels)} levels; "
        f"ground energy {report.ground.energy} with degeneracy {report.ground.count}",
    )
    with _open_out(args.out) as fp:
        if args.format == "json":
            report.write_json(fp, meta={"invocation": args.invocation})
        else:
            report.write_csv(fp, comment=args.invocation)
    return EXIT_OK


def cmd_solve(args) -> int:
    model, spec = _load_chain_model(args.qubo)
    solution = solve_chain_dp(model, spec)
    lines = [f"ground energy: {solution.ground_energy}"]
    lines.append(f"ground states ({solution.degeneracy}):")
    for state in solution.ground_states:
        x, o, a = spec.split(state)
        lines.append(f"  x={_bitstring(x)} o={_bitstring(o)} a={_bitstring(a)}")
    status = EXIT_OK
    if solution.degeneracy == 2:
        first, second = solution.ground_states
        period = tuple(
            b1 ^ b2 for b1, b2 in zip(first[: spec.n], second[: spec.n])
        )
        lines.append(f"period: {_bitstring(period)}")
        if any(b == 0 for b in period):
            status = EXIT_NO_UNIQUE_PAIR
    else:
        lines.append("no unique ground pair")
        status = EXIT_NO_UNIQUE_PAIR
    with _open_out(args.out) as fp:
        fp.write("\n".join(lines) + "\n")
    return status


def cmd_sample(args) -> int:
    model, _spec = _load_chain_model(args.qubo)
    schedule = _schedule_from(args)
    samples = sample(
        model,
        schedule,
        shots=args.shots,
        master_seed=args.seed,
        workers=args.workers,
    )
    _info(
        args,
        f"{samples.num_distinct} distinct states from {samples.shots} shots "
        f"(backend {samples.backend}); min energy {samples.min_energy}",
    )
    with _open_out(args.out) as fp:
        if args.format == "json":
            samples.write_json(fp, meta={"invocation": args.invocation})
        else:
            samples.write_csv(fp, comment=args.invocation)
    return EXIT_OK


def cmd_experiment(args) -> int:
    sizes = _parse_sizes(args.sizes)
    schemes = tuple(s.strip() for s in args.schemes.split(",") if s.strip())
    schedule = _schedule_from(args)
    rows = run_penalty_experiment(
        sizes,
        schemes=schemes,
        shots=args.shots,
        schedule=schedule,
        seed=args.seed,
        magnitude=args.magnitude,
        retries=args.retries,
    )
    with _open_out(args.out) as fp:
        write_experiment_csv(rows, fp, comment=args.invocation)
    _info(args, f"{len(rows)} experiment rows written")
    if args.fit_out:
        balanced = [row for row in rows if row.scheme == "balanced"]
        if len(balanced) < 3:
            raise ValueError("--fit-out needs at least 3 balanced-scheme rows")
        ns = [row.n for row in balanced]
        rates = [row.success_rate for row in balanced]
        fits = [
            fit_success_curve(ns, rates, "exponential"),
            fit_success_curve(ns, rates, "gaussian"),
        ]
        with _open_out(args.fit_out) as fp:
            write_fit_json(fits, fp, meta={"invocation": args.invocation})
        _info(
            args,
            "fits: "
            + ", ".join(f"{f.model_tag} r2={f.r_squared:.4f}" for f in fits),
        )
    return EXIT_OK


def cmd_bench(args) -> int:
    sizes = _parse_sizes(args.sizes)
    solvers = tuple(s.strip() for s in args.solvers.split(",") if s.strip())
    rows = benchmark_solvers(
        sizes,
        repetitions=args.repetitions,
        solvers=solvers,
        schedule=_schedule_from(args),
        seed=args.seed,
        max_vars=args.cap,
    )
    with _open_out(args.out) as fp:
        write_bench_csv(rows, fp, comment=args.invocation)
    _info(args, f"{len(rows)} benchmark rows written")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_schedule_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("anneal schedule")
    group.add_argument("--sweeps", type=int, default=200,
                       help="Metropolis sweeps per shot (default 200)")
    group.add_argument("--beta-start", type=float, default=0.1,
                       help="initial inverse temperature (default 0.1)")
    group.add_argument("--beta-end", type=float, default=5.0,
                       help="final inverse temperature (default 5.0)")
    group.add_argument("--interpolation", choices=("geometric", "linear"),
                       default="geometric", help="beta ladder spacing")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simonlab",
        description="Build, solve, and sample period-finding oracle QUBOs.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--out", default="-", help="output path (default stdout)")
    common.add_argument("--seed", type=int, default=0, help="master RNG seed")
    common.add_argument("-q", "--quiet", action="store_true",
                        help="suppress informational stderr output")

    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser(
        "build", parents=[common], help="write a QUBO model as JSON"
    )
    p_build.add_argument("-n", "--size", type=int, required=True,
                         help="number of oracle input bits")
    p_build.add_argument("--scheme", default="balanced",
                         choices=("zero", "uniform", "balanced", "random", "explicit"))
    p_build.add_argument("--magnitude", type=float, default=2,
                         help="penalty magnitude for the sign schemes (default 2)")
    p_build.add_argument("--penalties",
                         help="comma-separated values for --scheme explicit")
    p_build.set_defaults(func=cmd_build)

    p_spectrum = sub.add_parser(
        "spectrum", parents=[common], help="enumerate the full energy spectrum"
    )
    p_spectrum.add_argument("qubo", help="model JSON written by build")
    p_spectrum.add_argument("--format", choices=("csv", "json"), default="csv")
    p_spectrum.add_argument("--cap", type=int, default=DEFAULT_ENUMERATION_CAP,
                            help="enumeration cap in total variables")
    p_spectrum.set_defaults(func=cmd_spectrum)

    p_solve = sub.add_parser(
        "solve", parents=[common],
        help="exact ground states and recovered period via the chain sweep",
    )
    p_solve.add_argument("qubo", help="model JSON written by build")
    p_solve.set_defaults(func=cmd_solve)

    p_sample = sub.add_parser(
        "sample", parents=[common], help="run annealing shots against a model"
    )
    p_sample.add_argument("qubo", help="model JSON written by build")
    p_sample.add_argument("--shots", type=int, default=1000)
    p_sample.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sample.add_argument("--workers", type=int, default=1,
                          help="threads for shot execution")
    _add_schedule_args(p_sample)
    p_sample.set_defaults(func=cmd_sample)

    p_exp = sub.add_parser(
        "experiment", parents=[common],
        help="penalty-scheme comparison over a size list",
    )
    p_exp.add_argument("--sizes", required=True,
                       help="comma list and/or start:stop[:step] ranges, e.g. 5:50:5")
    p_exp.add_argument("--schemes", default=",".join(EXPERIMENT_SCHEMES))
    p_exp.add_argument("--shots", type=int, default=4000)
    p_exp.add_argument("--retries", type=int, default=1,
                       help="re-run a cell with fresh seeds until both states seen")
    p_exp.add_argument("--magnitude", type=float, default=2)
    p_exp.add_argument("--fit-out",
                       help="also fit scaling curves to balanced rows, write JSON here")
    _add_schedule_args(p_exp)
    p_exp.set_defaults(func=cmd_experiment)

    p_bench = sub.add_parser(
        "bench", parents=[common], help="time the solvers over a size list"
    )
    p_bench.add_argument("--sizes", required=True)
    p_bench.add_argument("--solvers", default=",".join(BENCH_SOLVERS))
    p_bench.add_argument("--repetitions", type=int, default=3)
    p_bench.add_argument("--cap", type=int, default=DEFAULT_ENUMERATION_CAP,
                         help="enumeration cap in total variables")
    _add_schedule_args(p_bench)
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    args.invocation = "simonlab " + " ".join(argv)
    try:
        return args.func(args)
    except (EnumerationCapError, ChainStructureError, FitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
