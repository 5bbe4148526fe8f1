"""Period-finding oracle QUBOs: builders, exact solvers, annealing, analysis.

The package turns an n-bit XOR-chain oracle into a penalized QUBO whose two
degenerate ground states encode the oracle's hidden period, then provides
exact solvers (exhaustive enumeration, chain dynamic programming), a seeded
Metropolis annealer, and the statistics/experiment layer built on top.
"""

from .qubo import (
    GroundPair,
    OracleSpec,
    PenaltyConfig,
    QuboModel,
    build_qubo,
    energy,
    infer_oracle_spec,
    is_oracle_valid,
    load_model,
    model_from_dict,
    model_to_dict,
    predict_ground_pair,
    recover_period,
    save_model,
    validate_penalties,
    var_labels,
    xor_gadget_energy,
)
from .exact import (
    ChainStructureError,
    EnumerationCapError,
    ExactSolution,
    SpectrumLevel,
    SpectrumReport,
    all_energies,
    decode_state,
    encode_state,
    enumerate_spectrum,
    solve_brute_force,
    solve_chain_dp,
    verify_gadget_truth_table,
)
from .sampler import (
    AnnealSchedule,
    SampleRecord,
    SampleSet,
    SuccessStats,
    sample,
    success_stats,
)
from .analysis import (
    BenchRow,
    CollisionTrial,
    ExperimentRow,
    FitError,
    FitResult,
    ShotEstimate,
    SweepResult,
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
from . import kernels

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # qubo
    "GroundPair",
    "OracleSpec",
    "PenaltyConfig",
    "QuboModel",
    "build_qubo",
    "energy",
    "infer_oracle_spec",
    "is_oracle_valid",
    "load_model",
    "model_from_dict",
    "model_to_dict",
    "predict_ground_pair",
    "recover_period",
    "save_model",
    "validate_penalties",
    "var_labels",
    "xor_gadget_energy",
    # exact
    "ChainStructureError",
    "EnumerationCapError",
    "ExactSolution",
    "SpectrumLevel",
    "SpectrumReport",
    "all_energies",
    "decode_state",
    "encode_state",
    "enumerate_spectrum",
    "solve_brute_force",
    "solve_chain_dp",
    "verify_gadget_truth_table",
    # sampler
    "AnnealSchedule",
    "SampleRecord",
    "SampleSet",
    "SuccessStats",
    "sample",
    "success_stats",
    # analysis
    "BenchRow",
    "CollisionTrial",
    "ExperimentRow",
    "FitError",
    "FitResult",
    "ShotEstimate",
    "SweepResult",
    "benchmark_solvers",
    "classical_collision_trial",
    "expected_shots_both",
    "fit_success_curve",
    "prob_both",
    "run_penalty_experiment",
    "run_success_sweep",
    "write_bench_csv",
    "write_experiment_csv",
    "write_fit_json",
    # kernels
    "kernels",
]
