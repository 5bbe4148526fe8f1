"""Metropolis annealer used as a stand-in for quantum annealing hardware.

Every shot is an independent single-spin-flip Metropolis walk over a rising
inverse-temperature ladder.  Randomness is counter-based: shot ``i`` of a run
seeded with ``s`` always draws from ``Philox(key=[s, i])``, so results are
reproducible bit-for-bit regardless of worker count or backend.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np

from . import kernels
from .qubo import (
    GroundPair,
    QuboModel,
    adjacency_csr,
    energy,
    infer_oracle_spec,
    is_oracle_valid,
)

_MASK64 = (1 << 64) - 1

SCHEDULE_KINDS = ("geometric", "linear")


@dataclass(frozen=True)
class AnnealSchedule:
    """Inverse-temperature ladder for the Metropolis walk.

    One sweep proposes a flip of every variable once, in index order, at a
    fixed beta; ``sweeps`` betas are laid out between the endpoints.
    """

    beta_start: float = 0.1
    beta_end: float = 5.0
    sweeps: int = 200
    interpolation: str = "geometric"

    def __post_init__(self) -> None:
        if self.sweeps < 1:
            raise ValueError("sweeps must be at least 1")
        if self.interpolation not in SCHEDULE_KINDS:
            raise ValueError(
                f"interpolation must be one of {SCHEDULE_KINDS}, got {self.interpolation!r}"
            )
        if self.beta_end < self.beta_start:
            raise ValueError("beta_end must be >= beta_start")
        if self.interpolation == "geometric" and self.beta_start <= 0:
            raise ValueError("geometric schedules need beta_start > 0")

    def betas(self) -> np.ndarray:
        if self.sweeps == 1:
            return np.array([self.beta_end], dtype=np.float64)
        if self.interpolation == "geometric":
            return np.geomspace(self.beta_start, self.beta_end, self.sweeps)
        return np.linspace(self.beta_start, self.beta_end, self.sweeps)

    def to_dict(self) -> dict:
        return {
            "beta_start": self.beta_start,
            "beta_end": self.beta_end,
            "sweeps": self.sweeps,
            "interpolation": self.interpolation,
        }


@dataclass(frozen=True)
class SampleRecord:
    """One distinct final state with its multiplicity across shots."""

    bits: tuple[int, ...]
    energy: int | float
    count: int
    valid: bool | None = None

    @property
    def bitstring(self) -> str:
        return "".join(map(str, self.bits))


@dataclass(frozen=True)
class SampleSet:
    """Aggregated annealer output, lowest energies first."""

    records: tuple[SampleRecord, ...]
    shots: int
    master_seed: int
    schedule: AnnealSchedule
    backend: str = field(default_factory=kernels.backend)

    @property
    def num_distinct(self) -> int:
        return len(self.records)

    @property
    def min_energy(self) -> int | float:
        return self.records[0].energy

    def hits(self, bits: Sequence[int]) -> int:
        target = tuple(int(b) for b in bits)
        for rec in self.records:
            if rec.bits == target:
                return rec.count
        return 0

    def states_at_min(self) -> tuple[SampleRecord, ...]:
        emin = self.min_energy
        return tuple(rec for rec in self.records if rec.energy == emin)

    def write_csv(self, fp: IO[str], comment: str | None = None) -> None:
        if comment:
            fp.write(f"# {comment}\n")
        writer = csv.writer(fp)
        writer.writerow(["bits", "count", "energy", "valid"])
        for rec in self.records:
            writer.writerow(
                [rec.bitstring, rec.count, rec.energy,
                 "" if rec.valid is None else int(rec.valid)]
            )

    def to_json_dict(self, meta: dict | None = None) -> dict:
        doc: dict = {
            "shots": self.shots,
            "master_seed": self.master_seed,
            "backend": self.backend,
            "schedule": self.schedule.to_dict(),
            "records": [
                {
                    "bits": rec.bitstring,
                    "count": rec.count,
                    "energy": rec.energy,
                    "valid": rec.valid,
                }
                for rec in self.records
            ],
        }
        if meta is not None:
            doc["meta"] = meta
        return doc

    def write_json(self, fp: IO[str], meta: dict | None = None) -> None:
        json.dump(self.to_json_dict(meta=meta), fp, indent=2)
        fp.write("\n")


def _shot_state(
    shot: int,
    master_seed: int,
    h: np.ndarray,
    indptr: np.ndarray,
    indices: np.ndarray,
    weights: np.ndarray,
    betas: np.ndarray,
) -> tuple[int, ...]:
    rng = np.random.Generator(np.random.Philox(key=[master_seed & _MASK64, shot]))
    state = rng.integers(0, 2, size=h.size, dtype=np.uint8)
    uniforms = rng.random(betas.size * h.size)
    kernels.metropolis_run(state, h, indptr, indices, weights, betas, uniforms)
    return tuple(int(b) for b in state)


def sample(
    model: QuboModel,
    schedule: AnnealSchedule | None = None,
    shots: int = 1000,
    master_seed: int = 0,
    bias: Sequence[float] | None = None,
    workers: int = 1,
) -> SampleSet:
    """Run independent annealing shots and aggregate the final states.

    ``bias`` adds a per-variable linear term for the walk only (positive values
    disfavor the 1 state); reported energies always come from the unbiased
    model.  With ``workers > 1`` shots run on a thread pool, which pays off
    only with the compiled backend.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    if schedule is None:
        schedule = AnnealSchedule()
    h = np.array(model.linear_vector, dtype=np.float64)
    if bias is not None:
        b = np.asarray(bias, dtype=np.float64)
        if b.shape != h.shape:
            raise ValueError(
                f"bias must have one entry per variable ({h.size}), got {b.size}"
            )
        h = h + b
    indptr, indices, weights = adjacency_csr(model, dtype=np.float64)
    betas = schedule.betas()

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            finals = list(
                pool.map(
                    lambda s: _shot_state(s, master_seed, h, indptr, indices, weights, betas),
                    range(shots),
                )
            )
    else:
        finals = [
            _shot_state(s, master_seed, h, indptr, indices, weights, betas)
            for s in range(shots)
        ]

    spec = infer_oracle_spec(model)
    counts = Counter(finals)
    records = []
    for bits, count in counts.items():
        records.append(
            SampleRecord(
                bits=bits,
                energy=energy(model, bits),
                count=count,
                valid=None if spec is None else is_oracle_valid(spec, bits),
            )
        )
    records.sort(key=lambda r: (r.energy, r.bits))
    return SampleSet(
        records=tuple(records),
        shots=shots,
        master_seed=master_seed,
        schedule=schedule,
    )


@dataclass(frozen=True)
class SuccessStats:
    """How often a run landed on each member of a target ground pair.

    ``ground_fraction`` is the pair mass p_z + p_zp; ``ground_hits`` counts
    every shot at the pair's energy, which can be larger when zero penalties
    leave extra degenerate states.
    """

    shots: int
    hits_a: int
    hits_b: int
    ground_hits: int

    @property
    def p_z(self) -> float:
        return self.hits_a / self.shots

    @property
    def p_zp(self) -> float:
        return self.hits_b / self.shots

    @property
    def both_seen(self) -> bool:
        return self.hits_a > 0 and self.hits_b > 0

    @property
    def ground_fraction(self) -> float:
        return self.p_z + self.p_zp


def success_stats(samples: SampleSet, pair: GroundPair) -> SuccessStats:
    """Tally hits on the two target states and on the exact ground energy."""
    if samples.records:
        want = len(pair.state_a)
        got = len(samples.records[0].bits)
        if got != want:
            raise ValueError(
                f"samples have {got}-bit states but the pair expects {want}"
            )
    hits_a = samples.hits(pair.state_a)
    hits_b = samples.hits(pair.state_b)
    ground_hits = sum(
        rec.count
        for rec in samples.records
        if abs(rec.energy - pair.ground_energy) <= 1e-9
    )
    return SuccessStats(
        shots=samples.shots,
        hits_a=hits_a,
        hits_b=hits_b,
        ground_hits=ground_hits,
    )
