"""Ground-truth solvers: exhaustive spectrum enumeration and an exact chain DP.

Enumeration is the oracle of record for small problems (every one of the
2^(3n-2) assignments is energy-tagged and classified).  The dynamic program
exploits the chain layout of the XOR-gadget couplings to get the exact ground
energy and the *complete* ground-state set in time linear in n, which is what
makes hundred-input instances checkable at all.
"""

from __future__ import annotations

import csv
import itertools
import json
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np

from . import kernels
from .qubo import (
    Bits,
    OracleSpec,
    QuboModel,
    adjacency_csr,
    build_qubo,
    energy,
    is_oracle_valid,
    var_labels,
    PenaltyConfig,
)

DEFAULT_ENUMERATION_CAP = 24  # total variables; 2^24 energies ~ 134 MB
FLOAT_LEVEL_TOL = 1e-9


class EnumerationCapError(RuntimeError):
    """Problem too large for exhaustive enumeration at the configured cap."""


class ChainStructureError(RuntimeError):
    """Model couplings do not follow the XOR-chain gadget layout."""


def encode_state(bits: Sequence[int]) -> int:
    """Little-endian state code: variable j contributes bit 2**j."""
    code = 0
    for j, b in enumerate(bits):
        if b:
            code |= 1 << j
    return code


def decode_state(code: int, nvars: int) -> Bits:
    return tuple((code >> j) & 1 for j in range(nvars))


def _table_arrays(model: QuboModel):
    dtype = np.int64 if model.is_integral else np.float64
    h = np.array(model.linear_vector, dtype=dtype)
    indptr, indices, weights = adjacency_csr(model, dtype=dtype)
    return h, indptr, indices, weights


def all_energies(model: QuboModel, max_vars: int = DEFAULT_ENUMERATION_CAP) -> np.ndarray:
    """Energy of every assignment, indexed by state code.

    int64 when the model is integral (bit-exact), float64 otherwise.
    """
    nvars = model.num_variables
    if nvars > max_vars:
        raise EnumerationCapError(
            f"{nvars} variables exceeds the enumeration cap of {max_vars}"
        )
    h, indptr, indices, weights = _table_arrays(model)
    table = kernels.energy_table(h, indptr, indices, weights)
    if model.offset:
        table = table + model.offset
    return table


@dataclass(frozen=True)
class SpectrumLevel:
    """One energy level: state codes plus per-state oracle classification.

    ``outputs`` holds the integer-coded output register of each state (only
    meaningful where ``valid`` is set).
    """

    energy: int | float
    states: np.ndarray
    valid: np.ndarray
    outputs: np.ndarray

    @property
    def count(self) -> int:
        return int(self.states.size)

    @property
    def valid_count(self) -> int:
        return int(self.valid.sum())

    def output_groups(self) -> dict[int, np.ndarray]:
        """Valid states of this level grouped by shared output value."""
        groups: dict[int, np.ndarray] = {}
        for out in sorted(set(self.outputs[self.valid].tolist())):
            groups[out] = self.states[self.valid & (self.outputs == out)]
        return groups


@dataclass(frozen=True)
class SpectrumReport:
    """Exhaustive energy-sorted, degeneracy-grouped spectrum."""

    spec: OracleSpec
    levels: tuple[SpectrumLevel, ...]

    @property
    def num_states(self) -> int:
        return sum(level.count for level in self.levels)

    @property
    def ground(self) -> SpectrumLevel:
        return self.levels[0]

    def to_csv_rows(self) -> list[tuple[int | float, int, int]]:
        return [(lv.energy, lv.count, lv.valid_count) for lv in self.levels]

    def write_csv(self, fp: IO[str], comment: str | None = None) -> None:
        if comment:
            fp.write(f"# {comment}\n")
        writer = csv.writer(fp)
        writer.writerow(["energy", "count", "valid_count"])
        writer.writerows(self.to_csv_rows())

    def to_json_dict(self, meta: dict | None = None) -> dict:
        """Full per-state dump; intended for the small-n plotting case."""
        nvars = self.spec.total_vars
        levels = []
        for lv in self.levels:
            states = []
            for code, ok, out in zip(
                lv.states.tolist(), lv.valid.tolist(), lv.outputs.tolist()
            ):
                entry = {
                    "bits": "".join(map(str, decode_state(code, nvars))),
                    "valid": bool(ok),
                }
                if ok:
                    entry["output"] = "".join(
                        map(str, decode_state(out, self.spec.n - 1))
                    )
                states.append(entry)
            levels.append({"energy": lv.energy, "states": states})
        doc: dict = {"n": self.spec.n, "total_vars": nvars, "levels": levels}
        if meta is not None:
            doc["meta"] = meta
        return doc

    def write_json(self, fp: IO[str], meta: dict | None = None) -> None:
        json.dump(self.to_json_dict(meta=meta), fp, indent=2)
        fp.write("\n")


@dataclass(frozen=True)
class ExactSolution:
    """Complete minimum-energy state set, from either exact route."""

    ground_energy: int | float
    ground_states: tuple[Bits, ...]
    method: str

    @property
    def degeneracy(self) -> int:
        return len(self.ground_states)


def _classify_states(spec: OracleSpec, total: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized oracle-validity flags and output codes for all states."""
    n = spec.n
    codes = np.arange(total, dtype=np.int64)
    valid = np.ones(total, dtype=bool)
    for g in range(n - 1):
        xi = (codes >> g) & 1
        xi1 = (codes >> (g + 1)) & 1
        oi = (codes >> (n + g)) & 1
        ai = (codes >> (2 * n - 1 + g)) & 1
        valid &= oi == (xi ^ xi1)
        valid &= ai == (xi & xi1)
    outputs = (codes >> n) & ((1 << (n - 1)) - 1)
    return valid, outputs


def enumerate_spectrum(
    model: QuboModel, spec: OracleSpec, max_vars: int = DEFAULT_ENUMERATION_CAP
) -> SpectrumReport:
    """Exhaustive spectrum with per-state oracle classification."""
    nvars = model.num_variables
    if nvars != spec.total_vars:
        raise ValueError(
            f"model has {nvars} variables but spec expects {spec.total_vars}"
        )
    table = all_energies(model, max_vars=max_vars)
    valid, outputs = _classify_states(spec, table.size)

    order = np.argsort(table, kind="stable")
    sorted_e = table[order]
    if model.is_integral:
        breaks = np.flatnonzero(np.diff(sorted_e) != 0) + 1
    else:
        breaks = np.flatnonzero(np.diff(sorted_e) > FLOAT_LEVEL_TOL) + 1
    starts = np.concatenate(([0], breaks))
    ends = np.concatenate((breaks, [sorted_e.size]))

    levels = []
    for s, e in zip(starts.tolist(), ends.tolist()):
        states = order[s:e].copy()
        level_energy = sorted_e[s]
        levels.append(
            SpectrumLevel(
                energy=int(level_energy) if model.is_integral else float(level_energy),
                states=states,
                valid=valid[states],
                outputs=outputs[states],
            )
        )
    return SpectrumReport(spec=spec, levels=tuple(levels))


def solve_brute_force(
    model: QuboModel, max_vars: int = DEFAULT_ENUMERATION_CAP
) -> ExactSolution:
    """Ground energy and the complete ground set by exhaustive scan."""
    table = all_energies(model, max_vars=max_vars)
    emin = table.min()
    if model.is_integral:
        codes = np.flatnonzero(table == emin)
        ground = int(emin)
    else:
        codes = np.flatnonzero(table <= emin + FLOAT_LEVEL_TOL)
        ground = float(emin)
    nvars = model.num_variables
    states = tuple(decode_state(int(c), nvars) for c in codes.tolist())
    return ExactSolution(ground_energy=ground, ground_states=states, method="brute_force")


# ---------------------------------------------------------------------------
# Chain dynamic programming
# ---------------------------------------------------------------------------

def _chain_size(model: QuboModel) -> int:
    n = sum(1 for lab in model.labels if lab.startswith("x"))
    if n < 2 or model.labels != var_labels(n):
        raise ChainStructureError(
            "model labels do not follow the x/o/a chain-family layout"
        )
    return n


def _allowed_pairs(n: int) -> set[tuple[str, str]]:
    index = {lab: i for i, lab in enumerate(var_labels(n))}
    pairs: set[tuple[str, str]] = set()
    for g in range(1, n):
        x1, x2, o, a = f"x{g}", f"x{g + 1}", f"o{g}", f"a{g}"
        for u, v in [(x1, x2), (x1, o), (x2, o), (x1, a), (x2, a), (o, a)]:
            pairs.add((u, v) if index[u] < index[v] else (v, u))
    return pairs


def solve_chain_dp(model: QuboModel, spec: OracleSpec | None = None) -> ExactSolution:
    """Exact ground energy and complete ground set by a left-to-right sweep.

    The frontier state is the value of the input bit shared with the next
    gadget; output and ancilla bits only touch their own gadget and are
    minimized out locally.  Backtracking follows every tying choice, so the
    returned state set is complete.  Integer models use exact comparisons,
    float models a 1e-9 absolute tie tolerance.
    """
    n = _chain_size(model)
    if spec is not None and spec.n != n:
        raise ValueError(f"model encodes n={n} but spec has n={spec.n}")
    allowed = _allowed_pairs(n)
    extra = set(model.quadratic) - allowed
    if extra:
        raise ChainStructureError(
            f"couplings outside the chain-gadget layout: {sorted(extra)}"
        )

    exact = model.is_integral
    tol = 0 if exact else FLOAT_LEVEL_TOL

    def ties(a, b) -> bool:
        return a == b if exact else abs(a - b) <= tol

    lin = model.linear
    quad = model.quadratic

    def lw(lab: str):
        return lin.get(lab, 0)

    def qw(u: str, v: str):
        return quad.get((u, v), quad.get((v, u), 0))

    # per-gadget local minimum over (o, a), conditioned on the two input bits
    gadget_min: list[dict[tuple[int, int], tuple[float, list[tuple[int, int]]]]] = []
    for g in range(1, n):
        x1, x2, o, a = f"x{g}", f"x{g + 1}", f"o{g}", f"a{g}"
        c_xx, c_x1o, c_x2o = qw(x1, x2), qw(x1, o), qw(x2, o)
        c_x1a, c_x2a, c_oa = qw(x1, a), qw(x2, a), qw(o, a)
        h_o, h_a = lw(o), lw(a)
        table: dict[tuple[int, int], tuple[float, list[tuple[int, int]]]] = {}
        for b1 in (0, 1):
            for b2 in (0, 1):
                best = None
                argmin: list[tuple[int, int]] = []
                for ob in (0, 1):
                    for ab in (0, 1):
                        val = (
                            h_o * ob + h_a * ab + c_xx * b1 * b2
                            + c_x1o * b1 * ob + c_x2o * b2 * ob
                            + c_x1a * b1 * ab + c_x2a * b2 * ab
                            + c_oa * ob * ab
                        )
                        if best is None or val < best - tol:
                            best = val
                            argmin = [(ob, ab)]
                        elif ties(val, best):
                            argmin.append((ob, ab))
                table[(b1, b2)] = (best, argmin)
        gadget_min.append(table)

    # forward sweep over the input chain
    front = {0: model.offset, 1: model.offset + lw("x1")}
    preds: list[dict[int, list[int]]] = []
    for g in range(1, n):
        h_next = lw(f"x{g + 1}")
        table = gadget_min[g - 1]
        new_front = {}
        step_preds: dict[int, list[int]] = {}
        for b2 in (0, 1):
            candidates = {
                b1: front[b1] + h_next * b2 + table[(b1, b2)][0] for b1 in (0, 1)
            }
            best = min(candidates.values())
            new_front[b2] = best
            step_preds[b2] = [b1 for b1 in (0, 1) if ties(candidates[b1], best)]
        front = new_front
        preds.append(step_preds)

    ground = min(front.values())

    # backtrack every tying input chain
    chains: list[list[int]] = [[b] for b in (0, 1) if ties(front[b], ground)]
    for step in reversed(preds):
        chains = [[b1] + chain for chain in chains for b1 in step[chain[0]]]

    # expand each chain with every tying (o, a) choice per gadget
    states: list[Bits] = []
    for chain in chains:
        per_gadget = [
            gadget_min[g][(chain[g], chain[g + 1])][1] for g in range(n - 1)
        ]
        for combo in itertools.product(*per_gadget):
            o_bits = tuple(ob for ob, _ in combo)
            a_bits = tuple(ab for _, ab in combo)
            states.append(tuple(chain) + o_bits + a_bits)
    states.sort(key=encode_state)

    return ExactSolution(
        ground_energy=ground if not exact else int(ground),
        ground_states=tuple(states),
        method="chain_dp",
    )


def verify_gadget_truth_table() -> bool:
    """Exhaustively check the single XOR gadget: energy 0 exactly on the four
    oracle-consistent rows, strictly positive on the other twelve."""
    spec = OracleSpec(2)
    model = build_qubo(spec, PenaltyConfig.zero(2))
    for bits in itertools.product((0, 1), repeat=4):
        e = energy(model, bits)
        if is_oracle_valid(spec, bits):
            if e != 0:
                return False
        elif e <= 0:
            return False
    return True
