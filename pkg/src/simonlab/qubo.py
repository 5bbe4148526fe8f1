"""Penalized XOR-chain QUBO for the all-ones hidden-period oracle.

The oracle maps an n-bit input register to the n-1 XORs of adjacent bits,
so two inputs collide exactly when they are bitwise complements: the hidden
period is the all-ones string.  Encoding one XOR as a QUBO needs an ancilla
carrying the AND of its two inputs, giving 3n-2 binary variables total,
ordered as x_1..x_n, o_1..o_{n-1}, a_1..a_{n-1}.

Every oracle-consistent assignment of the plain chain QUBO sits in a
degenerate ground manifold at energy 0.  Adding a signed penalty p_i to each
output variable's linear coefficient shifts a valid assignment's energy to
sum_i p_i*o_i, which singles out one output value (o_i = 1 exactly where
p_i < 0) and leaves just the two inputs mapping to it at minimum energy.
XOR-ing those two inputs recovers the period.

Assignments are plain bit tuples in label order throughout.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import IO, Iterable, Sequence

import numpy as np

Bits = tuple[int, ...]

_U64 = 0xFFFFFFFFFFFFFFFF

PENALTY_SCHEMES = ("zero", "uniform", "balanced", "random", "explicit")


def _as_bits(assignment: Sequence[int], length: int | None = None) -> Bits:
    bits = tuple(int(b) for b in assignment)
    if any(b not in (0, 1) for b in bits):
        raise ValueError("assignment entries must be 0 or 1")
    if length is not None and len(bits) != length:
        raise ValueError(f"assignment has {len(bits)} bits, expected {length}")
    return bits


def _exactify(value: float) -> int | float:
    """Keep integral coefficients as Python ints so energy sums stay exact."""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return int(value)
    value = float(value)
    return int(value) if value.is_integer() else value


@dataclass(frozen=True)
class OracleSpec:
    """Dimensions of the XOR-chain oracle: n input bits, 3n-2 variables."""

    n: int
    total_vars: int = field(init=False)

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"n must be at least 2, got {self.n}")
        object.__setattr__(self, "total_vars", 3 * self.n - 2)

    def split(self, assignment: Sequence[int]) -> tuple[Bits, Bits, Bits]:
        """Split a full assignment into its (input, output, ancilla) registers."""
        bits = _as_bits(assignment, self.total_vars)
        n = self.n
        return bits[:n], bits[n : 2 * n - 1], bits[2 * n - 1 :]


@dataclass(frozen=True)
class PenaltyConfig:
    """Signed penalty per output variable, plus how the vector was made.

    The canonical constructors normalize integral magnitudes to ints so that
    the resulting QUBO coefficients (and all downstream energies) stay exact.
    """

    p: tuple[float, ...]
    scheme: str
    magnitude: float
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.scheme not in PENALTY_SCHEMES:
            raise ValueError(f"unknown penalty scheme {self.scheme!r}")
        if len(self.p) < 1:
            raise ValueError("penalty vector must have at least one entry")
        if self.magnitude < 0:
            raise ValueError("magnitude must be nonnegative")

    @classmethod
    def zero(cls, n: int) -> "PenaltyConfig":
        return cls(p=(0,) * (n - 1), scheme="zero", magnitude=0)

    @classmethod
    def uniform(cls, n: int, magnitude: float = 2) -> "PenaltyConfig":
        m = _exactify(magnitude)
        return cls(p=(m,) * (n - 1), scheme="uniform", magnitude=m)

    @classmethod
    def balanced(cls, n: int, magnitude: float = 2) -> "PenaltyConfig":
        # alternating signs starting positive: p_i = magnitude * (-1)**(i+1)
        m = _exactify(magnitude)
        return cls(
            p=tuple(m if i % 2 == 1 else -m for i in range(1, n)),
            scheme="balanced",
            magnitude=m,
        )

    @classmethod
    def random(cls, n: int, magnitude: float, seed: int) -> "PenaltyConfig":
        # counter-based generator so sign patterns replay from the seed alone
        m = _exactify(magnitude)
        rng = np.random.Generator(np.random.Philox(key=seed & _U64))
        signs = rng.integers(0, 2, size=n - 1)
        return cls(
            p=tuple(m if s else -m for s in signs),
            scheme="random",
            magnitude=m,
            seed=seed,
        )

    @classmethod
    def explicit(cls, p: Iterable[float]) -> "PenaltyConfig":
        vec = tuple(_exactify(v) for v in p)
        mag = max((abs(v) for v in vec), default=0)
        return cls(p=vec, scheme="explicit", magnitude=mag)


def var_labels(n: int) -> tuple[str, ...]:
    """Canonical variable order: input block, output block, ancilla block."""
    xs = [f"x{i}" for i in range(1, n + 1)]
    os_ = [f"o{i}" for i in range(1, n)]
    as_ = [f"a{i}" for i in range(1, n)]
    return tuple(xs + os_ + as_)


@dataclass(frozen=True)
class QuboModel:
    """Sparse quadratic pseudo-Boolean function over labeled binary variables.

    ``quadratic`` stores each unordered pair once, keyed in label-index order.
    Treat instances as immutable; the cached array views below assume it.
    """

    labels: tuple[str, ...]
    linear: dict[str, float]
    quadratic: dict[tuple[str, str], float]
    offset: float = 0

    @property
    def num_variables(self) -> int:
        return len(self.labels)

    @cached_property
    def index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    @cached_property
    def is_integral(self) -> bool:
        coeffs = [self.offset, *self.linear.values(), *self.quadratic.values()]
        return all(isinstance(c, int) for c in coeffs)

    @cached_property
    def linear_vector(self) -> tuple[float, ...]:
        return tuple(self.linear.get(lab, 0) for lab in self.labels)

    @cached_property
    def pair_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Coupling pairs as (u, v, weight) arrays with u < v by index."""
        idx = self.index
        items = sorted(
            ((idx[u], idx[v], w) for (u, v), w in self.quadratic.items()),
            key=lambda t: (t[0], t[1]),
        )
        u = np.array([t[0] for t in items], dtype=np.int64)
        v = np.array([t[1] for t in items], dtype=np.int64)
        w = np.array([t[2] for t in items], dtype=np.float64)
        return u, v, w

    @cached_property
    def coupling_degrees(self) -> tuple[int, ...]:
        neighbors: list[set[int]] = [set() for _ in self.labels]
        u, v, _ = self.pair_arrays
        for a, b in zip(u.tolist(), v.tolist()):
            neighbors[a].add(b)
            neighbors[b].add(a)
        return tuple(len(s) for s in neighbors)


def infer_oracle_spec(model: QuboModel) -> OracleSpec | None:
    """Recover the oracle layout from the labels, if the model is one of ours."""
    n = sum(1 for lab in model.labels if lab.startswith("x"))
    if n >= 2 and model.labels == var_labels(n):
        return OracleSpec(n)
    return None


def adjacency_csr(
    model: QuboModel, dtype=np.float64
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Symmetric neighbor lists in CSR form, rows sorted by neighbor index.

    Both kernel backends walk these arrays in identical order, which is what
    makes their outputs bit-for-bit comparable.
    """
    nvars = model.num_variables
    u, v, w = model.pair_arrays
    rows: list[list[tuple[int, float]]] = [[] for _ in range(nvars)]
    for a, b, weight in zip(u.tolist(), v.tolist(), w.tolist()):
        rows[a].append((b, weight))
        rows[b].append((a, weight))
    indptr = np.zeros(nvars + 1, dtype=np.int64)
    indices = []
    weights = []
    for j, row in enumerate(rows):
        row.sort()
        indptr[j + 1] = indptr[j] + len(row)
        indices.extend(k for k, _ in row)
        weights.extend(wt for _, wt in row)
    return (
        indptr,
        np.array(indices, dtype=np.int64),
        np.array(weights, dtype=dtype),
    )


def build_qubo(spec: OracleSpec, penalties: PenaltyConfig) -> QuboModel:
    """Assemble the penalized XOR-chain QUBO.

    Per gadget i (inputs x_i, x_{i+1}, output o_i, ancilla a_i):

        x_i + x_{i+1} + (1 + p_i) o_i + 4 a_i + 2 x_i x_{i+1}
        - 2 (x_i + x_{i+1}) o_i - 4 (x_i + x_{i+1}) a_i + 4 o_i a_i

    Linear coefficients on interior inputs accumulate across the two gadgets
    that share them.
    """
    n = spec.n
    if len(penalties.p) != n - 1:
        raise ValueError(
            f"penalty vector has {len(penalties.p)} entries, expected {n - 1}"
        )
    labels = var_labels(n)
    linear: dict[str, float] = {lab: 0 for lab in labels}
    quadratic: dict[tuple[str, str], float] = {}
    index = {lab: i for i, lab in enumerate(labels)}

    def couple(u: str, v: str, w: float) -> None:
        key = (u, v) if index[u] < index[v] else (v, u)
        quadratic[key] = quadratic.get(key, 0) + w

    for i in range(1, n):
        x1, x2, o, a = f"x{i}", f"x{i + 1}", f"o{i}", f"a{i}"
        p_i = _exactify(penalties.p[i - 1])
        linear[x1] += 1
        linear[x2] += 1
        linear[o] += 1 + p_i
        linear[a] += 4
        couple(x1, x2, 2)
        couple(x1, o, -2)
        couple(x2, o, -2)
        couple(x1, a, -4)
        couple(x2, a, -4)
        couple(o, a, 4)

    return QuboModel(labels=labels, linear=linear, quadratic=quadratic, offset=0)


def energy(model: QuboModel, assignment: Sequence[int]) -> int | float:
    """Evaluate the quadratic form at a bit assignment.

    Pure dict arithmetic: exact ints whenever every coefficient is an int.
    """
    bits = _as_bits(assignment, model.num_variables)
    idx = model.index
    total = model.offset
    for lab, w in model.linear.items():
        if bits[idx[lab]]:
            total += w
    for (u, v), w in model.quadratic.items():
        if bits[idx[u]] and bits[idx[v]]:
            total += w
    return total


def xor_gadget_energy(x1: int, x2: int, o: int, a: int, penalty: float = 0):
    """Energy of one XOR gadget row; zero exactly on the oracle-consistent rows
    when the penalty is zero."""
    return (
        x1 + x2 + (1 + penalty) * o + 4 * a + 2 * x1 * x2
        - 2 * (x1 + x2) * o - 4 * (x1 + x2) * a + 4 * o * a
    )


def is_oracle_valid(spec: OracleSpec, assignment: Sequence[int]) -> bool:
    """True iff every output bit is the XOR and every ancilla the AND of its
    adjacent input pair."""
    x, o, a = spec.split(assignment)
    for i in range(spec.n - 1):
        if o[i] != (x[i] ^ x[i + 1]) or a[i] != (x[i] & x[i + 1]):
            return False
    return True


@dataclass(frozen=True)
class GroundPair:
    """The two oracle-valid assignments selected by a penalty configuration.

    ``state_a`` starts with input bit 0 and ``state_b`` with 1; their input
    registers are bitwise complements.  When some penalty is exactly zero the
    true ground manifold is larger than this pair and
    ``degenerate_beyond_pair`` is set.
    """

    target_output: Bits
    state_a: Bits
    state_b: Bits
    ground_energy: int | float
    degenerate_beyond_pair: bool

    @property
    def inputs(self) -> tuple[Bits, Bits]:
        n = (len(self.state_a) + 2) // 3
        return self.state_a[:n], self.state_b[:n]

    @property
    def period(self) -> Bits:
        za, zb = self.inputs
        return recover_period(za, zb)


def predict_ground_pair(spec: OracleSpec, penalties: PenaltyConfig) -> GroundPair:
    """Predict the minimum-energy pair without solving anything.

    A valid assignment costs sum_i p_i*o_i, so the cheapest output sets
    o_i = 1 exactly where p_i < 0, and the two chains realizing it start from
    x_1 = 0 and x_1 = 1.  The predicted energy is the sum of the negative
    penalties; the exact solvers confirm this (it is what the test suite
    leans on).
    """
    n = spec.n
    if len(penalties.p) != n - 1:
        raise ValueError(
            f"penalty vector has {len(penalties.p)} entries, expected {n - 1}"
        )
    p = [_exactify(v) for v in penalties.p]
    o_star = tuple(1 if v < 0 else 0 for v in p)

    def chain(x1: int) -> Bits:
        x = [x1]
        for bit in o_star:
            x.append(x[-1] ^ bit)
        a = tuple(x[i] & x[i + 1] for i in range(n - 1))
        return tuple(x) + o_star + a

    ground = sum(v for v in p if v < 0)
    return GroundPair(
        target_output=o_star,
        state_a=chain(0),
        state_b=chain(1),
        ground_energy=ground,
        degenerate_beyond_pair=any(v == 0 for v in p),
    )


def recover_period(z: Sequence[int], z_prime: Sequence[int]) -> Bits:
    """Bitwise XOR of two colliding inputs; all-ones for this oracle family."""
    za = _as_bits(z)
    zb = _as_bits(z_prime, len(za))
    if za == zb:
        raise ValueError("inputs are identical; no period to recover")
    return tuple(a ^ b for a, b in zip(za, zb))


def validate_penalties(spec: OracleSpec, penalties: PenaltyConfig) -> list[str]:
    """Advisory magnitude checks; never rejects.

    Moderate magnitudes work best: values at or below 1, or at or above n,
    blur the separation the penalties are supposed to create, and a zero
    penalty leaves its output bit unconstrained (degenerate ground manifold).
    """
    warnings = []
    n = spec.n
    for i, v in enumerate(penalties.p, start=1):
        mag = abs(v)
        if v == 0:
            warnings.append(
                f"p_{i} = 0: output o_{i} is unpenalized; ground state stays degenerate"
            )
        elif mag <= 1:
            warnings.append(f"p_{i} = {v}: magnitude <= 1 is too low to separate outputs")
        elif mag >= n:
            warnings.append(f"p_{i} = {v}: magnitude >= n = {n} is too high")
    return warnings


# ---------------------------------------------------------------------------
# JSON surface
# ---------------------------------------------------------------------------

def model_to_dict(
    model: QuboModel,
    penalties: PenaltyConfig | None = None,
    meta: dict | None = None,
) -> dict:
    """JSON-ready form: n, penalties, labels, linear, quadratic triples, offset.

    Integer coefficients stay ints, so dump/load round-trips bit-exactly for
    the integral models this family normally produces.  When ``penalties`` is
    not supplied the vector is read back off the output-variable coefficients.
    """
    n = sum(1 for lab in model.labels if lab.startswith("x"))
    if penalties is not None:
        pvec = list(penalties.p)
    else:
        pvec = [_exactify(model.linear.get(f"o{i}", 0) - 1) for i in range(1, n)]
    doc = {
        "n": n,
        "penalties": pvec,
        "labels": list(model.labels),
        "linear": dict(model.linear),
        "quadratic": [[u, v, w] for (u, v), w in model.quadratic.items()],
        "offset": model.offset,
    }
    if meta is not None:
        doc["meta"] = meta
    return doc


def model_from_dict(doc: dict) -> QuboModel:
    labels = tuple(doc["labels"])
    index = {lab: i for i, lab in enumerate(labels)}
    linear = {lab: _exactify(w) for lab, w in doc["linear"].items()}
    quadratic: dict[tuple[str, str], float] = {}
    for u, v, w in doc["quadratic"]:
        if u == v:
            raise ValueError(f"self-coupling on {u!r} is not allowed")
        key = (u, v) if index[u] < index[v] else (v, u)
        quadratic[key] = quadratic.get(key, 0) + _exactify(w)
    return QuboModel(
        labels=labels,
        linear=linear,
        quadratic=quadratic,
        offset=_exactify(doc.get("offset", 0)),
    )


def save_model(
    model: QuboModel,
    fp: IO[str],
    penalties: PenaltyConfig | None = None,
    meta: dict | None = None,
) -> None:
    json.dump(model_to_dict(model, penalties=penalties, meta=meta), fp, indent=2)
    fp.write("\n")


def load_model(fp: IO[str]) -> QuboModel:
    return model_from_dict(json.load(fp))
