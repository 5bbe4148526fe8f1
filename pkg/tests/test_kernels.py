"""Compiled/pure kernel equivalence: both must give bit-identical answers."""

from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest

from simonlab import kernels
from simonlab import _kernels_py
from simonlab.exact import decode_state
from simonlab.qubo import OracleSpec, PenaltyConfig, adjacency_csr, build_qubo, energy

try:
    from simonlab import _kernels as _compiled
except ImportError:  # pragma: no cover - depends on the build environment
    _compiled = None

needs_compiled = pytest.mark.skipif(
    _compiled is None, reason="compiled extension not built"
)


def _chain_arrays(n, penalties, dtype):
    model = build_qubo(OracleSpec(n), penalties)
    h = np.array(model.linear_vector, dtype=dtype)
    indptr, indices, weights = adjacency_csr(model, dtype=dtype)
    return model, h, indptr, indices, weights


def test_backend_tag_is_consistent():
    assert kernels.BACKEND in ("compiled", "pure")
    assert kernels.backend() == kernels.BACKEND


def test_pure_energy_table_matches_direct_evaluation():
    model, h, indptr, indices, weights = _chain_arrays(
        3, PenaltyConfig.explicit([2, -2]), np.int64
    )
    table = _kernels_py.energy_table(h, indptr, indices, weights)
    for code in range(table.size):
        assert table[code] == energy(model, decode_state(code, 7))


@needs_compiled
def test_energy_table_backends_agree_int():
    rng = np.random.default_rng(3)
    for _ in range(8):
        n = int(rng.integers(2, 6))
        pens = PenaltyConfig.explicit(
            [int(v) for v in rng.integers(-4, 5, size=n - 1)]
        )
        _, h, indptr, indices, weights = _chain_arrays(n, pens, np.int64)
        a = _compiled.energy_table(h, indptr, indices, weights)
        b = _kernels_py.energy_table(h, indptr, indices, weights)
        assert a.dtype == b.dtype == np.int64
        assert np.array_equal(np.asarray(a), b)


@needs_compiled
def test_energy_table_backends_agree_float():
    rng = np.random.default_rng(4)
    for _ in range(5):
        n = int(rng.integers(2, 5))
        pens = PenaltyConfig.explicit(rng.uniform(-2, 2, size=n - 1).tolist())
        _, h, indptr, indices, weights = _chain_arrays(n, pens, np.float64)
        a = np.asarray(_compiled.energy_table(h, indptr, indices, weights))
        b = _kernels_py.energy_table(h, indptr, indices, weights)
        assert a.dtype == b.dtype == np.float64
        assert np.allclose(a, b, atol=1e-12, rtol=0)


@needs_compiled
def test_metropolis_backends_walk_identically():
    """Same positions, same uniforms, same betas: the two implementations must
    visit exactly the same trajectory, so final states match bitwise."""
    rng = np.random.default_rng(12)
    for trial in range(6):
        n = int(rng.integers(2, 6))
        pens = PenaltyConfig.balanced(n)
        _, h, indptr, indices, weights = _chain_arrays(n, pens, np.float64)
        nvars = h.size
        sweeps = 40
        betas = np.geomspace(0.1, 5.0, sweeps)
        uniforms = rng.random(sweeps * nvars)
        init = rng.integers(0, 2, size=nvars, dtype=np.uint8)

        state_a = init.copy()
        _compiled.metropolis_run(state_a, h, indptr, indices, weights, betas, uniforms)
        state_b = init.copy()
        _kernels_py.metropolis_run(state_b, h, indptr, indices, weights, betas, uniforms)
        assert np.array_equal(state_a, state_b)


def test_metropolis_zero_temperature_descends():
    """With acceptance uniforms pinned to 1, only strictly downhill (or free)
    flips happen, so energy can never increase."""
    model, h, indptr, indices, weights = _chain_arrays(
        4, PenaltyConfig.balanced(4), np.float64
    )
    nvars = h.size
    betas = np.full(30, 50.0)
    uniforms = np.ones(30 * nvars)  # never accept uphill
    rng = np.random.default_rng(2)
    for _ in range(10):
        state = rng.integers(0, 2, size=nvars, dtype=np.uint8)
        before = energy(model, tuple(int(b) for b in state))
        kernels.metropolis_run(state, h, indptr, indices, weights, betas, uniforms)
        after = energy(model, tuple(int(b) for b in state))
        assert after <= before


def test_pure_fallback_forced_by_env(tmp_path):
    code = (
        "from simonlab import kernels; print(kernels.backend())"
    )
    env = dict(os.environ, SIMONLAB_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env=env
    )
    assert out.returncode == 0, out.stderr
    assert out.stdout.strip() == "pure"
