"""Pure-Python kernels, API-identical to the compiled module.

``metropolis_run`` mirrors the compiled sweep statement for statement (same
CSR walk order, same float64 ops, same positional uniform consumption), so a
fixed seed gives bit-identical states on either backend.  ``energy_table``
uses vectorized strided adds instead of the compiled Gray-code walk; for
integer coefficient arrays the results are still exactly equal, for floats
they agree to rounding.
"""

from __future__ import annotations

from math import exp

import numpy as np


def energy_table(linear, indptr, indices, weights):
    """Energies of all 2**nvars assignments, indexed by little-endian code."""
    nvars = len(linear)
    table = np.zeros((2,) * nvars, dtype=np.asarray(linear).dtype)
    everything = [slice(None)] * nvars

    def axis_of(var: int) -> int:
        # C-order raveling puts variable j (bit weight 2**j) on axis nvars-1-j
        return nvars - 1 - var

    for j in range(nvars):
        if linear[j] != 0:
            view = list(everything)
            view[axis_of(j)] = 1
            table[tuple(view)] += linear[j]
    for j in range(nvars):
        for m in range(indptr[j], indptr[j + 1]):
            k = int(indices[m])
            if k <= j:  # symmetric CSR stores each pair twice
                continue
            view = list(everything)
            view[axis_of(j)] = 1
            view[axis_of(k)] = 1
            table[tuple(view)] += weights[m]
    return table.reshape(-1)


def metropolis_run(state, linear, indptr, indices, weights, betas, uniforms):
    """Run len(betas) Metropolis sweeps in place over a {0,1} state vector.

    The uniform for slot (sweep, var) is consumed positionally whether or not
    the acceptance test needs it.
    """
    nvars = state.shape[0]
    for t in range(betas.shape[0]):
        beta = betas[t]
        base = t * nvars
        for j in range(nvars):
            local = linear[j]
            for m in range(indptr[j], indptr[j + 1]):
                if state[indices[m]]:
                    local = local + weights[m]
            d = -local if state[j] else local
            if d <= 0.0 or uniforms[base + j] < exp(-beta * d):
                state[j] ^= 1
