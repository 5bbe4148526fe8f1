# cython: boundscheck=False, wraparound=False, nonecheck=False, cdivision=True
"""Compiled hot loops: exhaustive energy tables and Metropolis sweeps.

Same signatures and semantics as ``_kernels_py``; see that module for the
contract notes.
"""

from libc.math cimport exp

import numpy as np

ctypedef fused coeff_t:
    long long
    double


def energy_table(coeff_t[::1] linear, long long[::1] indptr,
                 long long[::1] indices, coeff_t[::1] weights):
    """Energies of all 2**nvars assignments, indexed by little-endian code.

    Gray-code walk: each visited state differs from the previous one by a
    single bit, so the running energy updates in O(degree).
    """
    cdef Py_ssize_t nvars = linear.shape[0]
    cdef Py_ssize_t total = (<Py_ssize_t>1) << nvars
    if coeff_t is double:
        out = np.empty(total, dtype=np.float64)
    else:
        out = np.empty(total, dtype=np.int64)
    cdef coeff_t[::1] out_v = out
    cdef unsigned char[::1] state = np.zeros(nvars, dtype=np.uint8)
    cdef coeff_t e = 0
    cdef coeff_t delta
    cdef Py_ssize_t k, j, m
    out_v[0] = 0
    with nogil:
        for k in range(1, total):
            j = 0
            while not (k >> j) & 1:
                j += 1
            delta = linear[j]
            for m in range(indptr[j], indptr[j + 1]):
                if state[indices[m]]:
                    delta = delta + weights[m]
            if state[j]:
                e = e - delta
                state[j] = 0
            else:
                e = e + delta
                state[j] = 1
            out_v[k ^ (k >> 1)] = e
    return out


def metropolis_run(unsigned char[::1] state, double[::1] linear,
                   long long[::1] indptr, long long[::1] indices,
                   double[::1] weights, double[::1] betas,
                   double[::1] uniforms):
    """Run len(betas) Metropolis sweeps in place over a {0,1} state vector."""
    cdef Py_ssize_t nvars = state.shape[0]
    cdef Py_ssize_t sweeps = betas.shape[0]
    cdef Py_ssize_t t, j, m, base
    cdef double beta, local, d
    with nogil:
        for t in range(sweeps):
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
