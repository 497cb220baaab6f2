"""Compiled trajectory runner for the Monte Carlo estimator.

Replicates are embarrassingly parallel: each owns a counter-based RNG stream
seeded from its replicate index, writes only its own output slot, and the
aggregation is integer counting, so results are identical for any thread
count.  Outcome codes: 0 extinction, 1 fixation, 2 cutoff.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D4A4A979FB4A1E)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53

EXTINCTION = 0
FIXATION = 1
CUTOFF = 2


@njit(inline="always", cache=True)
def _next_unit(state):
    # splitmix64 step -> uniform double in [0, 1)
    state = state + _GOLDEN
    z = state
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    z = z ^ (z >> np.uint64(31))
    return state, (z >> np.uint64(11)) * _INV53


@njit(inline="always", cache=True)
def _one_step(indptr, indices, is_mut, order, pos, m, lam, r, state):
    """Advance one step in place; returns (state, m, flip_code).

    flip_code: 0 no change, v+1 vertex v became mutant, -(v+1) became
    resident.  ``order``/``pos`` keep a mutants-first permutation so the
    fitness-proportional draw is O(1).
    """
    n = is_mut.shape[0]
    state, u1 = _next_unit(state)
    if u1 < lam:
        # Birth-death: reproducer by fitness over everyone, uniform neighbor dies.
        w = r * m + (n - m)
        state, u2 = _next_unit(state)
        x = u2 * w
        if x < r * m:
            idx = np.int64(x / r)
            if idx >= m:
                idx = m - 1
            u = order[idx]
        else:
            idx = np.int64(x - r * m)
            if idx >= n - m:
                idx = n - m - 1
            u = order[m + idx]
        d = indptr[u + 1] - indptr[u]
        state, u3 = _next_unit(state)
        j = np.int64(u3 * d)
        if j >= d:
            j = d - 1
        target = indices[indptr[u] + j]
        offspring_mutant = is_mut[u] == 1
    else:
        # death-Birth: uniform death, neighbor lottery by fitness decides the type.
        state, u2 = _next_unit(state)
        target = np.int64(u2 * n)
        if target >= n:
            target = n - 1
        mv = 0
        for j in range(indptr[target], indptr[target + 1]):
            mv += is_mut[indices[j]]
        dv = indptr[target + 1] - indptr[target]
        wv = r * mv + (dv - mv)
        state, u3 = _next_unit(state)
        offspring_mutant = u3 * wv < r * mv
    flip = 0
    if offspring_mutant and is_mut[target] == 0:
        is_mut[target] = 1
        i = pos[target]
        other = order[m]
        order[i] = other
        order[m] = target
        pos[target] = m
        pos[other] = i
        m += 1
        flip = target + 1
    elif (not offspring_mutant) and is_mut[target] == 1:
        is_mut[target] = 0
        i = pos[target]
        other = order[m - 1]
        order[i] = other
        order[m - 1] = target
        pos[target] = m - 1
        pos[other] = i
        m -= 1
        flip = -(target + 1)
    return state, m, flip


@njit(inline="always", cache=True)
def _init_occupancy(init_mut, is_mut, order, pos):
    n = init_mut.shape[0]
    m = 0
    for v in range(n):
        is_mut[v] = init_mut[v]
        if init_mut[v] == 1:
            order[m] = v
            pos[v] = m
            m += 1
    k = m
    for v in range(n):
        if init_mut[v] == 0:
            order[k] = v
            pos[v] = k
            k += 1
    return m


@njit(cache=True, parallel=True)
def run_batch(indptr, indices, init_mut, lam, r, seeds, max_steps):
    """Run one absorption trajectory per seed; returns (outcomes, steps)."""
    nrep = seeds.shape[0]
    n = init_mut.shape[0]
    outcomes = np.empty(nrep, dtype=np.int8)
    steps = np.empty(nrep, dtype=np.int64)
    for k in prange(nrep):
        is_mut = np.empty(n, dtype=np.uint8)
        order = np.empty(n, dtype=np.int64)
        pos = np.empty(n, dtype=np.int64)
        m = _init_occupancy(init_mut, is_mut, order, pos)
        state = seeds[k]
        t = 0
        while 0 < m < n and t < max_steps:
            state, m, _ = _one_step(indptr, indices, is_mut, order, pos, m, lam, r, state)
            t += 1
        if m == 0:
            outcomes[k] = EXTINCTION
        elif m == n:
            outcomes[k] = FIXATION
        else:
            outcomes[k] = CUTOFF
        steps[k] = t
    return outcomes, steps


@njit(cache=True, parallel=True)
def sample_flips(indptr, indices, init_mut, lam, r, seeds):
    """One step per seed from the same start; returns each step's flip code."""
    nrep = seeds.shape[0]
    n = init_mut.shape[0]
    flips = np.empty(nrep, dtype=np.int64)
    for k in prange(nrep):
        is_mut = np.empty(n, dtype=np.uint8)
        order = np.empty(n, dtype=np.int64)
        pos = np.empty(n, dtype=np.int64)
        m = _init_occupancy(init_mut, is_mut, order, pos)
        state = seeds[k]
        state, m, flip = _one_step(indptr, indices, is_mut, order, pos, m, lam, r, state)
        flips[k] = flip
    return flips
