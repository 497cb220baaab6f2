"""Brute-force solver over all 2^n configurations.

Builds the absorbing chain row by row from the process kernel and solves

    fp[S] = sum_v gain(v) fp[S + v] + sum_u loss(u) fp[S - u] + stay * fp[S]
    t[S]  = 1 + sum P(S -> S') t[S']

with the stay probability eliminated from each row.  Because one step flips
at most one vertex, states grouped by mutant count form a block-tridiagonal
system; symmetric Gauss-Seidel sweeps in increasing then decreasing mutant
count propagate the absorbing boundary values across all levels quickly
(typically a few hundred sweeps to 1e-12).

A rational mode solves the same system in exact arithmetic for small n,
anchoring golden values like 6/31 without any floating-point drift.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graphs import Graph
from .process import (
    Configuration,
    ProcessParams,
    _transition_arrays_batch,
    transition_distribution_exact,
)

__all__ = [
    "ExactSolution",
    "TooLargeError",
    "NonConvergenceError",
    "solve",
    "solve_exact",
    "fixation_probability",
    "absorption_time",
]


class TooLargeError(ValueError):
    pass


class NonConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExactSolution:
    """Fixation probabilities and expected absorption times for all states.

    Vectors are indexed by the packed mutant bitmask.  ``fp`` and
    ``abs_time`` are float64 for the numeric solver and object arrays of
    Fractions for the rational solver (``method == "rational"``).
    """

    n: int
    params: ProcessParams
    fp: np.ndarray
    abs_time: np.ndarray
    residual: float
    sweeps: int
    method: str

    def fp_of(self, cfg: Configuration) -> float | Fraction:
        if cfg.n != self.n:
            raise ValueError("configuration size does not match solution")
        return self.fp[cfg.mutants]

    def abs_time_of(self, cfg: Configuration) -> float | Fraction:
        if cfg.n != self.n:
            raise ValueError("configuration size does not match solution")
        return self.abs_time[cfg.mutants]


def fixation_probability(sol: ExactSolution, s: Configuration) -> float | Fraction:
    return sol.fp_of(s)


def absorption_time(sol: ExactSolution, s: Configuration) -> float | Fraction:
    return sol.abs_time_of(s)


def _popcounts(n: int) -> np.ndarray:
    states = np.arange(1 << n, dtype=np.int64)
    pop = np.zeros(1 << n, dtype=np.int64)
    for v in range(n):
        pop += (states >> v) & 1
    return pop


def solve(g: Graph, params: ProcessParams, max_n: int = 16,
          residual_target: float = 1e-12, max_sweeps: int = 1_000_000) -> ExactSolution:
    """Solve for fixation probability and absorption time of every state.

    Raises :class:`TooLargeError` for ``n > max_n`` and
    :class:`NonConvergenceError` if the scaled residual does not reach
    ``residual_target`` within ``max_sweeps`` sweeps.
    """
    n = g.n
    if n > max_n:
        raise TooLargeError(f"n={n} exceeds the exact-solver cap max_n={max_n}")
    ns = 1 << n
    full = ns - 1
    states = np.arange(ns, dtype=np.int64)
    bits = ((states[:, None] >> np.arange(n)) & 1).astype(bool)
    gain, loss = _transition_arrays_batch(g, bits, params.lam, params.r)
    tot = gain.sum(axis=1) + loss.sum(axis=1)
    tot[0] = tot[full] = 1.0  # unused; avoids 0/0 in the normalization below

    pop = _popcounts(n)
    levels = [states[pop == k] for k in range(n + 1)]
    local = np.empty(ns, dtype=np.int64)
    for lvl in levels:
        local[lvl] = np.arange(len(lvl))

    # Per level: flattened (row, col, weight) links to the neighboring levels
    # plus constant terms from the absorbing boundary and the holding times.
    ups: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = [()] * (n + 1)  # type: ignore[list-item]
    downs: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = [()] * (n + 1)  # type: ignore[list-item]
    c_fp: list[np.ndarray] = [np.zeros(0)] * (n + 1)
    c_time: list[np.ndarray] = [np.zeros(0)] * (n + 1)
    for k in range(1, n):
        st = levels[k]
        size = len(st)
        ru, cu, wu = [], [], []
        rd, cd, wd = [], [], []
        const_fp = np.zeros(size)
        for v in range(n):
            bit = 1 << v
            p = gain[st, v] / tot[st]
            m = p > 0
            if m.any():
                up = st[m] | bit
                if k + 1 == n:
                    const_fp[local[st[m]]] += p[m]
                else:
                    ru.append(local[st[m]])
                    cu.append(local[up])
                    wu.append(p[m])
            q = loss[st, v] / tot[st]
            m2 = q > 0
            if m2.any() and k - 1 > 0:
                ru_states = st[m2]
                rd.append(local[ru_states])
                cd.append(local[ru_states & ~bit])
                wd.append(q[m2])
        cat = lambda xs, dt: np.concatenate(xs) if xs else np.zeros(0, dtype=dt)
        ups[k] = (cat(ru, np.int64), cat(cu, np.int64), cat(wu, np.float64))
        downs[k] = (cat(rd, np.int64), cat(cd, np.int64), cat(wd, np.float64))
        c_fp[k] = const_fp
        c_time[k] = 1.0 / tot[st]

    x_fp = [np.zeros(len(levels[k])) for k in range(n + 1)]
    x_t = [np.zeros(len(levels[k])) for k in range(n + 1)]

    def level_rhs(k: int, x: list[np.ndarray], const: list[np.ndarray]) -> np.ndarray:
        size = len(levels[k])
        ru, cu, wu = ups[k]
        rd, cd, wd = downs[k]
        rhs = const[k].copy()
        if len(ru):
            rhs += np.bincount(ru, weights=wu * x[k + 1][cu], minlength=size)
        if len(rd):
            rhs += np.bincount(rd, weights=wd * x[k - 1][cd], minlength=size)
        return rhs

    order = list(range(1, n)) + list(range(n - 1, 0, -1))
    sweeps = 0
    residual = np.inf
    while sweeps < max_sweeps:
        sweeps += 1
        for k in order:
            x_fp[k] = level_rhs(k, x_fp, c_fp)
            x_t[k] = level_rhs(k, x_t, c_time)
        res_fp = 0.0
        res_t = 0.0
        scale_t = 1.0
        for k in range(1, n):
            res_fp = max(res_fp, float(np.max(np.abs(level_rhs(k, x_fp, c_fp) - x_fp[k]))))
            res_t = max(res_t, float(np.max(np.abs(level_rhs(k, x_t, c_time) - x_t[k]))))
            scale_t = max(scale_t, float(np.max(x_t[k])))
        residual = max(res_fp, res_t / scale_t)
        if residual <= residual_target:
            break
    else:
        raise NonConvergenceError(
            f"residual {residual:.3e} above target {residual_target:.1e} "
            f"after {max_sweeps} sweeps"
        )

    fp = np.zeros(ns)
    abs_time = np.zeros(ns)
    fp[full] = 1.0
    for k in range(1, n):
        fp[levels[k]] = x_fp[k]
        abs_time[levels[k]] = x_t[k]
    return ExactSolution(n, params, fp, abs_time, residual, sweeps, "gauss-seidel")


# ----------------------------------------------------------------------------
# Exact-rational mode
# ----------------------------------------------------------------------------


def solve_exact(g: Graph, params: ProcessParams, max_n: int = 8) -> ExactSolution:
    """Solve the same system in exact rational arithmetic.

    Intended for small n (the elimination cost grows quickly); raises
    :class:`TooLargeError` beyond ``max_n``.
    """
    n = g.n
    if n > max_n:
        raise TooLargeError(f"n={n} exceeds the rational-solver cap max_n={max_n}")
    ns = 1 << n
    full = ns - 1
    order = sorted(range(1, full), key=lambda s: (s.bit_count(), s))
    rank = {s: i for i, s in enumerate(order)}

    rows: dict[int, dict[int, Fraction]] = {}
    rhs: dict[int, list[Fraction]] = {}
    containing: dict[int, set[int]] = {s: set() for s in order}
    for s in order:
        dist = transition_distribution_exact(g, Configuration(s, n), params)
        tot = dist.total_flip
        coeffs: dict[int, Fraction] = {}
        b_fp = Fraction(0)
        for v in range(n):
            if dist.gain[v]:
                t = s | (1 << v)
                p = dist.gain[v] / tot
                if t == full:
                    b_fp += p
                else:
                    coeffs[t] = coeffs.get(t, Fraction(0)) + p
            if dist.loss[v]:
                t = s & ~(1 << v)
                if t != 0:
                    coeffs[t] = coeffs.get(t, Fraction(0)) + dist.loss[v] / tot
        rows[s] = coeffs
        rhs[s] = [b_fp, 1 / tot]
        for t in coeffs:
            containing[t].add(s)

    # Forward elimination in level order: x_s = sum coeffs * x_t + rhs.
    for j in order:
        pivot = rows[j]
        pivot_rhs = rhs[j]
        for i in list(containing[j]):
            if rank[i] <= rank[j]:
                continue
            row = rows[i]
            a = row.pop(j)
            containing[j].discard(i)
            denom = 1 - a * pivot.get(i, Fraction(0))
            # Substitute x_j; a self-reference x_i inside the pivot row is
            # folded back into the diagonal.
            for t, c in pivot.items():
                if t == i:
                    continue
                row[t] = row.get(t, Fraction(0)) + a * c
                containing[t].add(i)
            rhs[i] = [bi + a * bj for bi, bj in zip(rhs[i], pivot_rhs)]
            if denom != 1:
                for t in row:
                    row[t] /= denom
                rhs[i] = [b / denom for b in rhs[i]]

    x_fp: dict[int, Fraction] = {0: Fraction(0), full: Fraction(1)}
    x_t: dict[int, Fraction] = {0: Fraction(0), full: Fraction(0)}
    for j in reversed(order):
        b_fp, b_t = rhs[j]
        for t, c in rows[j].items():
            b_fp += c * x_fp[t]
            b_t += c * x_t[t]
        x_fp[j] = b_fp
        x_t[j] = b_t

    fp = np.empty(ns, dtype=object)
    abs_time = np.empty(ns, dtype=object)
    for s in range(ns):
        fp[s] = x_fp.get(s, Fraction(0))
        abs_time[s] = x_t.get(s, Fraction(0))
    return ExactSolution(n, params, fp, abs_time, 0.0, 0, "rational")
