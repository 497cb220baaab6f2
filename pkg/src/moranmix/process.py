"""The mixed Moran process kernel.

One step of the process is, with probability ``lam``, a Birth-death update
(reproducer drawn proportional to fitness over all vertices, then a uniform
neighbor dies) and otherwise a death-Birth update (uniform vertex dies, then
a neighbor reproduces into the vacancy proportional to fitness).  Mutants
have fitness ``r``, residents fitness 1.

The one-step kernel is exposed in marginalized form: per-vertex probabilities
that a mutant is placed on a resident vertex (``gain``) or a resident on a
mutant vertex (``loss``), plus the residual ``stay``.  The state change of a
step depends only on which vertex flips, so this loses nothing and keeps
transition rows at ``n + 1`` entries.

For a resident vertex v and mutant vertex u the marginals are

    gain(v) = lam * sum_{u in N(v) cap S} (r / w(S)) (1 / deg_u)
              + (1 - lam) * (1/n) * r |N(v) cap S| / w_v(S)
    loss(u) = lam * sum_{v in N(u) \\ S} (1 / w(S)) (1 / deg_v)
              + (1 - lam) * (1/n) * |N(u) \\ S| / w_u(S)

with ``w(S) = r|S| + (n - |S|)`` the population fitness and
``w_v(S) = r |N(v) cap S| + (deg_v - |N(v) cap S|)`` the fitness within the
neighborhood of v.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Union

import numpy as np

from ._util import as_fraction
from .graphs import Graph

__all__ = [
    "ProcessParams",
    "Configuration",
    "TransitionDistribution",
    "Outcome",
    "AbsorptionResult",
    "total_fitness",
    "neighborhood_fitness",
    "transition_distribution",
    "transition_distribution_exact",
    "sample_step",
    "run_to_absorption",
    "default_max_steps",
]

Scalar = Union[int, float, str, Fraction]


class ProcessParams:
    """Process parameters: mixing weight ``lam`` and mutant fitness ``r``.

    ``lam`` is the probability that a step is a Birth-death update
    (``lam = 1`` is pure Bd, ``lam = 0`` pure dB).  Parameters are stored in
    double precision; exact rational forms (for the exact-arithmetic solvers)
    are kept alongside, derived from the constructor arguments so that
    decimal strings and Fractions stay exact.
    """

    __slots__ = ("lam", "r", "lam_exact", "r_exact")

    def __init__(self, lam: Scalar, r: Scalar):
        lam_exact = as_fraction(lam)
        r_exact = as_fraction(r)
        if not 0 <= lam_exact <= 1:
            raise ValueError(f"lam must be in [0, 1], got {lam}")
        if r_exact <= 0:
            raise ValueError(f"r must be positive, got {r}")
        self.lam = float(lam_exact)
        self.r = float(r_exact)
        self.lam_exact = lam_exact
        self.r_exact = r_exact

    def exact(self) -> tuple[Fraction, Fraction]:
        return self.lam_exact, self.r_exact

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProcessParams):
            return NotImplemented
        return (self.lam_exact, self.r_exact) == (other.lam_exact, other.r_exact)

    def __hash__(self) -> int:
        return hash((self.lam_exact, self.r_exact))

    def __repr__(self) -> str:
        return f"ProcessParams(lam={self.lam}, r={self.r})"


@dataclass(frozen=True)
class Configuration:
    """Bit-packed mutant set over vertices ``0..n-1``.

    Bit v of ``mutants`` is set iff vertex v hosts a mutant.  Absorbing means
    the empty set (extinction) or the full set (fixation).
    """

    mutants: int
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"need n >= 1, got {self.n}")
        if not 0 <= self.mutants < (1 << self.n):
            raise ValueError(f"mutant bits out of range for n={self.n}")

    @classmethod
    def from_vertices(cls, vertices: Iterable[int], n: int) -> "Configuration":
        mask = 0
        for v in vertices:
            if not 0 <= v < n:
                raise ValueError(f"vertex {v} out of range for n={n}")
            mask |= 1 << v
        return cls(mask, n)

    @classmethod
    def empty(cls, n: int) -> "Configuration":
        return cls(0, n)

    @classmethod
    def full(cls, n: int) -> "Configuration":
        return cls((1 << n) - 1, n)

    @property
    def size(self) -> int:
        return self.mutants.bit_count()

    @property
    def is_empty(self) -> bool:
        return self.mutants == 0

    @property
    def is_full(self) -> bool:
        return self.mutants == (1 << self.n) - 1

    @property
    def is_absorbing(self) -> bool:
        return self.is_empty or self.is_full

    def __contains__(self, v: int) -> bool:
        return bool((self.mutants >> v) & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.vertices())

    def vertices(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.n) if (self.mutants >> v) & 1)

    def residents(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.n) if not (self.mutants >> v) & 1)

    def with_mutant(self, v: int) -> "Configuration":
        return Configuration(self.mutants | (1 << v), self.n)

    def without_mutant(self, v: int) -> "Configuration":
        return Configuration(self.mutants & ~(1 << v), self.n)

    def as_bool_array(self) -> np.ndarray:
        bits = (self.mutants >> np.arange(self.n)) & 1
        return bits.astype(bool)


@dataclass(frozen=True)
class TransitionDistribution:
    """One-step kernel from a configuration, marginalized to vertex flips.

    ``gain[v]`` is the probability that vertex v (currently resident) flips
    to mutant; ``loss[u]`` that vertex u (currently mutant) flips to
    resident; ``stay`` the residual.  Entries on the wrong side are zero.
    Arrays are float64 in the default mode and object arrays of Fractions in
    exact mode, in which case the normalization holds exactly.
    """

    gain: np.ndarray
    loss: np.ndarray
    stay: float | Fraction

    @property
    def total_flip(self) -> float | Fraction:
        return self.gain.sum() + self.loss.sum()


def total_fitness(cfg: Configuration, params: ProcessParams) -> float:
    """Population fitness ``r |S| + (n - |S|)``."""
    k = cfg.size
    return params.r * k + (cfg.n - k)


def neighborhood_fitness(g: Graph, cfg: Configuration, u: int, params: ProcessParams) -> float:
    """Fitness within N(u): ``r m + (deg_u - m)`` with m mutant neighbors."""
    m = sum(1 for v in g.adjacency[u] if v in cfg)
    return params.r * m + (g.degrees[u] - m)


def _transition_arrays(g: Graph, bits: np.ndarray, lam: float, r: float
                       ) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized gain/loss vectors for the mutant indicator ``bits``."""
    indptr, indices, deg, inv_deg = g.csr()
    n = g.n
    mut = bits.astype(np.float64)
    k = mut.sum()
    w = r * k + (n - k)
    nbr_mut = mut[indices]
    m_count = np.add.reduceat(nbr_mut, indptr[:-1])
    inv_mut = np.add.reduceat(nbr_mut * inv_deg[indices], indptr[:-1])
    inv_res = np.add.reduceat((1.0 - nbr_mut) * inv_deg[indices], indptr[:-1])
    w_local = r * m_count + (deg - m_count)
    gain = lam * (r / w) * inv_mut + (1.0 - lam) * (r / n) * (m_count / w_local)
    loss = lam * (1.0 / w) * inv_res + (1.0 - lam) * (1.0 / n) * ((deg - m_count) / w_local)
    gain[bits] = 0.0
    loss[~bits] = 0.0
    return gain, loss


def _transition_arrays_batch(g: Graph, bits: np.ndarray, lam: float, r: float
                             ) -> tuple[np.ndarray, np.ndarray]:
    """Same marginals as :func:`_transition_arrays` for a (B, n) batch.

    Rows for absorbing indicators come out all-zero (stay = 1).  Used by the
    exact solver to assemble all 2^n transition rows at once; agreement with
    the single-state path is pinned by tests.
    """
    n = g.n
    indptr, indices, deg, inv_deg = g.csr()
    adj = np.zeros((n, n))
    for u in range(n):
        adj[u, indices[indptr[u]:indptr[u + 1]]] = 1.0
    bf = bits.astype(np.float64)
    k = bf.sum(axis=1)
    w = r * k + (n - k)
    m_count = bf @ adj
    inv_mut = (bf * inv_deg) @ adj
    inv_res = ((1.0 - bf) * inv_deg) @ adj
    w_local = r * m_count + (deg - m_count)
    gain = lam * (r / w)[:, None] * inv_mut + (1.0 - lam) * (r / n) * (m_count / w_local)
    loss = lam * (1.0 / w)[:, None] * inv_res + (1.0 - lam) / n * ((deg - m_count) / w_local)
    gain[bits] = 0.0
    loss[~bits] = 0.0
    return gain, loss


def transition_distribution(g: Graph, cfg: Configuration, params: ProcessParams
                            ) -> TransitionDistribution:
    """Exact one-step flip distribution from ``cfg`` (float64 arithmetic)."""
    if g.n != cfg.n:
        raise ValueError("configuration size does not match graph")
    if cfg.is_absorbing:
        z = np.zeros(g.n)
        return TransitionDistribution(z, z.copy(), 1.0)
    gain, loss = _transition_arrays(g, cfg.as_bool_array(), params.lam, params.r)
    stay = 1.0 - float(gain.sum() + loss.sum())
    return TransitionDistribution(gain, loss, stay)


def transition_distribution_exact(g: Graph, cfg: Configuration, params: ProcessParams
                                  ) -> TransitionDistribution:
    """Flip distribution in exact rational arithmetic."""
    if g.n != cfg.n:
        raise ValueError("configuration size does not match graph")
    n = g.n
    zero = Fraction(0)
    gain = [zero] * n
    loss = [zero] * n
    if cfg.is_absorbing:
        return TransitionDistribution(
            np.array(gain, dtype=object), np.array(loss, dtype=object), Fraction(1)
        )
    lam, r = params.exact()
    k = cfg.size
    w = r * k + (n - k)
    for v in range(n):
        m_nbrs = [u for u in g.adjacency[v] if u in cfg]
        m = len(m_nbrs)
        d = g.degrees[v]
        w_local = r * m + (d - m)
        if v in cfg:
            res_nbrs = [u for u in g.adjacency[v] if u not in cfg]
            bd = sum(Fraction(1, g.degrees[u]) for u in res_nbrs) / w
            db = Fraction(d - m, n) / w_local
            loss[v] = lam * bd + (1 - lam) * db
        else:
            bd = r * sum(Fraction(1, g.degrees[u]) for u in m_nbrs) / w
            db = Fraction(1, n) * (r * m / w_local)
            gain[v] = lam * bd + (1 - lam) * db
    stay = 1 - sum(gain) - sum(loss)
    return TransitionDistribution(
        np.array(gain, dtype=object), np.array(loss, dtype=object), stay
    )


# ----------------------------------------------------------------------------
# Trajectory sampling
# ----------------------------------------------------------------------------


class Outcome(enum.Enum):
    FIXATION = "fixation"
    EXTINCTION = "extinction"
    CUTOFF = "cutoff"


@dataclass(frozen=True)
class AbsorptionResult:
    outcome: Outcome
    steps: int
    final: Configuration


def sample_step(g: Graph, cfg: Configuration, params: ProcessParams,
                rng: np.random.Generator) -> Configuration:
    """Sample one step of the process.

    Draws the update rule first (Bd with probability ``lam``), then the
    rule's two vertices.  The caller owns the generator state; identical
    states yield identical steps.
    """
    assert g.n >= 2, "process is defined on connected graphs with n >= 2"
    if cfg.is_absorbing:
        return cfg
    n, r = g.n, params.r
    if rng.random() < params.lam:
        # Bd: reproducer proportional to fitness, uniform neighbor dies.
        x = rng.random() * total_fitness(cfg, params)
        u = -1
        for v in range(n):
            x -= r if v in cfg else 1.0
            if x < 0.0:
                u = v
                break
        if u < 0:
            u = n - 1
        nbrs = g.adjacency[u]
        target = nbrs[rng.integers(len(nbrs))]
        offspring_is_mutant = u in cfg
    else:
        # dB: uniform death, neighbor reproduces proportional to fitness.
        target = int(rng.integers(n))
        y = rng.random() * neighborhood_fitness(g, cfg, target, params)
        u = -1
        for v in g.adjacency[target]:
            y -= r if v in cfg else 1.0
            if y < 0.0:
                u = v
                break
        if u < 0:
            u = g.adjacency[target][-1]
        offspring_is_mutant = u in cfg
    if offspring_is_mutant and target not in cfg:
        return cfg.with_mutant(target)
    if not offspring_is_mutant and target in cfg:
        return cfg.without_mutant(target)
    return cfg


def default_max_steps(n: int, r: float) -> int:
    """Step budget: 100x the worst-case absorption-time scale ``n^4``.

    The drift bounds give expected absorption within ``n^4 * r/(r-1)`` steps
    for ``r != 1`` and ``n^4``-scale for ``r = 1``, so this cutoff makes
    truncation a rare event.
    """
    if r == 1.0:
        factor = 1.0
    elif r > 1.0:
        factor = r / (r - 1.0)
    else:
        factor = 1.0 / (1.0 - r)
    return int(math.ceil(100.0 * n**4 * factor))


def run_to_absorption(g: Graph, cfg0: Configuration, params: ProcessParams,
                      rng: np.random.Generator, max_steps: int | None = None
                      ) -> AbsorptionResult:
    """Iterate :func:`sample_step` until absorption or the step cutoff."""
    if max_steps is None:
        max_steps = default_max_steps(g.n, params.r)
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    cfg = cfg0
    for step in range(max_steps + 1):
        if cfg.is_empty:
            return AbsorptionResult(Outcome.EXTINCTION, step, cfg)
        if cfg.is_full:
            return AbsorptionResult(Outcome.FIXATION, step, cfg)
        if step == max_steps:
            break
        cfg = sample_step(g, cfg, params, rng)
    return AbsorptionResult(Outcome.CUTOFF, max_steps, cfg)
