"""Additive potential functions and per-boundary-edge drift terms.

For an additive potential ``phi(S) = sum_{x in S} weight(x)`` and a boundary
edge (u mutant, v resident), the one-step drift contributions are

    psi_bd = (1/w(S)) * [ (r/deg_u) * weight(v) - (1/deg_v) * weight(u) ]
    psi_db = (1/n)    * [ (r/w_v(S)) * weight(v) - (1/w_u(S)) * weight(u) ]
    psi    = lam * psi_bd + (1 - lam) * psi_db

and summing psi over all boundary edges equals the expected one-step change
of phi.  Martingale identities (neutral fitness on regular or bidegreed
graphs, or the half-mixed process on any graph) are exact rational
statements, so every operation here has an exact mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._util import as_fraction
from .graphs import Graph
from .process import Configuration, ProcessParams

__all__ = [
    "Potential",
    "DriftTerms",
    "NotBoundaryEdgeError",
    "boundary_edges",
    "edge_drift",
    "expected_drift",
    "is_bad_configuration",
]


class NotBoundaryEdgeError(ValueError):
    pass


def bidegreed_weight_ratio(lam: Fraction, d1: int, d2: int) -> Fraction:
    """Weight assigned to the higher degree class, normalizing f(d1) = 1."""
    return Fraction(lam * d1 + (1 - lam) * d2, lam * d2 + (1 - lam) * d1)


@dataclass(frozen=True)
class Potential:
    """Additive vertex-weight potential.

    ``weights_exact`` holds the defining rational values; ``weights`` is the
    float64 shadow used by the numeric paths.
    """

    kind: str
    weights_exact: tuple[Fraction, ...]

    @property
    def weights(self) -> np.ndarray:
        return np.array([float(w) for w in self.weights_exact])

    def value(self, cfg: Configuration, exact: bool = False) -> float | Fraction:
        """phi(S): the weight sum over mutant vertices."""
        total = sum(self.weights_exact[v] for v in cfg.vertices())
        return total if exact else float(total)

    def total(self, exact: bool = False) -> float | Fraction:
        total = sum(self.weights_exact)
        return total if exact else float(total)

    @classmethod
    def cardinality(cls, g: Graph) -> "Potential":
        return cls("cardinality", (Fraction(1),) * g.n)

    @classmethod
    def degree(cls, g: Graph) -> "Potential":
        return cls("degree", tuple(Fraction(d) for d in g.degrees))

    @classmethod
    def inverse_degree(cls, g: Graph) -> "Potential":
        return cls("inverse_degree", tuple(Fraction(1, d) for d in g.degrees))

    @classmethod
    def bidegreed_f(cls, g: Graph, lam: int | float | str | Fraction) -> "Potential":
        """Weights 1 on the low-degree class, the lam-dependent ratio above it.

        Requires a bidegreed graph; on a regular graph all weights are 1.
        """
        from .graphs import degree_profile

        profile = degree_profile(g)
        d1, d2 = profile.bidegree
        lam_f = as_fraction(lam)
        f2 = Fraction(1) if d1 == d2 else bidegreed_weight_ratio(lam_f, d1, d2)
        return cls("bidegreed_f", tuple(Fraction(1) if d == d1 else f2 for d in g.degrees))

    @classmethod
    def custom(cls, weights: Sequence[int | float | str | Fraction]) -> "Potential":
        ws = tuple(as_fraction(w) for w in weights)
        if any(w < 0 for w in ws):
            raise ValueError("custom potential weights must be nonnegative")
        return cls("custom", ws)


@dataclass(frozen=True)
class DriftTerms:
    psi_bd: float | Fraction
    psi_db: float | Fraction
    psi_lambda: float | Fraction


def boundary_edges(g: Graph, cfg: Configuration) -> list[tuple[int, int]]:
    """Ordered pairs (mutant u, resident v) with {u, v} an edge."""
    return [(u, v) for u in cfg.vertices() for v in g.adjacency[u] if v not in cfg]


def edge_drift(g: Graph, cfg: Configuration, potential: Potential,
               params: ProcessParams, u: int, v: int, exact: bool = False) -> DriftTerms:
    """The three drift terms of the boundary edge (u, v).

    Raises :class:`NotBoundaryEdgeError` unless u is a mutant, v a resident,
    and {u, v} an edge.
    """
    if u not in cfg or v in cfg or v not in g.adjacency[u]:
        raise NotBoundaryEdgeError(f"({u}, {v}) is not a mutant->resident edge")
    if exact:
        lam, r = params.exact()
        wu = potential.weights_exact[u]
        wv = potential.weights_exact[v]
    else:
        lam, r = params.lam, params.r
        w_arr = potential.weights
        wu, wv = float(w_arr[u]), float(w_arr[v])
    n = g.n
    k = cfg.size
    w_total = r * k + (n - k)
    mu = sum(1 for x in g.adjacency[u] if x in cfg)
    mv = sum(1 for x in g.adjacency[v] if x in cfg)
    w_u = r * mu + (g.degrees[u] - mu)
    w_v = r * mv + (g.degrees[v] - mv)
    psi_bd = (r * wv / g.degrees[u] - wu / g.degrees[v]) / w_total
    psi_db = (r * wv / w_v - wu / w_u) / n
    psi_lambda = lam * psi_bd + (1 - lam) * psi_db
    return DriftTerms(psi_bd, psi_db, psi_lambda)


def expected_drift(g: Graph, cfg: Configuration, potential: Potential,
                   params: ProcessParams, exact: bool = False) -> float | Fraction:
    """Expected one-step change of the potential: sum of psi over bdry(S)."""
    zero = Fraction(0) if exact else 0.0
    return sum(
        (edge_drift(g, cfg, potential, params, u, v, exact=exact).psi_lambda
         for u, v in boundary_edges(g, cfg)),
        zero,
    )


def is_bad_configuration(g: Graph, cfg: Configuration) -> bool:
    """True when every mutant has only resident neighbors and vice versa.

    Equivalently, the mutant set and its complement are both independent
    sets, so every edge is a boundary edge and fitness cancels out of the
    death-Birth neighbor lottery.
    """
    for u in range(g.n):
        u_mut = u in cfg
        for v in g.adjacency[u]:
            if (v in cfg) == u_mut:
                return False
    return True
