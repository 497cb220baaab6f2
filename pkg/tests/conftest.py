"""Shared fixtures and independent oracles.

The oracles here are deliberately written from first principles, not by
calling the library's marginalized kernel: transition probabilities come
from enumerating (rule, chooser, neighbor) triples, and reference fixation
values come from dense linear algebra or gambler's-ruin sums on collapsed
chains.  Library code is then tested against these.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from moranmix import (
    Configuration,
    Graph,
    book_graph,
    complete_graph,
    cycle_graph,
    generate_connected_gnp,
    parse_edge_list,
    path_graph,
    star_graph,
)

EXAMPLE5_TEXT = "0 1\n1 2\n1 3\n1 4\n2 3\n3 4\n"


@pytest.fixture(scope="session")
def example5() -> Graph:
    """The 5-vertex graph with degrees (1, 4, 2, 3, 2)."""
    return parse_edge_list(EXAMPLE5_TEXT)


def k33() -> Graph:
    return Graph(6, [(u, v) for u in (0, 1, 2) for v in (3, 4, 5)])


def prism() -> Graph:
    return Graph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3),
                     (0, 3), (1, 4), (2, 5)])


def wheel(rim: int) -> Graph:
    edges = [(0, i) for i in range(1, rim + 1)]
    edges += [(i, i % rim + 1) for i in range(1, rim + 1)]
    return Graph(rim + 1, edges)


def grid2x3() -> Graph:
    return Graph(6, [(0, 1), (1, 2), (3, 4), (4, 5), (0, 3), (1, 4), (2, 5)])


def corpus_graphs() -> list[Graph]:
    """Fixed 20-graph property-test corpus, all n <= 7."""
    return [
        complete_graph(2),
        path_graph(3),
        path_graph(4),
        path_graph(5),
        cycle_graph(3),
        cycle_graph(4),
        cycle_graph(5),
        cycle_graph(6),
        cycle_graph(7),
        complete_graph(4),
        complete_graph(5),
        star_graph(3),
        star_graph(6),
        parse_edge_list(EXAMPLE5_TEXT),
        book_graph(2),
        k33(),
        prism(),
        wheel(5),
        grid2x3(),
        generate_connected_gnp(7, 0.5, seed=3),
    ]


@pytest.fixture(scope="session")
def corpus() -> list[Graph]:
    return corpus_graphs()


# ----------------------------------------------------------------------------
# Oracle: per-vertex flip distribution by triple enumeration
# ----------------------------------------------------------------------------


def oracle_flip_distribution(g: Graph, cfg: Configuration, lam, r):
    """Enumerate every (rule, chooser, neighbor) outcome in rationals.

    Birth-death: reproducer u with probability fitness(u)/W, then neighbor v
    of u uniformly; v adopts u's type.  death-Birth: dying v uniformly, then
    reproducer u in N(v) with probability fitness(u)/(neighborhood fitness);
    v adopts u's type.
    """
    lam = Fraction(lam)
    r = Fraction(r)
    n = g.n
    gain = [Fraction(0)] * n
    loss = [Fraction(0)] * n
    stay = Fraction(0)
    if cfg.is_absorbing:
        return gain, loss, Fraction(1)

    def fit(v):
        return r if v in cfg else Fraction(1)

    big_w = sum(fit(v) for v in range(n))
    for u in range(n):
        for v in g.adjacency[u]:
            pr = lam * fit(u) / big_w / g.degrees[u]
            if u in cfg and v not in cfg:
                gain[v] += pr
            elif u not in cfg and v in cfg:
                loss[v] += pr
            else:
                stay += pr
    for v in range(n):
        w_nbrs = sum(fit(u) for u in g.adjacency[v])
        for u in g.adjacency[v]:
            pr = (1 - lam) * Fraction(1, n) * fit(u) / w_nbrs
            if u in cfg and v not in cfg:
                gain[v] += pr
            elif u not in cfg and v in cfg:
                loss[v] += pr
            else:
                stay += pr
    return gain, loss, stay


# ----------------------------------------------------------------------------
# Oracle: dense absorbing-chain solve for tiny graphs
# ----------------------------------------------------------------------------


def oracle_dense_solution(g: Graph, lam, r):
    """Fixation probabilities and absorption times by dense numpy solves."""
    n = g.n
    ns = 1 << n
    full = ns - 1
    P = np.zeros((ns, ns))
    for s in range(ns):
        cfg = Configuration(s, n)
        gain, loss, stay = oracle_flip_distribution(g, cfg, lam, r)
        P[s, s] = float(stay)
        for v in range(n):
            if gain[v]:
                P[s, s | (1 << v)] += float(gain[v])
            if loss[v]:
                P[s, s & ~(1 << v)] += float(loss[v])
    transient = [s for s in range(1, full)]
    Q = P[np.ix_(transient, transient)]
    b_fix = P[transient, full]
    A = np.eye(len(transient)) - Q
    fp_t = np.linalg.solve(A, b_fix)
    t_t = np.linalg.solve(A, np.ones(len(transient)))
    fp = np.zeros(ns)
    fp[full] = 1.0
    abs_time = np.zeros(ns)
    fp[transient] = fp_t
    abs_time[transient] = t_t
    return fp, abs_time


# ----------------------------------------------------------------------------
# Oracle: gambler's ruin on a collapsed birth-death chain
# ----------------------------------------------------------------------------


def gamblers_ruin_fp(up: list[Fraction], down: list[Fraction], k0: int) -> Fraction:
    """Fixation probability from state k0 of a chain on 0..len(up)+1.

    ``up[k-1]`` and ``down[k-1]`` are the move probabilities out of state k;
    absorbing at 0 and at the top.
    """
    m = len(up)
    gammas = [down[i] / up[i] for i in range(m)]
    prods = []
    acc = Fraction(1)
    for gamma in gammas:
        acc *= gamma
        prods.append(acc)
    denom = 1 + sum(prods)
    numer = 1 + sum(prods[: k0 - 1])
    return numer / denom


def complete_graph_rates(n: int, lam, r) -> tuple[list[Fraction], list[Fraction]]:
    """Up/down probabilities for the mutant count on the complete graph.

    Derived directly: in a Bd step a mutant reproduces with probability
    rk/W and hits one of the n-k residents among its n-1 neighbors; in a dB
    step a resident dies with probability (n-k)/n and a mutant wins its
    neighbor lottery rk/(rk + n-1-k).  Symmetrically for down moves.
    """
    lam = Fraction(lam)
    r = Fraction(r)
    up, down = [], []
    for k in range(1, n):
        w = r * k + (n - k)
        up_bd = (r * k / w) * Fraction(n - k, n - 1)
        down_bd = (Fraction(n - k, 1) / w) * Fraction(k, n - 1)
        up_db = Fraction(n - k, n) * (r * k / (r * k + (n - 1 - k)))
        down_db = Fraction(k, n) * ((n - k) / (r * (k - 1) + (n - k)))
        up.append(lam * up_bd + (1 - lam) * up_db)
        down.append(lam * down_bd + (1 - lam) * down_db)
    return up, down
