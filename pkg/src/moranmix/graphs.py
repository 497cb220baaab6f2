"""Graph representation, edge-list I/O, random generation, and degree certification.

All process code in this package operates on :class:`Graph`: a connected,
simple, undirected graph with dense vertex ids ``0..n-1``.  The degree
certificate (:class:`DegreeProfile`) classifies graphs as regular, bidegreed,
or alpha-almost-regular, with alpha kept as an exact rational so threshold
tests like ``r >= alpha**2`` are decidable without rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ._util import mix64

__all__ = [
    "Graph",
    "DegreeProfile",
    "Disconnected",
    "DISCONNECTED",
    "GraphError",
    "MalformedLineError",
    "SelfLoopError",
    "DuplicateEdgeError",
    "DisconnectedError",
    "InvalidParamError",
    "parse_edge_list",
    "serialize_edge_list",
    "degree_profile",
    "gnp_edges",
    "generate_gnp",
    "generate_connected_gnp",
    "complete_graph",
    "cycle_graph",
    "path_graph",
    "star_graph",
    "book_graph",
    "random_regular_graph",
]


class GraphError(ValueError):
    """Base class for graph construction and parsing failures."""


class MalformedLineError(GraphError):
    pass


class SelfLoopError(GraphError):
    pass


class DuplicateEdgeError(GraphError):
    pass


class DisconnectedError(GraphError):
    pass


class InvalidParamError(GraphError):
    pass


class Disconnected:
    """Marker returned by :func:`generate_gnp` when the sample is disconnected.

    Returned instead of raising so callers can resample cheaply.  Falsy, so
    ``if not g: ...`` reads naturally.
    """

    _instance: "Disconnected | None" = None

    def __new__(cls) -> "Disconnected":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __bool__(self) -> bool:
        return False

    def __repr__(self) -> str:
        return "DISCONNECTED"


DISCONNECTED = Disconnected()


class Graph:
    """Immutable connected simple undirected graph with dense 0-based ids.

    Invariants enforced at construction: no self-loops, no duplicate edges,
    symmetry of adjacency, connectivity, and ``deg(u) >= 1`` for every vertex.
    Instances are safe to share across threads; all fields are read-only
    after ``__init__``.
    """

    __slots__ = ("n", "adjacency", "degrees", "relabeling", "_csr")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]],
                 relabeling: dict[int, int] | None = None):
        if n < 2:
            raise InvalidParamError(f"need at least 2 vertices, got n={n}")
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise MalformedLineError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise SelfLoopError(f"self-loop at vertex {u}")
            if v in nbrs[u]:
                raise DuplicateEdgeError(f"duplicate edge ({u}, {v})")
            nbrs[u].add(v)
            nbrs[v].add(u)
        adjacency = tuple(tuple(sorted(s)) for s in nbrs)
        _check_connected(n, adjacency)
        self.n = n
        self.adjacency = adjacency
        self.degrees = tuple(len(a) for a in adjacency)
        self.relabeling = relabeling
        self._csr: tuple[np.ndarray, ...] | None = None

    @classmethod
    def from_edges(cls, edges: Sequence[tuple[int, int]], n: int | None = None) -> "Graph":
        """Build a graph from an edge list; ``n`` defaults to ``1 + max id``."""
        if n is None:
            if not edges:
                raise DisconnectedError("no edges given")
            n = 1 + max(max(u, v) for u, v in edges)
        return cls(n, edges)

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self.adjacency[u]

    def num_edges(self) -> int:
        return sum(self.degrees) // 2

    def edges(self) -> list[tuple[int, int]]:
        """Canonical edge list: pairs ``(u, v)`` with ``u < v``, sorted."""
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Cached CSR view ``(indptr, indices, deg, inv_deg)`` as numpy arrays."""
        if self._csr is None:
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            indptr[1:] = np.cumsum(self.degrees)
            indices = np.fromiter(
                (v for a in self.adjacency for v in a), dtype=np.int64, count=indptr[-1]
            )
            deg = np.array(self.degrees, dtype=np.float64)
            self._csr = (indptr, indices, deg, 1.0 / deg)
        return self._csr

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.adjacency == other.adjacency

    def __hash__(self) -> int:
        return hash((self.n, self.adjacency))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges()})"


def _check_connected(n: int, adjacency: tuple[tuple[int, ...], ...]) -> None:
    seen = bytearray(n)
    stack = [0]
    seen[0] = 1
    count = 1
    while stack:
        u = stack.pop()
        for v in adjacency[u]:
            if not seen[v]:
                seen[v] = 1
                count += 1
                stack.append(v)
    if count != n:
        missing = next(i for i in range(n) if not seen[i])
        raise DisconnectedError(
            f"graph is disconnected: vertex {missing} unreachable from 0"
        )


@dataclass(frozen=True)
class DegreeProfile:
    """Degree certificate of a graph.

    ``alpha`` is the exact rational ``d_max / d_min``; a graph is
    alpha-almost-regular for any bound ``>= alpha``.  Bidegreed means at most
    two distinct degree values (regular graphs count as the degenerate case
    ``d1 == d2``).
    """

    d_min: int
    d_max: int
    alpha: Fraction
    distinct_degrees: tuple[int, ...]

    @property
    def is_regular(self) -> bool:
        return self.d_min == self.d_max

    @property
    def is_bidegreed(self) -> bool:
        return len(self.distinct_degrees) <= 2

    @property
    def bidegree(self) -> tuple[int, int]:
        """The pair ``(d1, d2)`` with ``d1 <= d2``; requires bidegreed."""
        if not self.is_bidegreed:
            raise InvalidParamError(
                f"graph has {len(self.distinct_degrees)} distinct degrees, not <= 2"
            )
        return (self.d_min, self.d_max)

    def is_almost_regular(self, alpha: Fraction | int | float) -> bool:
        return self.alpha <= alpha


def degree_profile(g: Graph) -> DegreeProfile:
    distinct = tuple(sorted(set(g.degrees)))
    d_min, d_max = distinct[0], distinct[-1]
    return DegreeProfile(d_min, d_max, Fraction(d_max, d_min), distinct)


# ----------------------------------------------------------------------------
# Edge-list text format
# ----------------------------------------------------------------------------
#
#   # comment lines and blank lines are ignored
#   n 5          <- optional header fixing the vertex count
#   0 1          <- one edge per line, 0-based integer ids
#
# Without a header the vertex count is 1 + max id when ids are dense; sparse
# id sets are remapped to 0..k-1 (in sorted order) and the mapping recorded on
# the returned graph.


def parse_edge_list(text: str | bytes) -> Graph:
    """Parse the edge-list text format into a validated :class:`Graph`.

    Raises :class:`MalformedLineError`, :class:`SelfLoopError`,
    :class:`DuplicateEdgeError`, or :class:`DisconnectedError`; each message
    names the offending line where applicable.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    header_n: int | None = None
    raw_edges: list[tuple[int, int, int]] = []  # (u, v, line_no)
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        parts = stripped.split()
        if parts[0] == "n":
            if header_n is not None or len(parts) != 2 or raw_edges:
                raise MalformedLineError(f"line {line_no}: bad header {line!r}")
            try:
                header_n = int(parts[1])
            except ValueError:
                raise MalformedLineError(f"line {line_no}: bad header {line!r}") from None
            continue
        if len(parts) != 2:
            raise MalformedLineError(f"line {line_no}: expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise MalformedLineError(
                f"line {line_no}: non-integer vertex id in {line!r}"
            ) from None
        if u < 0 or v < 0:
            raise MalformedLineError(f"line {line_no}: negative vertex id in {line!r}")
        raw_edges.append((u, v, line_no))
    if not raw_edges:
        raise MalformedLineError("no edges found")

    ids = sorted({w for u, v, _ in raw_edges for w in (u, v)})
    relabeling: dict[int, int] | None = None
    if header_n is not None:
        n = header_n
        for u, v, line_no in raw_edges:
            if u >= n or v >= n:
                raise MalformedLineError(
                    f"line {line_no}: vertex id exceeds declared n={n}"
                )
    elif ids[-1] + 1 == len(ids):
        n = len(ids)
    else:
        relabeling = {orig: dense for dense, orig in enumerate(ids)}
        n = len(ids)

    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for u, v, line_no in raw_edges:
        if relabeling is not None:
            u, v = relabeling[u], relabeling[v]
        if u == v:
            raise SelfLoopError(f"line {line_no}: self-loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdgeError(f"line {line_no}: duplicate edge {key}")
        seen.add(key)
        edges.append((u, v))
    return Graph(n, edges, relabeling=relabeling)


def serialize_edge_list(g: Graph) -> str:
    """Canonical text form: header plus edges sorted with ``u < v``."""
    lines = [f"n {g.n}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------------
# Generators
# ----------------------------------------------------------------------------


def gnp_edges(n: int, p: float, seed: int) -> list[tuple[int, int]]:
    """The raw edge sample behind :func:`generate_gnp` (no validation)."""
    if n < 2:
        raise InvalidParamError(f"need n >= 2, got {n}")
    if not (0.0 < p <= 1.0):
        raise InvalidParamError(f"need 0 < p <= 1, got {p}")
    rng = np.random.default_rng(seed)
    draws = rng.random(n * (n - 1) // 2) < p
    edges = []
    k = 0
    for u in range(n):
        for v in range(u + 1, n):
            if draws[k]:
                edges.append((u, v))
            k += 1
    return edges


def generate_gnp(n: int, p: float, seed: int) -> Graph | Disconnected:
    """Sample each unordered pair independently with probability ``p``.

    Deterministic in ``seed``.  Returns :data:`DISCONNECTED` (not an
    exception) when the sample is disconnected, so callers can resample.
    """
    edges = gnp_edges(n, p, seed)
    try:
        return Graph(n, edges)
    except DisconnectedError:
        return DISCONNECTED


def generate_connected_gnp(n: int, p: float, seed: int, max_retries: int = 100) -> Graph:
    """Resample :func:`generate_gnp` with derived seeds until connected."""
    for attempt in range(max_retries):
        g = generate_gnp(n, p, mix64(seed, attempt) if attempt else seed)
        if isinstance(g, Graph):
            return g
    raise DisconnectedError(
        f"no connected G({n}, {p}) sample within {max_retries} retries of seed {seed}"
    )


def complete_graph(n: int) -> Graph:
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise InvalidParamError(f"cycle needs n >= 3, got {n}")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(leaves: int) -> Graph:
    """Star with center 0 and ``leaves`` leaf vertices (n = leaves + 1)."""
    if leaves < 1:
        raise InvalidParamError(f"star needs >= 1 leaf, got {leaves}")
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def book_graph(pages: int) -> Graph:
    """Quadrilateral book: spine edge (0, 1) plus ``pages`` four-cycles.

    Page ``i`` adds the path 0 - (2+2i) - (3+2i) - 1, so all page vertices
    have degree 2 and the spine vertices degree ``pages + 1``.
    """
    if pages < 1:
        raise InvalidParamError(f"book needs >= 1 page, got {pages}")
    edges = [(0, 1)]
    for i in range(pages):
        a, b = 2 + 2 * i, 3 + 2 * i
        edges += [(0, a), (a, b), (b, 1)]
    return Graph(2 + 2 * pages, edges)


def random_regular_graph(n: int, d: int, seed: int, max_tries: int = 1000) -> Graph:
    """Sample a connected simple d-regular graph by pairing-model retries."""
    if d < 1 or d >= n or (n * d) % 2 != 0:
        raise InvalidParamError(f"no d-regular graph for n={n}, d={d}")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        stubs = np.repeat(np.arange(n), d)
        rng.shuffle(stubs)
        pairs = stubs.reshape(-1, 2)
        edges = set()
        ok = True
        for u, v in pairs:
            u, v = int(u), int(v)
            if u == v or (min(u, v), max(u, v)) in edges:
                ok = False
                break
            edges.add((min(u, v), max(u, v)))
        if not ok:
            continue
        try:
            return Graph(n, sorted(edges))
        except DisconnectedError:
            continue
    raise InvalidParamError(
        f"failed to sample a connected {d}-regular graph on {n} vertices "
        f"within {max_tries} tries"
    )
