"""
Network - Undirected simple graphs for interdependent security games.

Nodes are numbered 1..n. A Graph is immutable; the networkx view behind it is
built once and used for generators, connectivity and enumeration.
"""

import itertools
import logging
from enum import Enum

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr

from src.services.errors import (
    DuplicateEdgeError,
    GraphError,
    GraphParameterError,
    GraphParseError,
    SelfLoopError,
    SizeError,
)

logger = logging.getLogger(__name__)

MIS_EXACT_LIMIT = 30
TREE_LIMIT = 8


# =============================================================================
# Models
# =============================================================================

class GraphKind(str, Enum):
    CYCLE = "cycle"
    COMPLETE = "complete"
    STAR = "star"
    K_REGULAR = "k_regular"
    PATH = "path"
    EMPTY = "empty"


class Graph(BaseModel):
    """Undirected simple graph on nodes 1..n with normalized (u < v) edges."""
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1, description="Number of nodes")
    edges: tuple[tuple[int, int], ...] = Field((), description="Sorted unordered pairs (u, v), u < v")

    _nx: nx.Graph = PrivateAttr()

    def model_post_init(self, __context) -> None:
        g = nx.Graph()
        g.add_nodes_from(range(1, self.n + 1))
        g.add_edges_from(self.edges)
        self._nx = g

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        """Validate and normalize an edge collection."""
        if n < 1:
            raise GraphParameterError(f"graph needs at least one node, got n={n}")
        seen: set[tuple[int, int]] = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise SelfLoopError(f"self-loop at node {u}")
            if not (1 <= u <= n and 1 <= v <= n):
                raise GraphError(f"edge ({u}, {v}) outside node range 1..{n}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise DuplicateEdgeError(f"duplicate edge {key[0]}-{key[1]}")
            seen.add(key)
        return cls(n=n, edges=tuple(sorted(seen)))

    @classmethod
    def from_networkx(cls, g: nx.Graph) -> "Graph":
        relabeled = nx.convert_node_labels_to_integers(g, first_label=1)
        return cls.from_edges(relabeled.number_of_nodes(), relabeled.edges())

    @property
    def nx(self) -> nx.Graph:
        return self._nx

    @property
    def nodes(self) -> range:
        return range(1, self.n + 1)

    def neighbors(self, i: int) -> list[int]:
        return sorted(self._nx.neighbors(i))

    def closed_neighborhood(self, i: int) -> list[int]:
        """N-bar(i): node i together with its neighbors."""
        return sorted([i, *self._nx.neighbors(i)])

    def degree(self, i: int) -> int:
        return self._nx.degree(i)

    def extended_size(self, i: int) -> int:
        """d_i = 1 + |N(i)|."""
        return 1 + self._nx.degree(i)

    def extended_sizes(self) -> np.ndarray:
        return np.array([self.extended_size(i) for i in self.nodes], dtype=int)

    def adjacency_matrix(self) -> np.ndarray:
        return nx.to_numpy_array(self._nx, nodelist=list(self.nodes), dtype=float)

    def is_connected(self) -> bool:
        return nx.is_connected(self._nx)

    def to_edge_list_text(self) -> str:
        lines = [f"n {self.n}"] + [f"{u} {v}" for u, v in self.edges]
        return "\n".join(lines) + "\n"


# =============================================================================
# Parsing
# =============================================================================

def parse_edge_list(text: str | bytes) -> Graph:
    """
    Parse "u v" lines with 1-based ids.

    '#' starts a comment; an optional "n <count>" line declares the node count
    so isolated nodes can be represented. Without it, n is the largest id seen.

    Raises:
        GraphParseError: malformed line (carries the 1-based line number).
        SelfLoopError, DuplicateEdgeError: invalid edges.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")

    declared_n: int | None = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    max_id = 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "n":
            if len(parts) != 2 or not parts[1].isdigit() or int(parts[1]) < 1:
                raise GraphParseError(f"bad node-count header {raw!r}", line=lineno)
            declared_n = int(parts[1])
            continue
        if len(parts) != 2:
            raise GraphParseError(f"expected 'u v', got {raw!r}", line=lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(f"node ids must be integers, got {raw!r}", line=lineno) from None
        if u < 1 or v < 1:
            raise GraphParseError(f"node ids are 1-based, got {raw!r}", line=lineno)
        if u == v:
            raise SelfLoopError(f"self-loop at node {u}", line=lineno)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdgeError(f"duplicate edge {key[0]}-{key[1]}", line=lineno)
        seen.add(key)
        edges.append(key)
        max_id = max(max_id, u, v)

    n = declared_n if declared_n is not None else max_id
    if n < 1:
        raise GraphParseError("edge list declares no nodes")
    if max_id > n:
        raise GraphParseError(f"node id {max_id} exceeds declared n={n}")
    return Graph.from_edges(n, edges)


# =============================================================================
# Generators
# =============================================================================

def _circulant_offsets(n: int, k: int) -> list[int]:
    if k < 0 or k >= n:
        raise GraphParameterError(f"k_regular needs 0 <= k < n, got n={n}, k={k}")
    if (n * k) % 2:
        raise GraphParameterError(f"no {k}-regular graph on {n} nodes (n*k must be even)")
    offsets = list(range(1, k // 2 + 1))
    if k % 2:
        offsets.append(n // 2)
    return offsets


def generate(kind: GraphKind | str, n: int, k: int | None = None) -> Graph:
    """
    Build a named topology on nodes 1..n.

    Args:
        kind: cycle, complete, star (center is node 1), k_regular (circulant),
            path or empty.
        n: Number of nodes.
        k: Degree, for k_regular only.
    """
    kind = GraphKind(kind)
    if n < 1:
        raise GraphParameterError(f"{kind.value} needs n >= 1, got {n}")

    if kind == GraphKind.CYCLE:
        if n < 3:
            raise GraphParameterError(f"cycle needs n >= 3, got {n}")
        g = nx.cycle_graph(n)
    elif kind == GraphKind.COMPLETE:
        g = nx.complete_graph(n)
    elif kind == GraphKind.STAR:
        g = nx.star_graph(n - 1)
    elif kind == GraphKind.PATH:
        g = nx.path_graph(n)
    elif kind == GraphKind.EMPTY:
        g = nx.empty_graph(n)
    else:
        if k is None:
            raise GraphParameterError("k_regular requires k")
        g = nx.circulant_graph(n, _circulant_offsets(n, k))

    return Graph.from_networkx(g)


# =============================================================================
# Enumeration
# =============================================================================

def is_independent(g: Graph, nodes) -> bool:
    members = set(nodes)
    return not any(u in members and v in members for u, v in g.edges)


def is_maximal_independent(g: Graph, nodes) -> bool:
    members = set(nodes)
    if not is_independent(g, members):
        return False
    return all(any(j in members for j in g.neighbors(i)) for i in g.nodes if i not in members)


def maximal_independent_sets(
    g: Graph,
    limit: int | None = None,
    exhaustive: bool | None = None,
    seed: int = 0,
) -> list[frozenset[int]]:
    """
    Maximal independent sets of g.

    Exact enumeration (maximal cliques of the complement, Bron-Kerbosch with
    pivoting) up to 30 nodes; beyond that, distinct sets are sampled with a
    seeded randomized greedy construction.

    Args:
        g: Graph.
        limit: Maximum number of sets to return (None = all for exact mode,
            100 for sampling).
        exhaustive: Force exact enumeration (True) or sampling (False);
            None picks by size.
        seed: Sampling seed.

    Returns:
        Sets ordered by their sorted member tuples.
    """
    if exhaustive is None:
        exhaustive = g.n <= MIS_EXACT_LIMIT
    if exhaustive and g.n > MIS_EXACT_LIMIT:
        raise SizeError(f"exact enumeration is capped at {MIS_EXACT_LIMIT} nodes, graph has {g.n}")

    if exhaustive:
        found = {frozenset(c) for c in nx.find_cliques(nx.complement(g.nx))}
    else:
        budget = limit if limit is not None else 100
        rng = np.random.default_rng(seed)
        found = set()
        for _ in range(10 * budget):
            found.add(frozenset(nx.maximal_independent_set(g.nx, seed=int(rng.integers(2**31)))))
            if len(found) >= budget:
                break
        logger.debug("sampled %d maximal independent sets on %d nodes", len(found), g.n)

    ordered = sorted(found, key=lambda s: tuple(sorted(s)))
    return ordered if limit is None else ordered[:limit]


def enumerate_trees(n: int) -> list[Graph]:
    """All n^(n-2) labeled trees on nodes 1..n via Pruefer sequences (n <= 8)."""
    if n < 1:
        raise GraphParameterError(f"trees need n >= 1, got {n}")
    if n > TREE_LIMIT:
        raise SizeError(f"tree enumeration is capped at n={TREE_LIMIT}, got {n}")
    if n == 1:
        return [Graph(n=1)]
    if n == 2:
        return [Graph.from_edges(2, [(1, 2)])]
    return [
        Graph.from_edges(n, [(u + 1, v + 1) for u, v in nx.from_prufer_sequence(list(seq)).edges()])
        for seq in itertools.product(range(n), repeat=n - 2)
    ]
