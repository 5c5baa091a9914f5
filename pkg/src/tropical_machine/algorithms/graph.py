"""Weighted directed graphs and the edge-list file format."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .. import core
from ..core import INF, TropicalMatrix
from ..errors import GraphParseError, NegativeWeight, NodeNotFound


@dataclass
class Graph:
    """Nodes in insertion order and edges keyed by ``(src, dst)``.

    Self-loops are dropped on insertion; weights must be nonnegative ints.
    """
    nodes: list[str] = field(default_factory=list)
    edges: dict[tuple[str, str], int] = field(default_factory=dict)

    @classmethod
    def from_edges(cls, edges, nodes=()) -> "Graph":
        g = cls()
        for name in nodes:
            g.add_node(name)
        for src, dst, w in edges:
            g.add_edge(src, dst, w)
        return g

    def add_node(self, name: str) -> None:
        if name not in self._index:
            self._index[name] = len(self.nodes)
            self.nodes.append(name)

    def add_edge(self, src: str, dst: str, weight: int) -> None:
        if isinstance(weight, bool) or int(weight) != weight:
            raise ValueError(f"edge weight must be an integer, got {weight!r}")
        if weight < 0:
            raise ValueError(f"negative edge weight {weight} on {src}->{dst}")
        self.add_node(src)
        self.add_node(dst)
        if src == dst:
            return
        if (src, dst) in self.edges:
            raise ValueError(f"duplicate edge {src}->{dst}")
        self.edges[(src, dst)] = int(weight)

    def __post_init__(self):
        self._index = {}
        nodes, self.nodes = list(self.nodes), []
        edges, self.edges = dict(self.edges), {}
        for name in nodes:
            self.add_node(name)
        for (src, dst), w in edges.items():
            self.add_edge(src, dst, w)

    def __len__(self) -> int:
        return len(self.nodes)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise NodeNotFound(f"node '{name}' is not in the graph") from None

    def adjacency_matrix(self) -> TropicalMatrix:
        """``A[j][i]`` is the weight of ``i -> j``; missing edges are INF."""
        n = len(self.nodes)
        rows = [[INF] * n for _ in range(n)]
        for (src, dst), w in self.edges.items():
            rows[self._index[dst]][self._index[src]] = w
        return core.matrix(rows)

    def neighbors(self):
        """Adjacency lists by node index: ``out[i] = [(j, w), ...]``."""
        out = [[] for _ in self.nodes]
        for (src, dst), w in self.edges.items():
            out[self._index[src]].append((self._index[dst], w))
        return out


def parse_graph_text(text: str) -> Graph:
    """One ``src dst weight`` edge per line; ``#`` starts a comment."""
    g = Graph()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GraphParseError(f"expected 'src dst weight', got {line!r}", lineno)
        src, dst, wtext = parts
        try:
            w = int(wtext)
        except ValueError:
            raise GraphParseError(f"weight {wtext!r} is not an integer", lineno) from None
        if w < 0:
            raise NegativeWeight(f"negative weight {w} on {src}->{dst}", lineno)
        if (src, dst) in g.edges:
            raise GraphParseError(f"duplicate edge {src}->{dst}", lineno)
        g.add_edge(src, dst, w)
    return g


def parse_graph_file(path) -> Graph:
    return parse_graph_text(Path(path).read_text())


def four_node_graph() -> Graph:
    """The four-node example graph used throughout the docs and tests."""
    return Graph.from_edges([("a", "b", 2), ("b", "d", 4), ("b", "c", 2), ("c", "a", 1), ("c", "d", 1)],
                            nodes=("a", "b", "c", "d"))
