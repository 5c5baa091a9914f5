"""Single-source shortest paths on the temporal state machine.

Each loop iteration is a fixed sequence of machine transitions:

    n  := argmin(d)              choose the next node (d[n] is 0 by construction)
    e  := A (x) n                VMM: edge lengths out of n
    e' := v -| e                 drop edges into visited nodes (see below)
    f  := d -| e'                keep strictly shorter paths only
    v  := v (+) n                mark n visited
    d' := d (+) f
    d  :~ v -| d'                projective store; emits the step to the next node
    f* :~ binarize(f)            0 where a parent changed
    P  := f* -| P                erase stale parent rows (N transitions)
    P[:, n] := f                 record n as parent of the improved nodes

``d`` is always relative to the node being visited, so only edge-sized
values are ever stored. Absolute distances come back from the sequence of
emitted norm constants.

Without the ``v -| e`` mask (``literal_f=True``) an edge from the current node
back into an already-visited node passes the ``d -| e`` test, because visited
entries of ``d`` are INF, and overwrites that node's finished parent.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .. import core
from ..core import INF, TimeValue, TropicalMatrix
from ..errors import RangeViolation
from ..machine import (CostTable, Instruction, Machine, MachineConfig, Opcode,
                       TraceEntry, WriteMode)
from ..memory import OverflowPolicy, RangeConfig
from .graph import Graph


@dataclass
class DijkstraResult:
    parent_matrix: TropicalMatrix
    visit_order: list[int]
    norm_constants: list[TimeValue]
    distances: list[TimeValue]
    frontier_minima: list[TimeValue] = field(default_factory=list)
    trace: list[TraceEntry] = field(default_factory=list, repr=False)
    config: MachineConfig | None = None
    literal_f: bool = False

    def parents(self) -> list[int | None]:
        """Parent index per node (None for the source and unreached nodes)."""
        out = []
        for row in self.parent_matrix:
            hot = [i for i, w in enumerate(row) if w != INF]
            out.append(hot[0] if len(hot) == 1 else None)
        return out

    def tree_edges(self) -> list[tuple[int, int, int]]:
        """``(parent, child, weight)`` for every recorded tree edge."""
        return [(i, j, w) for j, row in enumerate(self.parent_matrix)
                for i, w in enumerate(row) if w != INF]


class _Registers:
    """Round-robin allocator over the machine's physical register names."""

    def __init__(self, count: int):
        self.free = [f"r{i}" for i in reversed(range(count))]

    def take(self) -> str:
        return self.free.pop()

    def give(self, *names: str) -> None:
        self.free.extend(names)


def recover_distances(visit_order, norm_constants, n_nodes: int | None = None):
    """Absolute distances from the per-iteration norm constants.

    The node visited at iteration ``k`` sits at the sum of the constants
    emitted by iterations ``1..k-1``. Returns distances in visit order, or
    per node (INF for unvisited nodes) when ``n_nodes`` is given.
    """
    dists = []
    total = 0
    for k, _ in enumerate(visit_order):
        dists.append(total)
        if k < len(norm_constants):
            total = core.t_mul(total, norm_constants[k])
    if n_nodes is None:
        return dists
    out = [INF] * n_nodes
    for node, dist in zip(visit_order, dists):
        out[node] = dist
    return out


def temporal_dijkstra(g: Graph, source: str, *, bits: int = 5,
                      overflow_policy: OverflowPolicy = OverflowPolicy.STRICT,
                      costs: CostTable | None = None, registers: int = 8,
                      literal_f: bool = False) -> DijkstraResult:
    s = g.index(source)
    n = len(g)
    config = MachineConfig(width=n, registers=registers, matrix_banks=2,
                           range=RangeConfig(bits, overflow_policy),
                           costs=costs or CostTable())
    m = Machine(config)
    regs = _Registers(registers)
    try:
        m.program_matrix("A", g.adjacency_matrix())
    except RangeViolation as exc:
        exc.iteration = 0
        raise
    m.bank("P", create=True)

    d, v = regs.take(), regs.take()
    m.load(d, core.onehot(n, s))
    m.load(v, core.infs(n))

    visit_order, norm_constants, minima = [], [], []
    k = 0
    try:
        while m.halt_test(d):
            k += 1
            if k > n:
                raise RuntimeError("visited more nodes than the graph has")
            cur = regs.take()
            m.execute(Instruction(Opcode.ARGMIN, cur, (d,)))
            e = regs.take()
            m.execute(Instruction(Opcode.VMM, e, ("A", cur)))
            if not literal_f:
                masked = regs.take()
                m.execute(Instruction(Opcode.EW_INHIBIT, masked, (v, e)))
                regs.give(e)
                e = masked
            f = regs.take()
            m.execute(Instruction(Opcode.EW_INHIBIT, f, (d, e)))
            regs.give(e)

            v_next = regs.take()
            m.execute(Instruction(Opcode.EW_MIN, v_next, (v, cur)))
            regs.give(v)
            v = v_next
            d_prime = regs.take()
            m.execute(Instruction(Opcode.EW_MIN, d_prime, (d, f)))
            regs.give(d)
            d = regs.take()
            entry = m.execute(Instruction(Opcode.EW_INHIBIT, d, (v, d_prime), WriteMode.PROJECTIVE))
            regs.give(d_prime)

            found = regs.take()
            m.execute(Instruction(Opcode.BINARIZE, found, (f,), WriteMode.PROJECTIVE))
            m.execute(Instruction(Opcode.INHIBIT_ROWS, "P", (found,)))
            m.execute(Instruction(Opcode.WRITE_COLUMN, "P", (cur, f)))

            visit_order.append(next(i for i, x in enumerate(m.read(cur)) if x != INF))
            norm_constants.append(entry.norm_constant_emitted)
            minima.append(core.min_reduce(m.read(d)))
            regs.give(found, cur, f)
    except RangeViolation as exc:
        exc.iteration = k
        raise

    return DijkstraResult(
        parent_matrix=m.bank("P").read(),
        visit_order=visit_order,
        norm_constants=norm_constants,
        distances=recover_distances(visit_order, norm_constants, n),
        frontier_minima=minima,
        trace=list(m.trace),
        config=config,
        literal_f=literal_f,
    )


def classical_dijkstra(g: Graph, source: str):
    """Binary-heap Dijkstra over plain integers: ``(distances, parents)``."""
    s = g.index(source)
    adj = g.neighbors()
    dist = [INF] * len(g)
    parent: list[int | None] = [None] * len(g)
    dist[s] = 0
    heap = [(0, s)]
    done = [False] * len(g)
    while heap:
        du, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for w, cost in adj[u]:
            if du + cost < dist[w]:
                dist[w] = du + cost
                parent[w] = u
                heapq.heappush(heap, (dist[w], w))
    return dist, parent


def validate_tree(g: Graph, source: str, parent_matrix: TropicalMatrix, distances) -> list[str]:
    """Check a parent matrix encodes a shortest-path tree for ``distances``.

    Returns a list of human-readable problems; empty means valid.
    """
    s = g.index(source)
    problems = []
    parent = {}
    for j, row in enumerate(parent_matrix):
        hot = [(i, w) for i, w in enumerate(row) if w != INF]
        name = g.nodes[j]
        if j == s or distances[j] == INF:
            if hot:
                problems.append(f"{name}: expected no parent, found {len(hot)}")
            continue
        if len(hot) != 1:
            problems.append(f"{name}: expected exactly one parent, found {len(hot)}")
            continue
        i, w = hot[0]
        if g.edges.get((g.nodes[i], name)) != w:
            problems.append(f"{name}: parent entry {g.nodes[i]}->{name}={w} is not an edge of the graph")
            continue
        parent[j] = (i, w)
    for j in parent:
        total, node, seen = 0, j, set()
        while node != s:
            if node in seen or node not in parent:
                problems.append(f"{g.nodes[j]}: parent chain does not reach the source")
                break
            seen.add(node)
            i, w = parent[node]
            total += w
            node = i
        else:
            if total != distances[j]:
                problems.append(f"{g.nodes[j]}: tree path sum {total} != distance {distances[j]}")
    return problems
