"""Acceptance suite: one marked test per criterion, summarized at the end of the run."""
import itertools
import random
import time

import pytest

from tropical_machine import core
from tropical_machine.algorithms import (AlignmentProblem, Graph, classical_dijkstra, classical_nw,
                                         closure, minplus_bellman_ford, temporal_dijkstra,
                                         temporal_nw, validate_tree)
from tropical_machine.core import INF
from tropical_machine.errors import RangeViolation
from tropical_machine.lang import BinOp, Const, Var, direct_eval, evaluate, to_source
from tropical_machine.machine import CostTable, Instruction, Machine, MachineConfig, Opcode, cost_report
from tropical_machine.memory import OverflowPolicy, RangeConfig, VectorRegister

FOUR_NODE = ((INF, INF, 1, INF), (2, INF, INF, INF), (INF, 2, INF, INF), (INF, 4, 1, INF))


def random_graph(rng, n, p=0.3, wmax=7):
    g = Graph.from_edges([], nodes=[f"n{i}" for i in range(n)])
    for i, j in itertools.product(range(n), repeat=2):
        if i != j and rng.random() < p:
            g.add_edge(f"n{i}", f"n{j}", rng.randint(1, wmax))
    return g


@pytest.mark.criterion("1")
def test_four_node_vmm(detail):
    one = core.vmm(FOUR_NODE, (INF, 0, INF, INF))
    two = core.vmm(FOUR_NODE, (INF, 0, 0, INF))
    detail(f"one-hot b -> {list(map(core.format_time, one))}, two-hot b,c -> {list(map(core.format_time, two))}")
    assert one == (INF, INF, 2, 4)
    assert two == (1, INF, 2, 1)


@pytest.mark.criterion("2")
def test_dijkstra_oracle_equivalence(detail):
    rng = random.Random(2024)
    mismatches = widened = 0
    start = time.perf_counter()
    for _ in range(200):
        g = random_graph(rng, rng.randint(2, 32))
        src = g.nodes[rng.randrange(len(g))]
        try:
            res = temporal_dijkstra(g, src, bits=5)
        except RangeViolation:
            widened += 1
            res = temporal_dijkstra(g, src, bits=8)
        ref, _ = classical_dijkstra(g, src)
        if res.distances != ref or validate_tree(g, src, res.parent_matrix, ref):
            mismatches += 1
    elapsed = time.perf_counter() - start
    detail(f"200 graphs, {mismatches} mismatches, {widened} widened to 8 bits, {elapsed:.2f} s")
    assert mismatches == 0
    assert elapsed < 10


@pytest.mark.criterion("3")
def test_parent_corruption_regression(detail):
    g = Graph.from_edges([("a", "b", 1), ("a", "c", 10), ("c", "b", 1)])
    amended = temporal_dijkstra(g, "a")
    literal = temporal_dijkstra(g, "a", literal_f=True)
    ref, _ = classical_dijkstra(g, "a")
    problems = validate_tree(g, "a", literal.parent_matrix, ref)
    b = g.index("b")
    detail(f"amended parent(b)={g.nodes[amended.parents()[b]]}, "
           f"literal parent(b)={g.nodes[literal.parents()[b]]}, literal problems={problems}")
    assert amended.parents()[b] == g.index("a")
    assert validate_tree(g, "a", amended.parent_matrix, ref) == []
    assert literal.parents()[b] == g.index("c")
    assert "b: tree path sum 11 != distance 1" in problems


@pytest.mark.criterion("4")
def test_needleman_wunsch_equivalence(detail):
    rng = random.Random(7)
    mismatches = 0
    start = time.perf_counter()
    for _ in range(200):
        n = rng.randint(1, 12)
        p = AlignmentProblem("".join(rng.choice("GATC") for _ in range(n)),
                             "".join(rng.choice("GATC") for _ in range(n)),
                             sigma=rng.choice([1, 2, 3]), m=rng.choice([1, 2, 3]))
        mismatches += temporal_nw(p) != classical_nw(p)
    elapsed = time.perf_counter() - start
    detail(f"200 pairs, {mismatches} mismatches, {elapsed:.2f} s")
    assert mismatches == 0
    assert elapsed < 10


@pytest.mark.criterion("5")
def test_closure_fixpoint(detail):
    rng = random.Random(11)
    mismatches = 0
    start = time.perf_counter()
    for _ in range(100):
        n = rng.randint(1, 16)
        g = random_graph(rng, n)
        A = g.adjacency_matrix()
        x = core.onehot(n, rng.randrange(n))
        mismatches += closure(A, x, n - 1) != minplus_bellman_ford(A, x)
    elapsed = time.perf_counter() - start
    detail(f"100 graphs, {mismatches} mismatches, {elapsed:.2f} s")
    assert mismatches == 0
    assert elapsed < 5


@pytest.mark.criterion("6")
def test_property_suites(detail):
    add, mul = core.t_add, core.t_mul
    ticks = list(range(8)) + [INF]
    failures = 0
    for a, b, c in itertools.product(ticks, repeat=3):
        failures += not (
            add(a, b) == add(b, a) and mul(a, b) == mul(b, a)
            and add(add(a, b), c) == add(a, add(b, c))
            and mul(mul(a, b), c) == mul(a, mul(b, c))
            and mul(a, add(b, c)) == add(mul(a, b), mul(a, c))
            and add(a, INF) == a and mul(a, 0) == a and mul(a, INF) == INF)

    rng = random.Random(6)
    pool = list(range(16)) + [INF, INF]

    def vec(n):
        return tuple(rng.choice(pool) for _ in range(n))

    for _ in range(1000):
        n = rng.randint(1, 12)
        u, v, w = vec(n), vec(n), vec(n)
        A = tuple(vec(n) for _ in range(n))
        s = rng.randint(0, 20)

        def sh(x):
            return core.scale(s, x)

        ok = (
            core.ew_min(core.ew_min(u, v), w) == core.ew_min(u, core.ew_min(v, w))
            and core.ew_mul(u, core.ew_min(v, w)) == core.ew_min(core.ew_mul(u, v), core.ew_mul(u, w))
            and core.vmm(A, core.ew_min(u, v)) == core.ew_min(core.vmm(A, u), core.vmm(A, v))
            # shift equivariance
            and core.ew_min(sh(u), sh(v)) == sh(core.ew_min(u, v))
            and core.ew_max(sh(u), sh(v)) == sh(core.ew_max(u, v))
            and core.ew_inhibit(sh(u), sh(v)) == sh(core.ew_inhibit(u, v))
            and core.ew_coincidence(sh(u), sh(v), 2) == sh(core.ew_coincidence(u, v, 2))
            and core.vmm(A, sh(u)) == sh(core.vmm(A, u))
            and core.argmin_onehot(sh(u)) == sh(core.argmin_onehot(u))
            # causality: nothing leaves before the earliest input
            and all(y >= min(u) for y in core.vmm(A, u))
            and all(y >= min(u + v) for y in core.ew_inhibit(u, v))
            # normalize round-trip
            and core.scale(core.normalize(u).constant, core.normalize(u).shape) == u
        )
        hot = [i for i, x in enumerate(core.argmin_onehot(u)) if x != INF]
        ok = ok and (hot == [] if min(u) == INF else hot == [u.index(min(u))])
        failures += not ok
    detail(f"{len(ticks) ** 3} scalar triples + 1000 vector cases, {failures} counterexamples")
    assert failures == 0


@pytest.mark.criterion("7")
def test_cost_vmm_energy(detail):
    m = Machine(MachineConfig(width=32))
    m.program_matrix("A", core.inf_matrix(32))
    m.load("x", core.onehot(32, 0))
    e = m.execute(Instruction(Opcode.VMM, "y", ("A", "x")))
    vmm_pJ = e.vmm_cells * m.config.costs.vmm_fJ_per_cell / 1000
    detail(f"32x32 VMM cell energy {vmm_pJ:.1f} pJ")
    assert vmm_pJ == pytest.approx(1024 * 0.7)


@pytest.mark.criterion("7")
def test_cost_write_read_ratio(detail):
    c = CostTable()
    detail(f"write/read = {c.write_pJ_per_line / c.read_pJ_per_line:g}")
    assert c.write_pJ_per_line / c.read_pJ_per_line == 5


@pytest.mark.criterion("7")
def test_cost_vmm_gets(detail):
    m = Machine(MachineConfig(width=32))
    m.program_matrix("A", core.inf_matrix(32))
    m.load("x", core.onehot(32, 0))
    m.trace.clear()
    m.execute(Instruction(Opcode.VMM, "y", ("A", "x")))
    gets = cost_report(m.trace, 1024).gets
    detail(f"single 32x32 VMM: {gets:.3f} GETS")
    assert gets == pytest.approx(10.0)


@pytest.mark.criterion("7")
def test_cost_dense_dijkstra_getj(detail):
    rng = random.Random(32)
    g = Graph.from_edges([(f"n{i}", f"n{j}", rng.randint(1, 7))
                          for i in range(32) for j in range(32) if i != j])
    start = time.perf_counter()
    res = temporal_dijkstra(g, "n0")
    elapsed = time.perf_counter() - start
    rep = cost_report(res.trace)
    detail(f"dense 32-node run: {rep.getj:.2f} GETJ ({rep.edges_traversed} edges, "
           f"{rep.energy_pJ / 1000:.1f} nJ), target window [0.333, 3], {elapsed:.2f} s")
    assert 1 / 3 <= rep.getj <= 3


def random_expr(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.7:
            return Var(rng.choice("abcdef"))
        return Const(INF) if r < 0.75 else Const(rng.randint(0, 5))
    return BinOp(rng.choice(["+", "^", "*", "-|"]), random_expr(rng, depth - 1), random_expr(rng, depth - 1))


@pytest.mark.criterion("8")
def test_compiler_equivalence(detail):
    rng = random.Random(8)
    mismatches = 0
    start = time.perf_counter()
    for _ in range(100):
        e = random_expr(rng, rng.randint(1, 6))
        width = rng.randint(1, 16)
        binds = {name: tuple(rng.choice(list(range(8)) + [INF]) for _ in range(width)) for name in "abcdef"}
        machine = Machine(MachineConfig(width=width, registers=96, range=RangeConfig(16)))
        got = evaluate(to_source(e), binds, machine)
        mismatches += got != direct_eval(e, binds)
    elapsed = time.perf_counter() - start
    detail(f"100 expressions, {mismatches} mismatches, {elapsed:.2f} s")
    assert mismatches == 0
    assert elapsed < 5


@pytest.mark.criterion("9")
def test_range_policy(detail):
    strict = VectorRegister("r", 1, RangeConfig(5, OverflowPolicy.STRICT))
    with pytest.raises(RangeViolation):
        strict.write_direct((40,))
    m = Machine(MachineConfig(width=2, range=RangeConfig(5, OverflowPolicy.SATURATE_TO_INFINITY)))
    m.load("a", [30, 1])
    entry = m.execute(Instruction(Opcode.SCALE, "b", ("a",), imm=10))
    detail(f"STRICT raises; SATURATE stored {list(map(core.format_time, m.read('b')))}, "
           f"overflow_events={entry.overflow_events}")
    assert m.read("b") == (INF, 11)
    assert entry.overflow_events == 1
    assert cost_report(m.trace).overflow_events == 1
