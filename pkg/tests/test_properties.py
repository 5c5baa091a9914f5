"""Algebraic and invariance properties checked with hypothesis."""
import random

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from strategies import exprs, matrix_and_vector, same_width, small_times, times, wavefronts
from tropical_machine import core
from tropical_machine.algorithms import (AlignmentProblem, Graph, classical_dijkstra, classical_nw,
                                         closure, minplus_bellman_ford, temporal_dijkstra,
                                         temporal_nw)
from tropical_machine.core import INF, TieMode
from tropical_machine.lang import compile_expr, direct_eval, parse, run_compiled, to_source
from tropical_machine.machine import Instruction, Machine, MachineConfig, Opcode
from tropical_machine.memory import MatrixBank, RangeConfig, VectorRegister


# -- semiring ---------------------------------------------------------------------------

@given(times, times, times)
def test_semiring_axioms(a, b, c):
    add, mul = core.t_add, core.t_mul
    assert add(a, b) == add(b, a)
    assert add(add(a, b), c) == add(a, add(b, c))
    assert mul(mul(a, b), c) == mul(a, mul(b, c))
    assert mul(a, add(b, c)) == add(mul(a, b), mul(a, c))
    assert add(a, INF) == a and mul(a, 0) == a and mul(a, INF) == INF
    assert add(a, a) == a


@given(matrix_and_vector(), st.data())
def test_vmm_matches_brute_force(Ax, data):
    A, x = Ax
    want = tuple(min((core.t_mul(A[j][i], x[i]) for i in range(len(x))), default=INF)
                 for j in range(len(A)))
    assert core.vmm(A, x) == want
    y = data.draw(wavefronts(len(x), small_times))
    assert core.vmm(A, core.ew_min(x, y)) == core.ew_min(core.vmm(A, x), core.vmm(A, y))


# -- invariance and causality --------------------------------------------------------------

def shift(w, c):
    return core.scale(c, w)


@given(same_width(2), st.integers(0, 20), st.sampled_from(list(TieMode)))
def test_shift_equivariance(uv, c, mode):
    u, v = uv
    for f in (core.ew_min, core.ew_max, lambda p, q: core.ew_inhibit(p, q, mode),
              lambda p, q: core.ew_coincidence(p, q, 2)):
        assert f(shift(u, c), shift(v, c)) == shift(f(u, v), c)
    assert core.argmin_onehot(shift(u, c)) == shift(core.argmin_onehot(u), c)
    assert core.normalize(shift(u, c)).shape == core.normalize(u).shape


@given(matrix_and_vector(), st.integers(0, 20))
def test_vmm_shift_equivariance(Ax, c):
    A, x = Ax
    assert core.vmm(A, shift(x, c)) == shift(core.vmm(A, x), c)


@given(same_width(2), matrix_and_vector())
def test_causality(uv, Ax):
    u, v = uv
    earliest = min(u + v)
    for out in (core.ew_min(u, v), core.ew_max(u, v), core.ew_inhibit(u, v),
                core.ew_coincidence(u, v), core.argmin_onehot(u + v)):
        assert all(o >= earliest for o in out)
    A, x = Ax
    assert all(y >= min(x) for y in core.vmm(A, x))


@given(st.lists(times, min_size=1, max_size=10).map(tuple))
def test_normalize_round_trip(x):
    nw = core.normalize(x)
    finite = [v for v in nw.shape if v != INF]
    if finite:
        assert min(finite) == 0
    assert core.scale(nw.constant, nw.shape) == x


@given(st.lists(times, min_size=1, max_size=10).map(tuple))
def test_argmin_single_finite_element(x):
    out = core.argmin_onehot(x)
    finite = [i for i, v in enumerate(out) if v != INF]
    if min(x) == INF:
        assert finite == []
    else:
        assert finite == [x.index(min(x))]
        assert out[finite[0]] == min(x)


# -- memory -------------------------------------------------------------------------------

@given(st.lists(times, min_size=1, max_size=8).map(tuple))
def test_projective_storage_invariants(w):
    r = VectorRegister("r", len(w), RangeConfig(8))
    assume(all(v == INF or v - min(w) <= 255 for v in w))
    c = r.write_projective(w)
    assert core.scale(c, r.read()) == w
    assert min(r.read()) in (0, INF)


@given(st.integers(1, 6), st.data())
def test_bank_rows_stay_one_hot_under_dijkstra_updates(n, data):
    b = MatrixBank("P", n, RangeConfig(5))
    for _ in range(4):
        k = data.draw(st.integers(0, n - 1))
        f = data.draw(wavefronts(n, small_times))
        mask = core.normalize(core.binarize(f, 31)).shape
        b.inhibit_rows(mask)
        b.write_column(core.onehot(n, k), f)
        for row in b.read():
            assert sum(v != INF for v in row) <= 1


# -- machine ---------------------------------------------------------------------------------

UNARY = [Opcode.ARGMIN, Opcode.BINARIZE, Opcode.MOVE]
BINARY = {Opcode.EW_MIN: core.ew_min, Opcode.EW_MAX: core.ew_max,
          Opcode.EW_INHIBIT: core.ew_inhibit, Opcode.TROPMUL: core.ew_mul,
          Opcode.COINCIDENCE: core.ew_coincidence}


@given(same_width(2, small_times), st.sampled_from(sorted(BINARY, key=lambda o: o.value)))
def test_machine_matches_core_binary(uv, op):
    u, v = uv
    m = Machine(MachineConfig(width=len(u)))
    m.load("u", u)
    m.load("v", v)
    m.execute(Instruction(op, "y", ("u", "v")))
    assert m.read("y") == BINARY[op](u, v)


@given(same_width(1, small_times), st.sampled_from(UNARY), st.integers(0, 5))
def test_machine_matches_core_unary(xs, op, c):
    (x,) = xs
    m = Machine(MachineConfig(width=len(x)))
    m.load("x", x)
    m.execute(Instruction(op, "y", ("x",)))
    want = {Opcode.ARGMIN: core.argmin_onehot(x), Opcode.BINARIZE: core.binarize(x, 31),
            Opcode.MOVE: x}[op]
    assert m.read("y") == want
    m.execute(Instruction(Opcode.SCALE, "z", ("x",), imm=c))
    assert m.read("z") == core.scale(c, x)


@given(matrix_and_vector())
def test_machine_vmm_matches_core(Ax):
    A, x = Ax
    m = Machine(MachineConfig(width=len(x)))
    m.program_matrix("A", A)
    m.load("x", x)
    e = m.execute(Instruction(Opcode.VMM, "y", ("A", "x")))
    assert m.read("y") == core.vmm(A, x)
    assert e.energy_pJ >= 0


@given(exprs(), same_width(4, small_times, max_width=6))
def test_determinism_and_energy_additivity(e, ws):
    binds = dict(zip("abcd", ws))
    compiled = compile_expr(e)
    runs = []
    for _ in range(2):
        m = Machine(MachineConfig(width=len(ws[0]), registers=64, range=RangeConfig(16)))
        result, _, trace = run_compiled(compiled, binds, m)
        runs.append((result, [(t.instruction, t.energy_pJ, t.latency_ns) for t in trace]))
        assert m.report().energy_pJ == sum(t.energy_pJ for t in trace)
        assert all(t.energy_pJ >= 0 for t in trace)
    assert runs[0] == runs[1]


# -- language -----------------------------------------------------------------------------------

@given(exprs())
def test_parse_print_round_trip(e):
    assert parse(to_source(e)) == e


@given(exprs(), same_width(4, small_times, max_width=6))
@settings(max_examples=200)
def test_compiler_equivalence(e, ws):
    binds = dict(zip("abcd", ws))
    m = Machine(MachineConfig(width=len(ws[0]), registers=64, range=RangeConfig(16)))
    result, _, _ = run_compiled(compile_expr(e), binds, m)
    assert result == direct_eval(e, binds)


def _count(e):
    if not hasattr(e, "op"):
        return 0, 0
    lv, lm = _count(e.left)
    rv, rm = _count(e.right)
    vec = lambda n: hasattr(n, "name") or hasattr(n, "op")  # noqa: E731
    both_vectors = e.op == "*" and vec(e.left) and vec(e.right)
    return lv + rv + 1, lm + rm + both_vectors


@given(exprs())
def test_transition_count(e):
    from tropical_machine.lang import _fold
    folded = _fold(e)
    ops, extra = _count(folded)
    assert compile_expr(e).transitions == ops + extra


# -- algorithms ------------------------------------------------------------------------------------

@st.composite
def graphs(draw, max_n=10):
    n = draw(st.integers(1, max_n))
    g = Graph.from_edges([], nodes=[f"v{i}" for i in range(n)])
    for i in range(n):
        for j in range(n):
            if i != j and draw(st.booleans()) and draw(st.booleans()):
                g.add_edge(f"v{i}", f"v{j}", draw(st.integers(0, 7)))
    return g


@given(graphs())
@settings(max_examples=60)
def test_dijkstra_invariants(g):
    res = temporal_dijkstra(g, "v0")
    ref, _ = classical_dijkstra(g, "v0")
    assert res.distances == ref
    assert set(res.frontier_minima) <= {0, INF}
    in_order = [res.distances[i] for i in res.visit_order]
    assert in_order == sorted(in_order)
    for row in res.parent_matrix:
        assert sum(v != INF for v in row) <= 1


@given(graphs(max_n=8), st.data())
@settings(max_examples=40)
def test_closure_monotone_and_converges(g, data):
    A = g.adjacency_matrix()
    n = len(g)
    x = core.onehot(n, data.draw(st.integers(0, n - 1)))
    prev = None
    for k in range(n):
        cur = closure(A, x, k)
        if prev is not None:
            assert all(c <= p for c, p in zip(cur, prev))
        prev = cur
    assert prev == minplus_bellman_ford(A, x)


@given(st.integers(1, 8), st.integers(1, 3), st.integers(1, 3), st.randoms(use_true_random=False))
@settings(max_examples=60)
def test_nw_matches_classical(n, sigma, m, rnd: random.Random):
    x = "".join(rnd.choice("GATC") for _ in range(n))
    y = "".join(rnd.choice("GATC") for _ in range(n))
    p = AlignmentProblem(x, y, sigma, m)
    assert temporal_nw(p) == classical_nw(p)
