"""Multi-hop reachability by repeated VMM with a running minimum."""
from __future__ import annotations

from dataclasses import dataclass, field

from .. import core
from ..core import INF, TropicalMatrix, Wavefront
from ..errors import DimensionMismatch
from ..machine import CostTable, Instruction, Machine, MachineConfig, Opcode, TraceEntry
from ..memory import RangeConfig


@dataclass
class ClosureResult:
    distances: Wavefront
    trace: list[TraceEntry] = field(default_factory=list, repr=False)
    config: MachineConfig | None = None


def closure_bits(A: TropicalMatrix, x: Wavefront, hops: int) -> int:
    """Bits needed so no partial path sum can leave the dynamic range."""
    w_max = max((w for row in A for w in row if w != INF), default=0)
    x_max = max((v for v in x if v != INF), default=0)
    return max(5, int(x_max + hops * w_max).bit_length())


def closure_run(A: TropicalMatrix, x: Wavefront, hops: int, *, bits: int | None = None,
                costs: CostTable | None = None) -> ClosureResult:
    """y = x (+) A x (+) A^2 x (+) ... (+) A^hops x on the machine."""
    if hops < 0:
        raise ValueError("hops must be >= 0")
    A = core.matrix(A)
    x = core.wavefront(x)
    if len(A) != len(x):
        raise DimensionMismatch(f"matrix dimension {len(A)} != vector length {len(x)}")
    if bits is None:
        bits = closure_bits(A, x, hops)
    config = MachineConfig(width=len(x), registers=8, matrix_banks=1,
                           range=RangeConfig(bits), costs=costs or CostTable())
    m = Machine(config)
    m.program_matrix("A", A)
    m.load("y0", x)
    m.load("h0", x)
    y, h = "y0", "h0"
    for _ in range(hops):
        h_next = "h1" if h == "h0" else "h0"
        y_next = "y1" if y == "y0" else "y0"
        m.execute(Instruction(Opcode.VMM, h_next, ("A", h)))
        m.execute(Instruction(Opcode.EW_MIN, y_next, (y, h_next)))
        h, y = h_next, y_next
    return ClosureResult(m.read(y), list(m.trace), config)


def closure(A: TropicalMatrix, x: Wavefront, hops: int, **kwargs) -> Wavefront:
    return closure_run(A, x, hops, **kwargs).distances


def minplus_bellman_ford(A: TropicalMatrix, x: Wavefront) -> Wavefront:
    """Relax every edge until nothing changes; plain integer arithmetic."""
    n = len(x)
    if len(A) != n:
        raise DimensionMismatch(f"matrix dimension {len(A)} != vector length {n}")
    dist = list(x)
    edges = [(i, j, A[j][i]) for j in range(n) for i in range(n) if A[j][i] != INF]
    for _ in range(n):
        changed = False
        for i, j, w in edges:
            if dist[i] != INF and dist[i] + w < dist[j]:
                dist[j] = dist[i] + w
                changed = True
        if not changed:
            break
    return tuple(dist)


def hop_limited_bellman_ford(A: TropicalMatrix, x: Wavefront, hops: int) -> Wavefront:
    """Shortest distances using at most ``hops`` edges (Jacobi-style rounds)."""
    n = len(x)
    if len(A) != n:
        raise DimensionMismatch(f"matrix dimension {len(A)} != vector length {n}")
    dist = list(x)
    edges = [(i, j, A[j][i]) for j in range(n) for i in range(n) if A[j][i] != INF]
    for _ in range(hops):
        nxt = list(dist)
        for i, j, w in edges:
            if dist[i] != INF and dist[i] + w < nxt[j]:
                nxt[j] = dist[i] + w
        if nxt == dist:
            break
        dist = nxt
    return tuple(dist)
