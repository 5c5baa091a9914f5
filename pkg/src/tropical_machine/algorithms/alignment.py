"""Needleman-Wunsch forward pass over skew diagonals of the score matrix.

``mu[k]`` holds the k-th skew diagonal of ``M`` (entries with ``i + j == k``).
Rising phase (``k <= n``): ``mu[k][j] = M[j][k - j]`` for ``j = 0..k``.
Falling phase (``k > n``): ``mu[k][j] = M[k - n + j][n - j]`` for ``j = 0..2n - k``.

Per diagonal the machine computes

    c' := coincidence(xs, ys)      gene equality, xs/ys the paired slices
    c  :~ binarize(c')             0 on a match, INF on a mismatch
    a  := sigma (x) mu[k-1]        indel step from either neighbour
    mc := m (+) c                  0 on a match, m on a mismatch
    b  := mc (x) mu[k-2]           diagonal step (TROPMUL, two transitions)
    r  := a_lo (+) b (+) a_hi

while slicing, reversal and boundary concatenation stay on the host.
Sequences are 1-indexed in the recurrence and 0-indexed in Python, so
``x_i`` is ``x[i - 1]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..core import INF, TimeValue
from ..errors import InvalidAlphabet, RangeViolation
from ..machine import (CostTable, Instruction, Machine, MachineConfig, Opcode,
                       TraceEntry, WriteMode)
from ..memory import RangeConfig

GENE_CODES = {"G": 0, "A": 1, "T": 2, "C": 3}


def encode(seq) -> list[int]:
    """Map a GATC string (or an iterable of codes 0..3) to gene codes."""
    out = []
    for ch in seq:
        if isinstance(ch, str):
            code = GENE_CODES.get(ch.upper())
        else:
            code = ch if ch in (0, 1, 2, 3) else None
        if code is None:
            raise InvalidAlphabet(f"{ch!r} is not one of G, A, T, C")
        out.append(code)
    return out


@dataclass
class AlignmentProblem:
    x: list[int]
    y: list[int]
    sigma: int = 1
    m: int = 1

    def __post_init__(self):
        self.x = encode(self.x)
        self.y = encode(self.y)
        if len(self.x) != len(self.y):
            raise ValueError(f"sequences must have equal length, got {len(self.x)} and {len(self.y)}")
        if not self.x:
            raise ValueError("sequences must be non-empty")
        if self.sigma < 1 or self.m < 1:
            raise ValueError("indel and mismatch costs must be >= 1")

    @property
    def n(self) -> int:
        return len(self.x)

    def max_value(self) -> int:
        """Upper bound on any value written during the forward pass."""
        return (self.n + 1) * max(self.sigma, self.m)


def required_bits(p: AlignmentProblem) -> int:
    return max(5, p.max_value().bit_length())


def classical_nw(p: AlignmentProblem) -> int:
    """Textbook O(n^2) DP; cost ``m`` on mismatch, ``sigma`` per indel."""
    n = p.n
    M = [[0] * (n + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        M[i][0] = i * p.sigma
        M[0][i] = i * p.sigma
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            sub = 0 if p.x[i - 1] == p.y[j - 1] else p.m
            M[i][j] = min(M[i][j - 1] + p.sigma, M[i - 1][j] + p.sigma, M[i - 1][j - 1] + sub)
    return M[n][n]


@dataclass
class AlignmentResult:
    cost: TimeValue
    diagonals: list[list[TimeValue]] = field(repr=False)
    trace: list[TraceEntry] = field(default_factory=list, repr=False)
    config: MachineConfig | None = None


def temporal_nw_run(p: AlignmentProblem, *, bits: int | None = None,
                    costs: CostTable | None = None) -> AlignmentResult:
    n = p.n
    if bits is None:
        bits = required_bits(p)
    rng = RangeConfig(bits)
    if p.max_value() > rng.t_max:
        raise RangeViolation(
            f"sequences of length {n} with costs sigma={p.sigma}, m={p.m} need "
            f"values up to {p.max_value()} but t_max={rng.t_max}",
            value=p.max_value(), t_max=rng.t_max)
    config = MachineConfig(width=n + 1, registers=16, matrix_banks=0, range=rng,
                           costs=costs or CostTable())
    mach = Machine(config)
    width = n + 1

    def read(name, length):
        return list(mach.read(name)[:length])

    mach.load("sigma_c", [p.sigma] * width)
    mach.load("m_c", [p.m] * width)
    mu = [[0], [p.sigma, p.sigma]]

    for k in range(2, 2 * n + 1):
        if k <= n:
            # pairs (x_j, y_{k-j}) for j = 1..k-1
            length = k - 1
            xs = p.x[0:k - 1]
            ys = [p.y[k - j - 1] for j in range(1, k)]
            prev2 = mu[k - 2]
        else:
            # pairs (x_{k-n+j}, y_{n-j}) for j = 0..2n-k
            length = 2 * n - k + 1
            xs = p.x[k - n - 1:n]
            ys = [p.y[n - j - 1] for j in range(length)]
            # mu[k-2] spans one extra diagonal entry on each side once both
            # diagonals are past the main one
            prev2 = mu[k - 2] if k == n + 1 else mu[k - 2][1:-1]
        mach.load("xs", xs)
        mach.load("ys", ys)
        mach.load("mu1", mu[k - 1])
        mach.load("mu2", prev2)
        mach.run([
            Instruction(Opcode.COINCIDENCE, "cp", ("xs", "ys"), imm=1),
            Instruction(Opcode.BINARIZE, "c", ("cp",), WriteMode.PROJECTIVE),
            Instruction(Opcode.SCALE, "a", ("mu1",), imm=p.sigma),
            Instruction(Opcode.EW_MIN, "mc", ("m_c", "c")),
            Instruction(Opcode.TROPMUL, "b", ("mc", "mu2")),
        ])
        a = read("a", len(mu[k - 1]))
        mach.load("a_lo", a[0:length])
        mach.load("a_hi", a[1:length + 1])
        mach.run([
            Instruction(Opcode.EW_MIN, "t", ("a_lo", "b")),
            Instruction(Opcode.EW_MIN, "r", ("t", "a_hi")),
        ])
        r = read("r", length)
        mu.append([a[0], *r, a[-1]] if k <= n else r)

    return AlignmentResult(cost=mu[2 * n][0], diagonals=mu, trace=list(mach.trace), config=config)


def temporal_nw(p: AlignmentProblem, *, bits: int | None = None, costs: CostTable | None = None) -> TimeValue:
    """Lowest alignment cost computed on the temporal state machine."""
    return temporal_nw_run(p, bits=bits, costs=costs).cost
