"""Temporal state machine: register file, matrix banks and per-transition costs.

Every instruction reads its operands from wavefront memory, runs one of the
pure operations in :mod:`tropical_machine.core`, and writes the result back
(directly or projectively). Control flow is left to the Python host.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import asdict, dataclass, field, fields, replace
from enum import Enum
from typing import Any, Iterable

from . import core
from .core import INF, TieMode, TimeValue, Wavefront
from .errors import HazardViolation, MachineError, TropicalError, UninitializedRegister
from .memory import MatrixBank, OverflowPolicy, RangeConfig, VectorRegister


class Opcode(Enum):
    VMM = "VMM"
    EW_MIN = "EW_MIN"
    EW_MAX = "EW_MAX"
    EW_INHIBIT = "EW_INHIBIT"
    TROPMUL = "TROPMUL"
    ARGMIN = "ARGMIN"
    BINARIZE = "BINARIZE"
    COINCIDENCE = "COINCIDENCE"
    MIN_REDUCE = "MIN_REDUCE"
    MAX_REDUCE = "MAX_REDUCE"
    SCALE = "SCALE"
    WRITE_COLUMN = "WRITE_COLUMN"
    INHIBIT_ROWS = "INHIBIT_ROWS"
    PROGRAM_MATRIX = "PROGRAM_MATRIX"
    MOVE = "MOVE"


class WriteMode(Enum):
    DIRECT = "direct"
    PROJECTIVE = "projective"


# opcodes whose destination is a matrix bank rather than a vector register
BANK_OPCODES = {Opcode.WRITE_COLUMN, Opcode.INHIBIT_ROWS, Opcode.PROGRAM_MATRIX}

_ARITY = {
    Opcode.VMM: 2,  # (bank, vector)
    Opcode.EW_MIN: 2, Opcode.EW_MAX: 2, Opcode.EW_INHIBIT: 2,
    Opcode.TROPMUL: 2, Opcode.COINCIDENCE: 2,
    Opcode.ARGMIN: 1, Opcode.BINARIZE: 1, Opcode.SCALE: 1,
    Opcode.MIN_REDUCE: 1, Opcode.MAX_REDUCE: 1, Opcode.MOVE: 1,
    Opcode.WRITE_COLUMN: 2,  # (onehot, data)
    Opcode.INHIBIT_ROWS: 1,  # (mask,)
    Opcode.PROGRAM_MATRIX: 0,
}


@dataclass(frozen=True)
class Instruction:
    opcode: Opcode
    dest: str
    sources: tuple = ()
    write_mode: WriteMode = WriteMode.DIRECT
    imm: TimeValue | None = None
    tie_mode: TieMode = TieMode.STRICT_BLOCK
    payload: Any = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(self.sources))
        expected = _ARITY[self.opcode]
        if len(self.sources) != expected:
            raise MachineError(f"{self.opcode.value} takes {expected} source(s), got {len(self.sources)}")
        if self.dest in self.sources:
            raise HazardViolation(
                f"{self.opcode.value}: '{self.dest}' is both source and destination "
                "(a temporal memory cannot play back and capture at once)")
        if self.opcode is Opcode.SCALE and self.imm is None:
            raise MachineError("SCALE needs a delay constant")
        if self.opcode is Opcode.PROGRAM_MATRIX and self.payload is None:
            raise MachineError("PROGRAM_MATRIX needs a matrix payload")

    def __str__(self):
        arrow = ":~" if self.write_mode is WriteMode.PROJECTIVE else ":="
        parts = [self.opcode.value, self.dest, arrow, ", ".join(self.sources)]
        if self.imm is not None:
            parts.append(f"#{core.format_time(self.imm)}")
        return " ".join(p for p in parts if p)


@dataclass(frozen=True)
class CostTable:
    """Per-primitive energy/latency constants (defaults: 180 nm memristive design)."""
    read_pJ_per_line: float = 2.0
    write_pJ_per_line: float = 10.0
    vmm_fJ_per_cell: float = 700.0
    ew_pJ_per_32_channels: float = 1.0
    vmm_latency_ns_per_cell: float = 0.1
    other_op_latency_ns: float = 10.0
    matrix_program_pJ_per_cell: float | None = None

    def __post_init__(self):
        if self.matrix_program_pJ_per_cell is None:
            object.__setattr__(self, "matrix_program_pJ_per_cell", self.write_pJ_per_line)
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ValueError(f"{f.name} must be >= 0")

    def vmm_latency_ns(self, n: int) -> float:
        return n * n * self.vmm_latency_ns_per_cell

    @classmethod
    def from_dict(cls, d: dict) -> "CostTable":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown cost table fields: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in d.items()})

    def to_dict(self) -> dict:
        return asdict(self)


_MACHINE_KEYS = {"width", "registers", "matrix_banks", "bits", "t_max", "overflow_policy"}


@dataclass(frozen=True)
class MachineConfig:
    width: int
    registers: int = 8
    matrix_banks: int = 2
    range: RangeConfig = field(default_factory=RangeConfig)
    costs: CostTable = field(default_factory=CostTable)

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("machine width must be >= 1")
        if self.registers < 1 or self.matrix_banks < 0:
            raise ValueError("register and bank counts must be positive")

    @classmethod
    def from_dict(cls, d: dict, **overrides) -> "MachineConfig":
        """Build from a flat key-value mapping: cost table fields plus
        optional ``width``, ``registers``, ``matrix_banks``, ``bits`` and
        ``overflow_policy``. Keyword overrides win over the mapping."""
        d = dict(d)
        d.update({k: v for k, v in overrides.items() if v is not None})
        cost_part = {k: v for k, v in d.items() if k not in _MACHINE_KEYS}
        rng = RangeConfig(bits=int(d.get("bits", 5)),
                          overflow_policy=OverflowPolicy(d.get("overflow_policy", "strict")))
        if "width" not in d:
            raise ValueError("machine config needs a width")
        return cls(width=int(d["width"]), registers=int(d.get("registers", 8)),
                   matrix_banks=int(d.get("matrix_banks", 2)), range=rng,
                   costs=CostTable.from_dict(cost_part))

    @classmethod
    def from_json(cls, path, **overrides) -> "MachineConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh), **overrides)

    def to_dict(self) -> dict:
        d = {"width": self.width, "registers": self.registers, "matrix_banks": self.matrix_banks,
             "bits": self.range.bits, "t_max": self.range.t_max,
             "overflow_policy": self.range.overflow_policy.value}
        d.update(self.costs.to_dict())
        return d


@dataclass(frozen=True)
class TraceEntry:
    instruction: Instruction
    transitions_consumed: int
    lines_read: int
    lines_written: int
    vmm_cells: int
    ew_channels: int
    programmed_cells: int
    energy_pJ: float
    latency_ns: float
    norm_constant_emitted: TimeValue = 0
    overflow_events: int = 0

    @property
    def opcode(self) -> Opcode:
        return self.instruction.opcode


def energy_breakdown(entry: TraceEntry, costs: CostTable) -> dict:
    return {
        "read": entry.lines_read * costs.read_pJ_per_line,
        "write": entry.lines_written * costs.write_pJ_per_line,
        "vmm": entry.vmm_cells * costs.vmm_fJ_per_cell / 1000.0,
        "elementwise": entry.ew_channels * costs.ew_pJ_per_32_channels / 32.0,
        "program": entry.programmed_cells * costs.matrix_program_pJ_per_cell,
    }


@dataclass
class CostReport:
    energy_pJ: float
    latency_ns: float
    transitions: int
    instructions: int
    edges_traversed: int
    gets: float
    getj: float
    overflow_events: int
    by_opcode: dict

    def to_dict(self) -> dict:
        return asdict(self)


def cost_report(trace: Iterable[TraceEntry], edges_traversed: int | None = None) -> CostReport:
    """Aggregate a trace.

    GETS is edges per nanosecond and GETJ edges per nanojoule. When
    ``edges_traversed`` is omitted every VMM cell evaluated counts as one edge.
    """
    trace = list(trace)
    if edges_traversed is None:
        edges_traversed = sum(e.vmm_cells for e in trace if e.opcode is Opcode.VMM)
    if edges_traversed < 0:
        raise ValueError("edges_traversed must be >= 0")
    by_op = defaultdict(lambda: {"count": 0, "transitions": 0, "energy_pJ": 0.0, "latency_ns": 0.0})
    for e in trace:
        row = by_op[e.opcode.value]
        row["count"] += 1
        row["transitions"] += e.transitions_consumed
        row["energy_pJ"] += e.energy_pJ
        row["latency_ns"] += e.latency_ns
    energy = sum(e.energy_pJ for e in trace)
    latency = sum(e.latency_ns for e in trace)
    gets = edges_traversed / latency if edges_traversed and latency > 0 else 0.0
    getj = edges_traversed / (energy / 1000.0) if edges_traversed and energy > 0 else 0.0
    return CostReport(
        energy_pJ=energy,
        latency_ns=latency,
        transitions=sum(e.transitions_consumed for e in trace),
        instructions=len(trace),
        edges_traversed=edges_traversed,
        gets=gets,
        getj=getj,
        overflow_events=sum(e.overflow_events for e in trace),
        by_opcode=dict(by_op),
    )


class Machine:
    """A single sequential temporal state machine.

    Registers and banks are created on first use, up to the configured
    counts. ``trace`` accumulates one :class:`TraceEntry` per executed
    instruction.
    """

    def __init__(self, config: MachineConfig):
        self.config = config
        self.registers: dict[str, VectorRegister] = {}
        self.banks: dict[str, MatrixBank] = {}
        self.trace: list[TraceEntry] = []

    @property
    def width(self) -> int:
        return self.config.width

    # -- storage ---------------------------------------------------------------

    def register(self, name: str, create: bool = False) -> VectorRegister:
        reg = self.registers.get(name)
        if reg is None:
            if name in self.banks:
                raise MachineError(f"'{name}' is a matrix bank, not a register")
            if not create:
                raise UninitializedRegister(f"register '{name}' has never been written")
            if len(self.registers) >= self.config.registers:
                raise MachineError(f"register file full ({self.config.registers} registers)")
            reg = VectorRegister(name, self.width, self.config.range)
            self.registers[name] = reg
        return reg

    def bank(self, name: str, create: bool = False) -> MatrixBank:
        b = self.banks.get(name)
        if b is None:
            if name in self.registers:
                raise MachineError(f"'{name}' is a register, not a matrix bank")
            if not create:
                raise MachineError(f"unknown matrix bank '{name}'")
            if len(self.banks) >= self.config.matrix_banks:
                raise MachineError(f"no free matrix bank ({self.config.matrix_banks} banks)")
            b = MatrixBank(name, self.width, self.config.range)
            self.banks[name] = b
        return b

    def load(self, name: str, values, projective: bool = False) -> TimeValue:
        """Host-side staging of an external wavefront into a register.

        Shorter inputs are padded with INF up to the machine width. Staging is
        not an instruction and is not charged.
        """
        w = core.wavefront(values)
        if len(w) > self.width:
            raise MachineError(f"wavefront of length {len(w)} exceeds machine width {self.width}")
        w = w + (INF,) * (self.width - len(w))
        reg = self.register(name, create=True)
        if projective:
            return reg.write_projective(w)
        reg.write_direct(w)
        return 0

    def read(self, name: str) -> Wavefront:
        return self.register(name).read()

    def halt_test(self, name: str) -> bool:
        """True while the register still holds a finite element."""
        return core.min_reduce(self.read(name)) != INF

    # -- execution ---------------------------------------------------------------

    def program_matrix(self, bank: str, A) -> TraceEntry:
        return self.execute(Instruction(Opcode.PROGRAM_MATRIX, bank, payload=core.matrix(A)))

    def execute(self, instr: Instruction) -> TraceEntry:
        op = instr.opcode
        n = self.width
        src = instr.sources
        norm = 0
        if op in BANK_OPCODES:
            bank = self.bank(instr.dest, create=True)
            before = bank.overflow_events
            if op is Opcode.PROGRAM_MATRIX:
                bank.program(instr.payload)
                counts = (0, 0, 0, 0, n * n, 1)
            elif op is Opcode.WRITE_COLUMN:
                bank.write_column(self.read(src[0]), self.read(src[1]))
                counts = (2 * n, n, 0, 0, 0, 1)
            else:
                bank.inhibit_rows(self.read(src[0]))
                # one row per transition: a mask line in, one row line rewritten
                counts = (n, n, 0, n, 0, n)
            overflow = bank.overflow_events - before
        else:
            result, counts = self._compute(instr)
            reg = self.register(instr.dest, create=True)
            before = reg.overflow_events
            if instr.write_mode is WriteMode.PROJECTIVE:
                norm = reg.write_projective(result)
            else:
                reg.write_direct(result)
            overflow = reg.overflow_events - before

        lines_read, lines_written, cells, ew_channels, programmed, transitions = counts
        costs = self.config.costs
        if op is Opcode.VMM:
            latency = costs.vmm_latency_ns(n)
        else:
            latency = transitions * costs.other_op_latency_ns
        entry = TraceEntry(
            instruction=instr,
            transitions_consumed=transitions,
            lines_read=lines_read,
            lines_written=lines_written,
            vmm_cells=cells,
            ew_channels=ew_channels,
            programmed_cells=programmed,
            energy_pJ=0.0,
            latency_ns=latency,
            norm_constant_emitted=norm,
            overflow_events=overflow,
        )
        energy = sum(energy_breakdown(entry, costs).values())
        entry = replace(entry, energy_pJ=energy)
        self.trace.append(entry)
        return entry

    def _compute(self, instr: Instruction):
        """Return (result wavefront, cost counts) for a register-destination op.

        Counts are (lines_read, lines_written, vmm_cells, ew_channels,
        programmed_cells, transitions).
        """
        op = instr.opcode
        n = self.width
        src = instr.sources
        t_max = self.config.range.t_max
        if op is Opcode.VMM:
            A = self.bank(src[0]).read()
            return core.vmm(A, self.read(src[1])), (n, n, n * n, 0, 0, 1)
        if op in (Opcode.EW_MIN, Opcode.EW_MAX, Opcode.EW_INHIBIT, Opcode.COINCIDENCE):
            u, v = self.read(src[0]), self.read(src[1])
            if op is Opcode.EW_MIN:
                out = core.ew_min(u, v)
            elif op is Opcode.EW_MAX:
                out = core.ew_max(u, v)
            elif op is Opcode.EW_INHIBIT:
                out = core.ew_inhibit(u, v, instr.tie_mode)
            else:
                out = core.ew_coincidence(u, v, 1 if instr.imm is None else int(instr.imm))
            return out, (2 * n, n, 0, n, 0, 1)
        if op is Opcode.TROPMUL:
            # phase 1 captures the first operand in the accumulator memory,
            # phase 2 plays the second through it: two reads, two writes
            return core.ew_mul(self.read(src[0]), self.read(src[1])), (2 * n, 2 * n, 0, 0, 0, 2)
        x = self.read(src[0])
        if op is Opcode.ARGMIN:
            return core.argmin_onehot(x), (n, n, 0, n, 0, 1)
        if op is Opcode.BINARIZE:
            limit = t_max if instr.imm is None else instr.imm
            return core.binarize(x, limit), (n, n, 0, n, 0, 1)
        if op is Opcode.SCALE:
            return core.scale(instr.imm, x), (n, n, 0, n, 0, 1)
        if op in (Opcode.MIN_REDUCE, Opcode.MAX_REDUCE):
            r = core.min_reduce(x) if op is Opcode.MIN_REDUCE else core.max_reduce(x)
            # scalar lands on lane 0
            return core.onehot(n, 0, r), (n, 1, 0, n, 0, 1)
        if op is Opcode.MOVE:
            return x, (n, n, 0, 0, 0, 1)
        raise MachineError(f"unhandled opcode {op}")

    def run(self, program: Iterable[Instruction]) -> list[TraceEntry]:
        """Execute sequentially. On error the exception carries
        ``partial_trace`` with the entries produced so far."""
        out: list[TraceEntry] = []
        for instr in program:
            try:
                out.append(self.execute(instr))
            except TropicalError as exc:
                exc.partial_trace = out
                raise
        return out

    def report(self, edges_traversed: int | None = None) -> CostReport:
        return cost_report(self.trace, edges_traversed)
