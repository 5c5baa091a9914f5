"""A tiny tropical expression language and its compiler to machine code.

Grammar (all binary operators left-associative, loosest first)::

    expr    := min_max ( "-|" min_max )*          # inhibit: left blocks right
    min_max := term ( ("+" | "^") term )*         # + is min, ^ is max
    term    := atom ( "*" atom )*                 # * is delay (ordinary addition)
    atom    := IDENT | INT | "inf" | "(" expr ")"

``direct_eval`` walks the tree with :mod:`tropical_machine.core`; ``evaluate``
compiles, runs on a :class:`~tropical_machine.machine.Machine` and reads the
result back. The two must always agree.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Union

from . import core
from .core import INF, TimeValue, Wavefront
from .errors import DimensionMismatch, ExprSyntaxError, UnboundVariable
from .machine import Instruction, Machine, MachineConfig, Opcode


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: TimeValue


@dataclass(frozen=True)
class BinOp:
    op: str  # one of "+", "^", "*", "-|"
    left: "Expr"
    right: "Expr"


Expr = Union[Var, Const, BinOp]

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<ident>[a-z][a-z0-9_]*)|(?P<op>-\||[+^*()]))")
_LEVELS = [("-|",), ("+", "^"), ("*",)]


def tokenize(src: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if not m:
            # point at the offending character, not the skipped whitespace
            bad = pos + len(src[pos:]) - len(src[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {src[bad]!r}", bad)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("eof", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.tokens = tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self) -> Expr:
        e = self.level(0)
        kind, text, pos = self.peek()
        if kind != "eof":
            raise ExprSyntaxError(f"unexpected {text!r}", pos)
        return e

    def level(self, k: int) -> Expr:
        if k == len(_LEVELS):
            return self.atom()
        left = self.level(k + 1)
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in _LEVELS[k]:
                self.take()
                left = BinOp(text, left, self.level(k + 1))
            else:
                return left

    def atom(self) -> Expr:
        kind, text, pos = self.take()
        if kind == "num":
            return Const(int(text))
        if kind == "ident":
            return Const(INF) if text == "inf" else Var(text)
        if kind == "op" and text == "(":
            e = self.level(0)
            kind, text, pos = self.take()
            if text != ")":
                raise ExprSyntaxError("expected ')'", pos)
            return e
        if kind == "eof":
            raise ExprSyntaxError("unexpected end of input", pos)
        raise ExprSyntaxError(f"unexpected {text!r}", pos)


def parse(src: str) -> Expr:
    if not src or not src.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(src).parse()


def to_source(e: Expr) -> str:
    """Fully parenthesized source text; ``parse(to_source(e)) == e``."""
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Const):
        return "inf" if e.value == INF else str(e.value)
    return f"({to_source(e.left)} {e.op} {to_source(e.right)})"


def variables(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Const):
        return set()
    return variables(e.left) | variables(e.right)


# -- direct evaluation (oracle) ------------------------------------------------

def _broadcast(value, width):
    return (value,) * width


def _common_width(bindings: Mapping[str, Wavefront]) -> int:
    widths = {len(v) for v in bindings.values()}
    if len(widths) > 1:
        raise DimensionMismatch(f"bindings have differing widths {sorted(widths)}")
    return widths.pop() if widths else 1


def direct_eval(e: Expr, bindings: Mapping[str, Wavefront]) -> Wavefront:
    width = _common_width(bindings)

    def go(node):
        if isinstance(node, Var):
            if node.name not in bindings:
                raise UnboundVariable(f"unbound variable '{node.name}'")
            return tuple(bindings[node.name])
        if isinstance(node, Const):
            return _broadcast(node.value, width)
        u, v = go(node.left), go(node.right)
        if node.op == "+":
            return core.ew_min(u, v)
        if node.op == "^":
            return core.ew_max(u, v)
        if node.op == "*":
            return core.ew_mul(u, v)
        return core.ew_inhibit(u, v)

    return go(e)


# -- compilation ----------------------------------------------------------------

_EW = {"+": Opcode.EW_MIN, "^": Opcode.EW_MAX, "-|": Opcode.EW_INHIBIT}


@dataclass
class Compiled:
    """Machine program for an expression.

    ``constants`` maps register names to scalars the host broadcasts into
    those registers before running; variables live in registers named
    after themselves.
    """
    program: list[Instruction]
    result: str
    constants: dict[str, TimeValue] = field(default_factory=dict)
    variables: set[str] = field(default_factory=set)

    @property
    def transitions(self) -> int:
        return sum(2 if i.opcode is Opcode.TROPMUL else 1 for i in self.program)

    @property
    def registers_needed(self) -> int:
        names = set(self.variables) | set(self.constants) | {self.result}
        for instr in self.program:
            names.add(instr.dest)
            names.update(instr.sources)
        return len(names)


def _fold(e: Expr) -> Expr:
    """Collapse constant-only subtrees into a single constant."""
    if not isinstance(e, BinOp):
        return e
    left, right = _fold(e.left), _fold(e.right)
    if isinstance(left, Const) and isinstance(right, Const):
        return Const(direct_eval(BinOp(e.op, left, right), {})[0])
    return BinOp(e.op, left, right)


def compile_expr(e: Expr) -> Compiled:
    """Post-order emission into recycled temporaries.

    vector * vector becomes TROPMUL (two transitions), constant * vector a
    single SCALE, and min/max/inhibit the matching elementwise instruction.
    """
    e = _fold(e)
    program: list[Instruction] = []
    constants: dict[str, TimeValue] = {}
    free: list[str] = []
    counter = [0]

    def fresh() -> str:
        if free:
            return free.pop()
        name = f"%t{counter[0]}"
        counter[0] += 1
        return name

    def release(name: str) -> None:
        if name.startswith("%t"):
            free.append(name)

    def const_reg(value) -> str:
        name = f"%c{core.format_time(value).replace('∞', 'inf')}"
        constants[name] = value
        return name

    def go(node) -> str:
        if isinstance(node, Var):
            return node.name
        if isinstance(node, Const):
            return const_reg(node.value)
        if node.op == "*" and (isinstance(node.left, Const) or isinstance(node.right, Const)):
            c, other = (node.left, node.right) if isinstance(node.left, Const) else (node.right, node.left)
            src = go(other)
            dest = fresh()
            release(src)
            program.append(Instruction(Opcode.SCALE, dest, (src,), imm=c.value))
            return dest
        a = go(node.left)
        b = go(node.right)
        # allocate before releasing so the destination never aliases a source
        dest = fresh()
        release(a)
        release(b)
        opcode = Opcode.TROPMUL if node.op == "*" else _EW[node.op]
        program.append(Instruction(opcode, dest, (a, b)))
        return dest

    result = go(e)
    return Compiled(program, result, constants, variables(e))


def evaluate(src: str, bindings: Mapping[str, Wavefront], machine: Machine | None = None) -> Wavefront:
    """Parse, compile, stage bindings, run, and read back the result."""
    e = parse(src)
    compiled = compile_expr(e)
    return run_compiled(compiled, bindings, machine)[0]


def run_compiled(compiled: Compiled, bindings: Mapping[str, Wavefront], machine: Machine | None = None):
    """Run a compiled expression; returns ``(result, machine, trace)``."""
    width = _common_width(bindings)
    for name in compiled.variables:
        if name not in bindings:
            raise UnboundVariable(f"unbound variable '{name}'")
    if machine is None:
        machine = Machine(MachineConfig(width=width, registers=max(8, compiled.registers_needed)))
    elif machine.width != width:
        raise DimensionMismatch(f"bindings have width {width}, machine has {machine.width}")
    for name in sorted(compiled.variables):
        machine.load(name, bindings[name])
    for name, value in compiled.constants.items():
        machine.load(name, _broadcast(value, width))
    trace = machine.run(compiled.program)
    return machine.read(compiled.result), machine, trace
