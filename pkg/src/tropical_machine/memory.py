"""Temporal wavefront memory: vector registers and matrix banks.

Stored values live on an integer tick grid with a finite dynamic range
``t_max = 2**bits - 1``. The clock line is ideal, so reads return exactly
what was written (dead time is zero).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from . import core
from .core import INF, TimeValue, TropicalMatrix, Wavefront
from .errors import (DimensionMismatch, NotBinary, NotOneHot, RangeViolation,
                     UninitializedRegister)


class OverflowPolicy(Enum):
    STRICT = "strict"
    SATURATE_TO_INFINITY = "saturate_to_infinity"


@dataclass(frozen=True)
class RangeConfig:
    bits: int = 5
    overflow_policy: OverflowPolicy = OverflowPolicy.STRICT

    def __post_init__(self):
        if self.bits < 1:
            raise ValueError("bits must be >= 1")
        if isinstance(self.overflow_policy, str):
            object.__setattr__(self, "overflow_policy", OverflowPolicy(self.overflow_policy))

    @property
    def t_max(self) -> int:
        return 2 ** self.bits - 1

    def clip(self, w) -> tuple[tuple, int]:
        """Range-check ``w``; return the stored values and the overflow count."""
        t_max = self.t_max
        over = [v for v in w if v != INF and v > t_max]
        if not over:
            return tuple(w), 0
        if self.overflow_policy is OverflowPolicy.STRICT:
            raise RangeViolation(f"value {over[0]} exceeds t_max={t_max} ({self.bits} bits)",
                                 value=over[0], t_max=t_max)
        return tuple(INF if v != INF and v > t_max else v for v in w), len(over)


@dataclass
class VectorRegister:
    name: str
    width: int
    range: RangeConfig = field(default_factory=RangeConfig)
    contents: Wavefront | None = None
    norm_constant: TimeValue = 0
    overflow_events: int = 0

    def _check_width(self, w):
        if len(w) != self.width:
            raise DimensionMismatch(f"register {self.name} has width {self.width}, got {len(w)}")

    def write_direct(self, w: Wavefront) -> int:
        """Store ``w`` as-is. Returns the number of saturated elements."""
        self._check_width(w)
        stored, events = self.range.clip(w)
        self.contents = stored
        self.norm_constant = 0
        self.overflow_events += events
        return events

    def write_projective(self, w: Wavefront) -> TimeValue:
        """Store the normalized shape of ``w`` and return its norm constant.

        Only the shape is range-checked; the constant leaves the array.
        """
        self._check_width(w)
        nw = core.normalize(w)
        stored, events = self.range.clip(nw.shape)
        self.contents = stored
        self.norm_constant = nw.constant
        self.overflow_events += events
        return nw.constant

    def read(self) -> Wavefront:
        if self.contents is None:
            raise UninitializedRegister(f"register {self.name} has never been written")
        return self.contents


def _finite_indices(w):
    return [i for i, v in enumerate(w) if v != INF]


@dataclass
class MatrixBank:
    """An N x N temporal crossbar. Starts as the all-INF (empty graph) matrix."""
    name: str
    n: int
    range: RangeConfig = field(default_factory=RangeConfig)
    entries: TropicalMatrix = None
    overflow_events: int = 0

    def __post_init__(self):
        if self.entries is None:
            self.entries = core.inf_matrix(self.n)

    def program(self, A: TropicalMatrix) -> None:
        if len(A) != self.n or any(len(row) != self.n for row in A):
            raise DimensionMismatch(f"bank {self.name} is {self.n}x{self.n}")
        rows = []
        events = 0
        for row in A:
            stored, e = self.range.clip(row)
            rows.append(stored)
            events += e
        self.entries = tuple(rows)
        self.overflow_events += events

    def write_column(self, onehot: Wavefront, w: Wavefront) -> None:
        if len(onehot) != self.n or len(w) != self.n:
            raise DimensionMismatch(f"bank {self.name} is {self.n}x{self.n}")
        hot = _finite_indices(onehot)
        if len(hot) > 1:
            raise NotOneHot(f"column select has {len(hot)} finite elements")
        if not hot:
            return
        col = hot[0]
        stored, events = self.range.clip(w)
        self.overflow_events += events
        self.entries = tuple(
            row[:col] + (stored[j],) + row[col + 1:] for j, row in enumerate(self.entries)
        )

    def inhibit_rows(self, mask: Wavefront) -> None:
        """Erase (set to INF) every row ``i`` with ``mask[i] == 0``."""
        if len(mask) != self.n:
            raise DimensionMismatch(f"mask length {len(mask)} != {self.n}")
        bad = [v for v in mask if v not in (0, INF)]
        if bad:
            raise NotBinary(f"mask must be tropically binary (0 or inf), found {bad[0]}")
        empty = (INF,) * self.n
        self.entries = tuple(empty if m == 0 else row for m, row in zip(mask, self.entries))

    def read(self) -> TropicalMatrix:
        return self.entries

    def column(self, i: int) -> Wavefront:
        return tuple(row[i] for row in self.entries)
