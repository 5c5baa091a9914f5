"""Pure min-plus (tropical) operations on arrival times.

Scalars are plain ``int`` ticks or :data:`INF` (an edge that never arrives).
A wavefront is an immutable ``tuple`` of such scalars, and a tropical matrix
is a tuple of row tuples where ``A[j][i]`` is the weight of the edge ``i -> j``
(column ``i`` lists the outgoing edges of node ``i``).

Everything here is stateless and time-shift invariant unless noted
(``binarize`` and ``normalize`` deliberately are not).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence, Union

from .errors import DimensionMismatch, RangeViolation

INF = math.inf

TimeValue = Union[int, float]
Wavefront = tuple
TropicalMatrix = tuple


class TieMode(Enum):
    STRICT_BLOCK = "strict_block"
    PASS_ON_TIE = "pass_on_tie"


class EwOp(Enum):
    MIN = "min"
    MAX = "max"
    INHIBIT = "inhibit"


def time_value(v) -> TimeValue:
    """Coerce ``v`` to a tick count or INF, rejecting anything else."""
    if isinstance(v, str):
        if v.strip().lower() in ("inf", "∞", "infinity"):
            return INF
        raise ValueError(f"not a time value: {v!r}")
    if isinstance(v, bool):
        raise TypeError("booleans are not time values")
    if v == INF:
        return INF
    if isinstance(v, float):
        if not v.is_integer():
            raise ValueError(f"time values are integer ticks, got {v!r}")
        v = int(v)
    try:
        iv = int(v)
    except (TypeError, ValueError):
        raise TypeError(f"not a time value: {v!r}") from None
    if iv != v:
        raise ValueError(f"time values are integer ticks, got {v!r}")
    if iv < 0:
        raise ValueError(f"time values are nonnegative, got {v!r}")
    return iv


def is_finite(v: TimeValue) -> bool:
    return v != INF


def wavefront(values: Iterable) -> Wavefront:
    w = tuple(time_value(v) for v in values)
    if not w:
        raise ValueError("a wavefront needs at least one element")
    return w


def onehot(n: int, i: int, value: TimeValue = 0) -> Wavefront:
    """Tropical one-hot: ``value`` at index ``i`` and INF elsewhere."""
    return tuple(value if j == i else INF for j in range(n))


def infs(n: int) -> Wavefront:
    return (INF,) * n


def matrix(rows: Iterable[Iterable]) -> TropicalMatrix:
    m = tuple(tuple(time_value(v) for v in row) for row in rows)
    n = len(m)
    if any(len(row) != n for row in m):
        raise DimensionMismatch(f"matrix must be square, got {n} rows of lengths {[len(r) for r in m]}")
    return m


def inf_matrix(n: int) -> TropicalMatrix:
    return tuple((INF,) * n for _ in range(n))


# -- scalars -----------------------------------------------------------------

def t_add(a: TimeValue, b: TimeValue) -> TimeValue:
    """First arrival (min); INF is the identity."""
    return a if a <= b else b


def t_mul(a: TimeValue, b: TimeValue) -> TimeValue:
    """Delay (ordinary addition); INF absorbs."""
    if a == INF or b == INF:
        return INF
    return a + b


def t_max(a: TimeValue, b: TimeValue) -> TimeValue:
    """Last arrival (max); INF dominates."""
    return a if a >= b else b


def t_inhibit(inhibitor: TimeValue, data: TimeValue,
              tie_mode: TieMode = TieMode.STRICT_BLOCK) -> TimeValue:
    """Pass ``data`` only if it arrives before ``inhibitor``.

    Under STRICT_BLOCK a simultaneous inhibitor wins; PASS_ON_TIE lets the
    data through on a tie.
    """
    if data < inhibitor or (tie_mode is TieMode.PASS_ON_TIE and data == inhibitor):
        return data
    return INF


def coincidence(a: TimeValue, b: TimeValue, epsilon: int = 1) -> TimeValue:
    """Return the later arrival when ``|a - b| < epsilon``, else INF.

    Built as ``(epsilon * min(a, b)) -| max(a, b)`` with a strict inhibit, so
    ``epsilon`` must be at least 1.
    """
    if epsilon < 1:
        raise ValueError("coincidence window must be >= 1 tick")
    return t_inhibit(t_mul(epsilon, t_add(a, b)), t_max(a, b), TieMode.STRICT_BLOCK)


# -- vectors -----------------------------------------------------------------

def _check_same_length(u: Sequence, v: Sequence) -> None:
    if len(u) != len(v):
        raise DimensionMismatch(f"length {len(u)} != {len(v)}")


def ew(op: EwOp, u: Wavefront, v: Wavefront,
       tie_mode: TieMode = TieMode.STRICT_BLOCK) -> Wavefront:
    """Elementwise MIN, MAX or INHIBIT (``u`` inhibits ``v``)."""
    _check_same_length(u, v)
    if op is EwOp.MIN:
        return tuple(map(t_add, u, v))
    if op is EwOp.MAX:
        return tuple(map(t_max, u, v))
    if op is EwOp.INHIBIT:
        return tuple(t_inhibit(a, b, tie_mode) for a, b in zip(u, v))
    raise ValueError(f"unknown elementwise op {op!r}")


def ew_min(u: Wavefront, v: Wavefront) -> Wavefront:
    return ew(EwOp.MIN, u, v)


def ew_max(u: Wavefront, v: Wavefront) -> Wavefront:
    return ew(EwOp.MAX, u, v)


def ew_inhibit(u: Wavefront, v: Wavefront, tie_mode: TieMode = TieMode.STRICT_BLOCK) -> Wavefront:
    return ew(EwOp.INHIBIT, u, v, tie_mode)


def ew_mul(u: Wavefront, v: Wavefront) -> Wavefront:
    """Elementwise delay of one wavefront by another (needs memory in hardware)."""
    _check_same_length(u, v)
    return tuple(map(t_mul, u, v))


def ew_coincidence(u: Wavefront, v: Wavefront, epsilon: int = 1) -> Wavefront:
    _check_same_length(u, v)
    return tuple(coincidence(a, b, epsilon) for a, b in zip(u, v))


def scale(c: TimeValue, x: Wavefront) -> Wavefront:
    if c == INF:
        return (INF,) * len(x)
    return tuple(INF if v == INF else v + c for v in x)


def vmm(A: TropicalMatrix, x: Wavefront) -> Wavefront:
    """Min-plus product: ``y[j] = min_i (A[j][i] + x[i])``."""
    if len(A) != len(x):
        raise DimensionMismatch(f"matrix dimension {len(A)} != vector length {len(x)}")
    hot = [(i, v) for i, v in enumerate(x) if v != INF]
    if not hot:
        return (INF,) * len(A)
    out = []
    for row in A:
        best = INF
        for i, v in hot:
            a = row[i]
            if a != INF and a + v < best:
                best = a + v
        out.append(best)
    return tuple(out)


def argmin_onehot(x: Wavefront) -> Wavefront:
    """Keep only the first-arriving element (lowest index on ties)."""
    best = INF
    idx = -1
    for i, v in enumerate(x):
        if v < best:
            best, idx = v, i
    if idx < 0:
        return (INF,) * len(x)
    return onehot(len(x), idx, best)


def binarize(x: Wavefront, t_max_value: TimeValue) -> Wavefront:
    """Send every finite element to ``t_max_value``; INF stays INF."""
    if t_max_value == INF:
        raise ValueError("binarize needs a finite t_max")
    for v in x:
        if v != INF and v > t_max_value:
            raise RangeViolation(f"element {v} exceeds t_max={t_max_value}", value=v, t_max=t_max_value)
    return tuple(INF if v == INF else t_max_value for v in x)


@dataclass(frozen=True)
class NormalizedWavefront:
    shape: Wavefront
    constant: TimeValue


def normalize(x: Wavefront) -> NormalizedWavefront:
    """Subtract the minimum element; an all-INF wavefront keeps constant 0."""
    c = min(x)
    if c == INF:
        return NormalizedWavefront(tuple(x), 0)
    return NormalizedWavefront(tuple(INF if v == INF else v - c for v in x), c)


def min_reduce(x: Wavefront) -> TimeValue:
    return min(x)


def max_reduce(x: Wavefront) -> TimeValue:
    return max(x)


def format_time(v: TimeValue) -> str:
    return "∞" if v == INF else str(v)


def to_json_value(v: TimeValue):
    return "inf" if v == INF else int(v)
