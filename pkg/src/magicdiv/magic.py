"""Round-up magic numbers and the two runtime division sequences.

Precomputation turns a divisor ``d`` into a shift offset ``p = ceil(log2 d)``
and a magic number ``m_lo``, the low ``N`` bits of ``ceil(2**(N+p) / d)``.
At runtime ``floor(n / d)`` is then recovered with one high multiply, a
subtraction, an addition and two shifts (:func:`divide_general`), or with a
high multiply, an addition and one shift when the dividend's top bit is clear
(:func:`divide_bounded`).

Both runtime paths execute on the checked register model, so a register
overflow shows up as an exception rather than a wrong quotient.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from magicdiv import batch
from magicdiv.nbits import (
    RegisterOverflowError,
    RegisterUnderflowError,
    RegisterValue,
    WidthMismatchError,
    check_width,
    checked_add,
    checked_sub,
    mulhi,
    shr,
)


class DomainError(ValueError):
    """Divisor outside ``U_N^+`` (zero, or too wide for the register)."""


class BoundError(ValueError):
    """Dividend violates the bounded path's ``n < 2**(N-1)`` precondition."""


class InvariantError(AssertionError):
    """A runtime sequence hit a register event it is proven never to hit."""


def _nonzero(d: RegisterValue) -> int:
    if d.value == 0:
        raise DomainError("divisor must be non-zero")
    return d.value


def ceil_log2(d: RegisterValue) -> int:
    """Exact ``ceil(log2(d))`` via integer bit length; 0 for ``d == 1``."""
    return (_nonzero(d) - 1).bit_length()


def is_power_of_two(d: RegisterValue) -> bool:
    value = _nonzero(d)
    return value & (value - 1) == 0


def full_magic(width: int, d: RegisterValue) -> int:
    """The full ``N+1``-bit magic number ``ceil(2**(N+p) / d)``."""
    check_width(width)
    value = _nonzero(d)
    k = width + ceil_log2(d)
    return ((1 << k) + value - 1) // value


@dataclass(frozen=True)
class MagicParams:
    """Precomputed ``(N, d, p, m_lo)`` for one divisor."""

    width: int
    divisor: RegisterValue
    shift_offset: int
    magic_lo: RegisterValue

    def __post_init__(self):
        check_width(self.width)
        if self.divisor.width != self.width or self.magic_lo.width != self.width:
            raise WidthMismatchError("divisor and magic number must match the params width")
        _nonzero(self.divisor)
        if not 0 <= self.shift_offset <= self.width:
            raise ValueError(f"shift offset {self.shift_offset} outside [0, {self.width}]")

    @property
    def d(self) -> int:
        return self.divisor.value

    @property
    def p(self) -> int:
        return self.shift_offset

    @property
    def m_lo(self) -> int:
        return self.magic_lo.value

    @property
    def full_magic(self) -> int:
        return (1 << self.width) + self.magic_lo.value


def precompute_magic(width: int, d: RegisterValue | int) -> MagicParams:
    """Shift offset and low-word magic number for divisor ``d``."""
    check_width(width)
    if not isinstance(d, RegisterValue):
        if not 0 <= d < (1 << width):
            raise DomainError(f"divisor {d} is not a {width}-bit unsigned integer")
        d = RegisterValue(width, d)
    elif d.width != width:
        raise WidthMismatchError(f"divisor width {d.width} differs from {width}")
    p = ceil_log2(d)
    m = full_magic(width, d)
    m_lo = m & ((1 << width) - 1)
    return MagicParams(width, d, p, RegisterValue(width, m_lo))


@dataclass(frozen=True)
class Step:
    op: str
    operands: tuple[int, ...]
    result: int


@dataclass(frozen=True)
class DivisionTrace:
    """Every register value produced while dividing one ``n``."""

    dividend: RegisterValue
    q_estimate: RegisterValue
    shift_guard: int
    quotient: RegisterValue
    steps: tuple[Step, ...] = field(default_factory=tuple)


def _check_dividend(params: MagicParams, n: RegisterValue | int) -> RegisterValue:
    if not isinstance(n, RegisterValue):
        return RegisterValue(params.width, n)
    if n.width != params.width:
        raise WidthMismatchError(f"dividend width {n.width} differs from {params.width}")
    return n


def divide_general_traced(params: MagicParams, n: RegisterValue | int) -> DivisionTrace:
    n = _check_dividend(params, n)
    p = params.shift_offset
    steps = []
    try:
        q = mulhi(params.magic_lo, n)
        steps.append(Step("mulhi", (params.m_lo, n.value), q.value))
        h = min(p, 1)
        steps.append(Step("min", (p, 1), h))
        diff = checked_sub(n, q)
        steps.append(Step("sub", (n.value, q.value), diff.value))
        t = shr(diff, h)
        steps.append(Step("shr", (diff.value, h), t.value))
        total = checked_add(t, q)
        steps.append(Step("add", (t.value, q.value), total.value))
        t = shr(total, p - h)
        steps.append(Step("shr", (total.value, p - h), t.value))
    except (RegisterOverflowError, RegisterUnderflowError) as exc:
        raise InvariantError(
            f"general path hit a register event for d={params.d}, n={n.value}: {exc}"
        ) from exc
    return DivisionTrace(n, q, h, t, tuple(steps))


def divide_general(params: MagicParams, n: RegisterValue | int) -> RegisterValue:
    """``floor(n / d)`` for any N-bit ``n``, without overflowing N-bit registers."""
    return divide_general_traced(params, n).quotient


def divide_bounded(params: MagicParams, n: RegisterValue | int) -> RegisterValue:
    """``floor(n / d)`` via ``(n + mulhi(m_lo, n)) >> p``; needs ``n < 2**(N-1)``."""
    n = _check_dividend(params, n)
    if n.value >> (params.width - 1):
        raise BoundError(
            f"bounded path requires n < 2^{params.width - 1}, got {n.value}"
        )
    q = mulhi(params.magic_lo, n)
    try:
        total = checked_add(n, q)
    except RegisterOverflowError as exc:
        raise InvariantError(
            f"bounded path overflowed for d={params.d}, n={n.value}: {exc}"
        ) from exc
    return shr(total, params.shift_offset)


def divide_general_batch(params: MagicParams, n: np.ndarray):
    """Array form of :func:`divide_general`; returns ``(quotients, events)``."""
    return batch.divide_general(params.m_lo, params.p, params.width, n)


def divide_bounded_batch(params: MagicParams, n: np.ndarray):
    """Array form of :func:`divide_bounded`; returns ``(quotients, events)``.

    Raises :class:`BoundError` if any lane has its top bit set.
    """
    n = batch.as_u64(n)
    if n.size and int(n.max()) >> (params.width - 1):
        raise BoundError(f"bounded path requires every n < 2^{params.width - 1}")
    return batch.divide_bounded(params.m_lo, params.p, params.width, n)
