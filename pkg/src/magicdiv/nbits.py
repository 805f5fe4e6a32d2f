"""Bit-exact model of N-bit unsigned registers.

Every operation is checked against ``[0, 2**N)``: instead of wrapping, an
out-of-range result raises, so an overflow becomes an observable event.
Values are plain Python ints underneath, which makes double-width
intermediates (``m * n`` needs up to ``2N + 1`` bits) exact for free.
"""

from __future__ import annotations

from dataclasses import dataclass

MIN_WIDTH = 2
MAX_WIDTH = 64


class RegisterOverflowError(OverflowError):
    """A result did not fit in an N-bit register."""

    def __init__(self, op: str, width: int, exact: int):
        super().__init__(f"{op} overflows {width}-bit register: exact result {exact}")
        self.op = op
        self.width = width
        self.exact = exact


class RegisterUnderflowError(ArithmeticError):
    """Unsigned subtraction went below zero."""

    def __init__(self, width: int, minuend: int, subtrahend: int):
        super().__init__(
            f"{width}-bit subtraction underflows: {minuend} - {subtrahend} < 0"
        )
        self.width = width
        self.minuend = minuend
        self.subtrahend = subtrahend


class WidthMismatchError(ValueError):
    pass


class ShiftRangeError(ValueError):
    pass


def check_width(n_bits: int) -> int:
    """Validate a register width and return it."""
    if isinstance(n_bits, bool) or not isinstance(n_bits, int):
        raise TypeError(f"bit width must be an int, got {type(n_bits).__name__}")
    if not MIN_WIDTH <= n_bits <= MAX_WIDTH:
        raise ValueError(f"bit width must be in [{MIN_WIDTH}, {MAX_WIDTH}], got {n_bits}")
    return n_bits


def mask(width: int) -> int:
    return (1 << width) - 1


@dataclass(frozen=True)
class RegisterValue:
    """An unsigned integer held in a ``width``-bit register."""

    width: int
    value: int

    def __post_init__(self):
        check_width(self.width)
        if not 0 <= self.value < (1 << self.width):
            raise ValueError(f"{self.value} is not a {self.width}-bit unsigned integer")

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"RegisterValue(width={self.width}, value={self.value})"


def reg(width: int, value: int) -> RegisterValue:
    return RegisterValue(width, int(value))


def _same_width(a: RegisterValue, b: RegisterValue) -> int:
    if a.width != b.width:
        raise WidthMismatchError(f"operand widths differ: {a.width} vs {b.width}")
    return a.width


def checked_add(a: RegisterValue, b: RegisterValue) -> RegisterValue:
    """Return ``a + b``, raising :class:`RegisterOverflowError` if it needs more bits."""
    width = _same_width(a, b)
    total = a.value + b.value
    if total >> width:
        raise RegisterOverflowError("add", width, total)
    return RegisterValue(width, total)


def checked_sub(a: RegisterValue, b: RegisterValue) -> RegisterValue:
    width = _same_width(a, b)
    if b.value > a.value:
        raise RegisterUnderflowError(width, a.value, b.value)
    return RegisterValue(width, a.value - b.value)


def shr(a: RegisterValue, k: int) -> RegisterValue:
    """Logical right shift, i.e. ``floor(a / 2**k)`` for ``0 <= k <= width``."""
    if not 0 <= k <= a.width:
        raise ShiftRangeError(f"shift amount {k} outside [0, {a.width}]")
    return RegisterValue(a.width, a.value >> k)


def mulhi(a: RegisterValue, b: RegisterValue) -> RegisterValue:
    """High N-bit word of the full 2N-bit product ``a * b``."""
    width = _same_width(a, b)
    return RegisterValue(width, (a.value * b.value) >> width)


def product_bit_width(x: int, y: int) -> int:
    """Smallest ``B`` with ``x * y < 2**B`` (zero has width 0)."""
    if x < 0 or y < 0:
        raise ValueError("operands must be non-negative")
    return (x * y).bit_length()
