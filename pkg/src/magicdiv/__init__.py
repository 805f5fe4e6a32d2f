"""Fast unsigned division by runtime-constant divisors using round-up magic numbers."""

from magicdiv.magic import (
    BoundError,
    DivisionTrace,
    DomainError,
    InvariantError,
    MagicParams,
    ceil_log2,
    divide_bounded,
    divide_general,
    divide_general_traced,
    full_magic,
    is_power_of_two,
    precompute_magic,
)
from magicdiv.nbits import (
    RegisterOverflowError,
    RegisterUnderflowError,
    RegisterValue,
    ShiftRangeError,
    WidthMismatchError,
    checked_add,
    checked_sub,
    mulhi,
    product_bit_width,
    shr,
)

__version__ = "0.1.0"
