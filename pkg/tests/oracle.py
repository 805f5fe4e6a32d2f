"""Independent reference arithmetic for the tests.

Nothing here imports magicdiv: quantities are computed from their
definitions with exact rationals and brute-force searches.
"""

from fractions import Fraction
from math import ceil, floor


def shift_offset(d: int) -> int:
    """Smallest p with 2**p >= d, found by counting."""
    p = 0
    while 2**p < d:
        p += 1
    return p


def full_magic(width: int, d: int) -> int:
    return ceil(Fraction(2 ** (width + shift_offset(d)), d))


def magic_lo(width: int, d: int) -> int:
    return full_magic(width, d) % 2**width


def high_word(a: int, b: int, width: int) -> int:
    return floor(Fraction(a * b, 2**width))


def quotient(n: int, d: int) -> int:
    return floor(Fraction(n, d))
