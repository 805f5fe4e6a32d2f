"""Vectorised N-bit register arithmetic over numpy ``uint64`` arrays.

The scalar model in :mod:`magicdiv.nbits` raises on the first overflow; the
sweeps need to run millions of cases and *count* events instead, so the
checked operations here return ``(result, event_mask)`` pairs. Results of
flagged lanes are the wrapped hardware value and must not be trusted.
"""

from __future__ import annotations

import numpy as np

from magicdiv.nbits import check_width

U64 = np.uint64
_LO32 = U64(0xFFFFFFFF)
_S32 = U64(32)


def as_u64(values) -> np.ndarray:
    return np.asarray(values, dtype=U64)


def width_mask(width: int) -> np.uint64:
    return U64((1 << width) - 1)


def mulhi64(a, b: np.ndarray) -> np.ndarray:
    """High 64 bits of the 128-bit product of two ``uint64`` operands."""
    a = as_u64(a)
    b = as_u64(b)
    a0, a1 = a & _LO32, a >> _S32
    b0, b1 = b & _LO32, b >> _S32
    t = a1 * b0 + ((a0 * b0) >> _S32)
    w1 = (t & _LO32) + a0 * b1
    return a1 * b1 + (t >> _S32) + (w1 >> _S32)


def mulhi(a, b: np.ndarray, width: int) -> np.ndarray:
    """``floor(a * b / 2**width)`` for ``width``-bit operands, exact up to 64 bits."""
    a = as_u64(a)
    b = as_u64(b)
    if width <= 32:
        return (a * b) >> U64(width)
    hi = mulhi64(a, b)
    if width == 64:
        return hi
    lo = a * b  # wraps mod 2**64, which is what we want
    return (hi << U64(64 - width)) | (lo >> U64(width))


def shr(a: np.ndarray, k: int, width: int) -> np.ndarray:
    if not 0 <= k <= width:
        raise ValueError(f"shift amount {k} outside [0, {width}]")
    if k >= 64:
        return np.zeros_like(a)
    return a >> U64(k)


def checked_add(a: np.ndarray, b: np.ndarray, width: int) -> tuple[np.ndarray, np.ndarray]:
    total = a + b
    bad = total < a  # carry out of the 64-bit lane
    if width < 64:
        bad |= total > width_mask(width)
    return total, bad


def checked_sub(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return a - b, b > a


# Step labels used in overflow-event records; they name the register
# operation that would have misbehaved.
STEP_GENERAL_SUB = "n - q"
STEP_GENERAL_ADD = "((n - q) >> h) + q"
STEP_BOUNDED_ADD = "n + q"


def divide_general(m_lo: int, p: int, width: int, n: np.ndarray):
    """Checked five-step general sequence over an array of dividends.

    Returns ``(quotients, {step_label: event_mask})``.
    """
    check_width(width)
    n = as_u64(n)
    q = mulhi(U64(m_lo), n, width)
    h = min(p, 1)
    diff, under = checked_sub(n, q)
    t, over = checked_add(shr(diff, h, width), q, width)
    t = shr(t, p - h, width)
    return t, {STEP_GENERAL_SUB: under, STEP_GENERAL_ADD: over}


def divide_bounded(m_lo: int, p: int, width: int, n: np.ndarray):
    """Checked two-step sequence; the caller guarantees ``n < 2**(width-1)``."""
    check_width(width)
    n = as_u64(n)
    q = mulhi(U64(m_lo), n, width)
    t, over = checked_add(n, q, width)
    return shr(t, p, width), {STEP_BOUNDED_ADD: over}


def general_kernel(m_lo: int, p: int, width: int, n: np.ndarray) -> np.ndarray:
    """Unchecked general sequence, the form a benchmark should time."""
    q = mulhi(U64(m_lo), n, width)
    h = min(p, 1)
    return (((n - q) >> U64(h)) + q) >> U64(p - h)


def bounded_kernel(m_lo: int, p: int, width: int, n: np.ndarray) -> np.ndarray:
    q = mulhi(U64(m_lo), n, width)
    return shr(n + q, p, width)
