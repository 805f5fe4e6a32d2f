import numpy as np
import pytest
from hypothesis import given, strategies as st

from magicdiv import batch

from oracle import high_word, magic_lo, quotient, shift_offset


@given(st.integers(0, 2**64 - 1), st.integers(0, 2**64 - 1))
def test_mulhi64_matches_exact_product(a, b):
    got = batch.mulhi64(np.uint64(a), np.array([b], dtype=np.uint64))
    assert int(got[0]) == (a * b) >> 64


@given(st.data())
def test_mulhi_any_width(data):
    width = data.draw(st.integers(2, 64))
    a = data.draw(st.integers(0, 2**width - 1))
    bs = data.draw(st.lists(st.integers(0, 2**width - 1), min_size=1, max_size=8))
    got = batch.mulhi(a, np.array(bs, dtype=np.uint64), width)
    assert [int(x) for x in got] == [high_word(a, b, width) for b in bs]


def test_mulhi64_extremes():
    top = 2**64 - 1
    values = np.array([0, 1, 2**32 - 1, 2**32, 2**63, top], dtype=np.uint64)
    got = batch.mulhi64(np.uint64(top), values)
    assert [int(x) for x in got] == [(top * int(v)) >> 64 for v in values]


@pytest.mark.parametrize("width", [8, 63, 64])
def test_checked_add_flags_exactly_the_overflows(width):
    top = 2**width - 1
    a = np.array([top, top, 0, top // 2, 1], dtype=np.uint64)
    b = np.array([0, 1, top, top // 2 + 1, top], dtype=np.uint64)
    _, bad = batch.checked_add(a, b, width)
    assert bad.tolist() == [int(x) + int(y) > top for x, y in zip(a, b)]


def test_checked_sub_flags_underflow():
    _, bad = batch.checked_sub(np.array([3, 5, 10], dtype=np.uint64),
                               np.array([10, 5, 3], dtype=np.uint64))
    assert bad.tolist() == [True, False, False]


def test_shr_full_width_shift_is_zero():
    a = np.array([2**64 - 1], dtype=np.uint64)
    assert int(batch.shr(a, 64, 64)[0]) == 0
    with pytest.raises(ValueError):
        batch.shr(a, 9, 8)


@given(st.data())
def test_kernels_match_oracle(data):
    width = data.draw(st.integers(2, 64))
    d = data.draw(st.integers(1, 2**width - 1))
    ns = data.draw(st.lists(st.integers(0, 2**width - 1), min_size=1, max_size=16))
    m, p = magic_lo(width, d), shift_offset(d)
    arr = np.array(ns, dtype=np.uint64)
    assert [int(x) for x in batch.general_kernel(m, p, width, arr)] == [quotient(n, d) for n in ns]
    t, events = batch.divide_general(m, p, width, arr)
    assert [int(x) for x in t] == [quotient(n, d) for n in ns]
    assert not any(mask.any() for mask in events.values())

    half = [n % 2 ** (width - 1) for n in ns]
    arr = np.array(half, dtype=np.uint64)
    assert [int(x) for x in batch.bounded_kernel(m, p, width, arr)] == [quotient(n, d) for n in half]
    t, events = batch.divide_bounded(m, p, width, arr)
    assert [int(x) for x in t] == [quotient(n, d) for n in half]
    assert not events[batch.STEP_BOUNDED_ADD].any()


def test_bounded_batch_flags_overflow_outside_precondition():
    # d = 7 at N = 32 overflows the single add at n = 2**32 - 1
    m, p = magic_lo(32, 7), shift_offset(7)
    _, events = batch.divide_bounded(m, p, 32, np.array([2**32 - 1], dtype=np.uint64))
    assert events[batch.STEP_BOUNDED_ADD].tolist() == [True]
