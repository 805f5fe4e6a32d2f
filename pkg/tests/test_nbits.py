import pytest
from hypothesis import given, strategies as st

from magicdiv.nbits import (
    RegisterOverflowError,
    RegisterUnderflowError,
    RegisterValue,
    ShiftRangeError,
    WidthMismatchError,
    check_width,
    checked_add,
    checked_sub,
    mulhi,
    product_bit_width,
    shr,
)

from oracle import high_word


def r(width, value):
    return RegisterValue(width, value)


@st.composite
def register_pairs(draw, min_width=2, max_width=64):
    width = draw(st.integers(min_width, max_width))
    a = draw(st.integers(0, 2**width - 1))
    b = draw(st.integers(0, 2**width - 1))
    return width, a, b


@pytest.mark.parametrize("width", [0, 1, 65, 128])
def test_width_out_of_range(width):
    with pytest.raises(ValueError):
        check_width(width)


def test_register_rejects_out_of_range_values():
    with pytest.raises(ValueError):
        r(8, 256)
    with pytest.raises(ValueError):
        r(8, -1)
    assert int(r(64, 2**64 - 1)) == 2**64 - 1


class TestCheckedAdd:
    def test_in_range(self):
        assert checked_add(r(8, 100), r(8, 27)) == r(8, 127)

    def test_identity(self):
        assert checked_add(r(8, 255), r(8, 0)) == r(8, 255)

    def test_overflow_carries_exact_sum(self):
        with pytest.raises(RegisterOverflowError) as info:
            checked_add(r(8, 200), r(8, 100))
        assert info.value.exact == 300
        assert isinstance(info.value, OverflowError)

    def test_width_mismatch(self):
        with pytest.raises(WidthMismatchError):
            checked_add(r(8, 1), r(16, 1))

    def test_error_set_exhaustive_n4(self):
        for a in range(16):
            for b in range(16):
                if a + b >= 16:
                    with pytest.raises(RegisterOverflowError):
                        checked_add(r(4, a), r(4, b))
                else:
                    assert checked_add(r(4, a), r(4, b)).value == a + b


class TestCheckedSub:
    def test_examples(self):
        assert checked_sub(r(8, 10), r(8, 3)) == r(8, 7)
        assert checked_sub(r(8, 5), r(8, 5)) == r(8, 0)
        with pytest.raises(RegisterUnderflowError):
            checked_sub(r(8, 3), r(8, 10))

    @given(register_pairs())
    def test_error_iff_subtrahend_larger(self, case):
        width, a, b = case
        if b > a:
            with pytest.raises(RegisterUnderflowError):
                checked_sub(r(width, a), r(width, b))
        else:
            assert checked_sub(r(width, a), r(width, b)).value == a - b


class TestShr:
    def test_examples(self):
        assert shr(r(8, 255), 3).value == 31
        assert shr(r(8, 77), 0).value == 77
        assert shr(r(8, 1), 8).value == 0

    def test_exhaustive_floor_division_u8(self):
        for a in range(256):
            for k in range(9):
                assert shr(r(8, a), k).value == a // 2**k

    @pytest.mark.parametrize("k", [-1, 9])
    def test_shift_range(self, k):
        with pytest.raises(ShiftRangeError):
            shr(r(8, 1), k)


class TestMulhi:
    def test_examples(self):
        assert mulhi(r(32, 0), r(32, 123456)).value == 0
        assert mulhi(r(4, 15), r(4, 15)).value == 14
        assert mulhi(r(32, 613566757), r(32, 4294967295)).value == 613566756

    @pytest.mark.parametrize("width", range(2, 9))
    def test_exhaustive_small_widths(self, width):
        for a in range(2**width):
            for b in range(2**width):
                assert mulhi(r(width, a), r(width, b)).value == high_word(a, b, width)

    @given(register_pairs(min_width=9))
    def test_sampled_wide(self, case):
        width, a, b = case
        assert mulhi(r(width, a), r(width, b)).value == high_word(a, b, width)


class TestProductBitWidth:
    def test_examples(self):
        assert product_bit_width(3, 3) == 4
        assert product_bit_width(0, 99) == 0
        assert product_bit_width(255, 255) == 16

    def test_bound_and_tightness_exhaustive(self):
        for m_bits in range(2, 7):
            for n_bits in range(2, 7):
                widest = max(product_bit_width(x, y)
                             for x in range(2**m_bits) for y in range(2**n_bits))
                assert widest == m_bits + n_bits
                assert product_bit_width(2**m_bits - 1, 2**n_bits - 1) == m_bits + n_bits

    @given(st.integers(0, 2**70), st.integers(0, 2**70))
    def test_minimal(self, x, y):
        b = product_bit_width(x, y)
        assert x * y < 2**b
        assert b == 0 or x * y >= 2 ** (b - 1)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            product_bit_width(-1, 3)
