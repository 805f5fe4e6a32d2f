import pytest
from hypothesis import given, strategies as st

from magicdiv.codegen import (
    BOUNDED_PRECONDITION,
    execute_snippet,
    hex_word,
    magic_table,
    parse_table,
    render_snippet,
    table_to_csv,
    table_to_json,
)
from magicdiv.magic import divide_bounded, divide_general, precompute_magic
from magicdiv.nbits import RegisterOverflowError


def test_hex_padding():
    assert hex_word(0, 32) == "0x00000000"
    assert hex_word(86, 8) == "0x56"
    assert hex_word(1, 5) == "0x01"
    assert hex_word(2**64 - 1, 64) == "0x" + "f" * 16


def test_general_snippet_text():
    snippet = render_snippet(precompute_magic(32, 7), "general")
    assert snippet.header_comment == "// N=32 d=7 p=3 m_lo=613566757 (0x24924925)"
    assert snippet.lines == (
        "q = mulhi(0x24924925, n);",
        "h = min(3, 1);",
        "t = (n - q) >> h;",
        "t = t + q;",
        "t = t >> (3 - h);",
        "return t;",
    )


def test_bounded_header_states_precondition():
    snippet = render_snippet(precompute_magic(16, 10), "bounded")
    assert BOUNDED_PRECONDITION in snippet.header_comment
    assert "requires n < 2^(N-1)" in snippet.header_comment


def test_shift_only_needs_power_of_two():
    assert render_snippet(precompute_magic(16, 64), "shift-only").lines[0] == "t = n >> 6;"
    with pytest.raises(ValueError):
        render_snippet(precompute_magic(16, 10), "shift-only")
    with pytest.raises(ValueError):
        render_snippet(precompute_magic(16, 10), "fancy")


@given(st.data())
def test_general_snippet_fidelity(data):
    width = data.draw(st.integers(2, 64))
    d = data.draw(st.integers(1, 2**width - 1))
    params = precompute_magic(width, d)
    snippet = render_snippet(params, "general")
    for n in data.draw(st.lists(st.integers(0, 2**width - 1), min_size=1, max_size=5)):
        assert execute_snippet(snippet, n) == divide_general(params, n).value


@given(st.data())
def test_bounded_snippet_fidelity(data):
    width = data.draw(st.integers(2, 64))
    d = data.draw(st.integers(1, 2**width - 1))
    params = precompute_magic(width, d)
    snippet = render_snippet(params, "bounded")
    n = data.draw(st.integers(0, 2 ** (width - 1) - 1))
    assert execute_snippet(snippet, n) == divide_bounded(params, n).value


def test_bounded_snippet_overflows_on_checked_registers():
    snippet = render_snippet(precompute_magic(32, 7), "bounded")
    with pytest.raises(RegisterOverflowError):
        execute_snippet(snippet, 2**32 - 1)


def test_execute_raw_text():
    text = "q = mulhi(0x56, n);\nt = (n + q) >> 2;\nreturn t;\n"
    assert execute_snippet(text, 100, width=8) == 33
    with pytest.raises(ValueError):
        execute_snippet(text, 100)
    with pytest.raises(SyntaxError):
        execute_snippet("t = n * 3;\nreturn t;", 1, width=8)


def test_table_rows_n8():
    rows = magic_table(8, range(1, 5))
    assert [(r.d, r.p, r.m_lo, r.pow2) for r in rows] == [
        (1, 0, 0, True), (2, 1, 0, True), (3, 2, 86, False), (4, 2, 0, True)]
    assert rows[2].m_full == 342
    csv_text = table_to_csv(rows)
    assert csv_text.splitlines()[0] == "d,p,m_lo_dec,m_lo_hex,pow2,m_full"
    assert csv_text.splitlines()[3] == "3,2,86,0x56,0,342"


@pytest.mark.parametrize("width, divisors", [(8, range(1, 256)), (64, [3, 7, 2**63, 2**64 - 1])])
def test_table_round_trip(width, divisors):
    rows = magic_table(width, divisors)
    expected = [precompute_magic(width, d) for d in divisors]
    assert parse_table(table_to_csv(rows), width) == expected
    assert parse_table(table_to_json(width, rows), width) == expected
