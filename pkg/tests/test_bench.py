import numpy as np
import pytest

from magicdiv.bench import (
    FlavorError,
    accumulate,
    check_agreement,
    generate_workload,
    run_benchmark,
    time_divisions,
)
from magicdiv.magic import precompute_magic


def test_bounded_mask():
    w = generate_workload(8, 4, seed=1, bounded=True)
    assert len(w) == 4
    assert all(int(x) < 128 for x in w.dividends)


def test_deterministic():
    a = generate_workload(32, 1000, seed=3)
    b = generate_workload(32, 1000, seed=3)
    assert np.array_equal(a.dividends, b.dividends)
    assert not np.array_equal(a.dividends, generate_workload(32, 1000, seed=4).dividends)


def test_n64_spans_full_width():
    w = generate_workload(64, 10**6, seed=7)
    assert int(w.dividends.max()) >= 2**63


def test_length_must_be_positive():
    with pytest.raises(ValueError):
        generate_workload(8, 0, seed=1)


def test_identity_division_accumulates_dividends():
    w = generate_workload(32, 5000, seed=11)
    t = time_divisions(w, precompute_magic(32, 1), "general")
    assert t.accumulator == sum(int(x) for x in w.dividends) % 2**32
    assert len(t.repetitions) >= 5


def test_bounded_accumulator_matches_oracle():
    w = generate_workload(16, 5000, seed=2, bounded=True)
    t = time_divisions(w, precompute_magic(16, 7), "bounded")
    assert t.accumulator == sum(int(x) // 7 for x in w.dividends) % 2**16


def test_bounded_flavor_needs_bounded_workload():
    w = generate_workload(16, 10, seed=2)
    with pytest.raises(FlavorError):
        time_divisions(w, precompute_magic(16, 7), "bounded")


@pytest.mark.parametrize("width", [8, 33, 64])
def test_paths_accumulate_equally(width):
    w = generate_workload(width, 3000, seed=5, bounded=True)
    p = precompute_magic(width, 7)
    assert accumulate(w, p, "native") == accumulate(w, p, "general") == accumulate(w, p, "bounded")


def test_agreement_detects_bad_params():
    from magicdiv.magic import MagicParams
    from magicdiv.nbits import RegisterValue

    w = generate_workload(16, 1000, seed=1, bounded=True)
    good = precompute_magic(16, 7)
    assert check_agreement(w, good).passed
    bad = MagicParams(16, good.divisor, good.p, RegisterValue(16, good.m_lo - 1))
    result = check_agreement(w, bad)
    assert not result.passed and result.first is not None


def test_run_benchmark_small():
    report = run_benchmark(32, [3, 8], 2000, seed=1)
    assert report.gate_passed
    assert [row.d for row in report.rows] == [3, 8]
    assert report.rows[1].note == "shift-only"
    assert report.rows[0].general_ratio > 0
