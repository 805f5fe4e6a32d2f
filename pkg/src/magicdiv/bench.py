"""Workload generation and timing for the division benchmarks.

Timed loops run the unchecked array kernels from :mod:`magicdiv.batch`,
chunked so a 10**7-element workload does not blow up the limb temporaries.
Quotients are summed (wrapping) into an accumulator, which doubles as the
agreement check between paths.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from magicdiv import batch
from magicdiv.magic import MagicParams, is_power_of_two, precompute_magic
from magicdiv.nbits import check_width

CHUNK = 1 << 18
MIN_REPEATS = 5
FLAVORS = ("native", "general", "bounded")


class FlavorError(ValueError):
    pass


@dataclass(frozen=True)
class Workload:
    width: int
    dividends: np.ndarray = field(repr=False)
    seed: int
    bounded: bool

    def __len__(self) -> int:
        return len(self.dividends)


def generate_workload(width: int, length: int, seed: int, bounded: bool = False) -> Workload:
    """Seeded ``uint64`` stream masked to ``width`` bits (``width - 1`` if bounded)."""
    check_width(width)
    if length < 1:
        raise ValueError("workload length must be at least 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    raw = rng.integers(0, 2**64, size=length, dtype=np.uint64)
    bits = width - 1 if bounded else width
    values = raw & batch.width_mask(bits)
    values.setflags(write=False)
    return Workload(width, values, seed, bounded)


def _kernel(flavor: str, params: MagicParams):
    d = np.uint64(params.d)
    if flavor == "native":
        return lambda n: n // d
    if flavor == "general":
        return lambda n: batch.general_kernel(params.m_lo, params.p, params.width, n)
    if flavor == "bounded":
        return lambda n: batch.bounded_kernel(params.m_lo, params.p, params.width, n)
    raise FlavorError(f"unknown flavor {flavor!r}")


def accumulate(workload: Workload, params: MagicParams, flavor: str) -> int:
    """Sum of all quotients mod ``2**N``, computed by the chosen path."""
    if flavor == "bounded" and not workload.bounded:
        raise FlavorError("bounded flavor needs a bounded workload")
    fn = _kernel(flavor, params)
    acc = 0
    values = workload.dividends
    for start in range(0, len(values), CHUNK):
        # array reductions wrap mod 2**64 silently; 2**N divides 2**64
        acc += int(fn(values[start:start + CHUNK]).sum(dtype=np.uint64))
    return acc & ((1 << workload.width) - 1)


@dataclass(frozen=True)
class Timing:
    flavor: str
    ns_per_op: float
    repetitions: tuple[float, ...]
    accumulator: int


def time_divisions(workload: Workload, params: MagicParams, flavor: str,
                   repeats: int = MIN_REPEATS) -> Timing:
    """Median ns/op over at least five sequential passes."""
    if workload.width != params.width:
        raise ValueError("workload and params widths differ")
    repeats = max(repeats, MIN_REPEATS)
    samples = []
    acc = 0
    for _ in range(repeats):
        start = time.perf_counter_ns()
        acc = accumulate(workload, params, flavor)
        samples.append((time.perf_counter_ns() - start) / len(workload))
    return Timing(flavor, statistics.median(samples), tuple(samples), acc)


@dataclass(frozen=True)
class AgreementResult:
    passed: bool
    disagreements: int
    first: tuple[int, int, int] | None = None  # (n, expected, got)


def check_agreement(workload: Workload, params: MagicParams) -> AgreementResult:
    """Element-wise comparison of every applicable path against native division.

    Runs before any timing: a fast wrong answer is not worth measuring.
    """
    d = np.uint64(params.d)
    bad = 0
    first = None
    flavors = ("general", "bounded") if workload.bounded else ("general",)
    values = workload.dividends
    for start in range(0, len(values), CHUNK):
        chunk = values[start:start + CHUNK]
        expected = chunk // d
        for flavor in flavors:
            got = _kernel(flavor, params)(chunk)
            wrong = np.flatnonzero(got != expected)
            bad += wrong.size
            if wrong.size and first is None:
                i = wrong[0]
                first = (int(chunk[i]), int(expected[i]), int(got[i]))
    return AgreementResult(bad == 0, bad, first)


@dataclass
class BenchRow:
    d: int
    note: str
    native: Timing
    general: Timing
    bounded: Timing
    native_bounded: Timing

    @property
    def general_ratio(self) -> float:
        return self.general.ns_per_op / self.native.ns_per_op

    @property
    def bounded_ratio(self) -> float:
        return self.bounded.ns_per_op / self.native_bounded.ns_per_op


@dataclass
class BenchReport:
    width: int
    iterations: int
    seed: int
    gate_passed: bool
    gate: dict[int, tuple[AgreementResult, AgreementResult]]
    rows: list[BenchRow]


def run_benchmark(width: int, divisors: list[int], iterations: int, seed: int,
                  repeats: int = MIN_REPEATS) -> BenchReport:
    """Agreement gate over every divisor, then timings if (and only if) it passes."""
    full = generate_workload(width, iterations, seed, bounded=False)
    half = generate_workload(width, iterations, seed, bounded=True)
    params = {d: precompute_magic(width, d) for d in divisors}
    gate = {d: (check_agreement(full, p), check_agreement(half, p)) for d, p in params.items()}
    passed = all(a.passed and b.passed for a, b in gate.values())
    rows = []
    if passed:
        for d, p in params.items():
            rows.append(BenchRow(
                d=d,
                note="shift-only" if is_power_of_two(p.divisor) else "",
                native=time_divisions(full, p, "native", repeats),
                general=time_divisions(full, p, "general", repeats),
                bounded=time_divisions(half, p, "bounded", repeats),
                native_bounded=time_divisions(half, p, "native", repeats),
            ))
    return BenchReport(width, iterations, seed, passed, gate, rows)
