"""Machine checks for the magic-number division method.

:func:`run_sweep` compares both runtime sequences against native integer
division over a planned set of ``(d, n)`` pairs and records every mismatch
and every checked-register event. The ``check_*`` functions verify the
supporting lemmas exhaustively with exact integer comparisons only.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from magicdiv import batch
from magicdiv.magic import (
    DomainError,
    InvariantError,
    ceil_log2,
    divide_bounded,
    divide_bounded_batch,
    divide_general,
    divide_general_batch,
    full_magic,
    is_power_of_two,
    precompute_magic,
)
from magicdiv.nbits import (
    RegisterUnderflowError,
    RegisterValue,
    check_width,
    mulhi,
    product_bit_width,
)

STRATEGIES = ("exhaustive", "boundary", "sample")
PRNG_ALGORITHM = "numpy.PCG64(SeedSequence(seed, spawn_key=(d,)))"
THREADS_ENV = "MAGICDIV_THREADS"
MAX_EXHAUSTIVE_LEMMA_WIDTH = 16


class PlanError(ValueError):
    pass


@dataclass(frozen=True)
class SweepPlan:
    """Which divisors to test and how to pick dividends for each one.

    ``divisors`` is a ``range`` for an interval or a tuple for an explicit
    list. ``sample_count`` and ``seed`` are used by the ``sample`` strategy.
    """

    width: int
    divisors: range | tuple[int, ...]
    strategy: str = "exhaustive"
    sample_count: int = 0
    seed: Optional[int] = None

    def __post_init__(self):
        check_width(self.width)
        if not isinstance(self.divisors, range):
            object.__setattr__(self, "divisors", tuple(int(d) for d in self.divisors))
        if len(self.divisors) == 0:
            raise PlanError("divisor range is empty")
        top = (1 << self.width) - 1
        if min(self.divisors) < 1 or max(self.divisors) > top:
            raise PlanError(f"divisors must lie in [1, {top}]")
        if self.strategy not in STRATEGIES:
            raise PlanError(f"unknown dividend strategy {self.strategy!r}")
        if self.strategy == "sample":
            if self.seed is None or not 0 <= self.seed < 2**64:
                raise PlanError("sampled sweeps need an explicit 64-bit seed")
            if self.sample_count < 1:
                raise PlanError("sample count must be positive")

    def dividends(self, d: int) -> np.ndarray:
        """Sorted, de-duplicated dividends planned for divisor ``d``."""
        n_bits = self.width
        if self.strategy == "exhaustive":
            return np.arange(1 << n_bits, dtype=np.uint64)
        if self.strategy == "boundary":
            return np.array(sorted(boundary_dividends(n_bits, d)), dtype=np.uint64)
        seq = np.random.SeedSequence(self.seed, spawn_key=(d,))
        rng = np.random.Generator(np.random.PCG64(seq))
        raw = rng.integers(0, 2**64, size=self.sample_count, dtype=np.uint64)
        return np.unique(raw & batch.width_mask(n_bits))

    def to_dict(self) -> dict:
        if isinstance(self.divisors, range):
            divisors = {"lo": str(self.divisors.start), "hi": str(self.divisors.stop - 1)}
        else:
            divisors = [str(d) for d in self.divisors]
        out = {"width": self.width, "divisors": divisors, "strategy": self.strategy}
        if self.strategy == "sample":
            out.update(sample_count=self.sample_count, seed=str(self.seed),
                       prng=PRNG_ALGORITHM)
        return out


def boundary_dividends(width: int, d: int) -> set[int]:
    """Dividends at the tight spots: ``0, 1``, around ``d``, around ``2**(N-1)``,
    ``2**N - 1``, and one past/before the two largest multiples of ``d``."""
    top = (1 << width) - 1
    half = 1 << (width - 1)
    points = {0, 1, d - 1, d, d + 1, half - 1, half, top}
    k = top // d
    for j in (k - 1, k):
        for delta in (-1, 0, 1):
            points.add(j * d + delta)
    return {n for n in points if 0 <= n <= top}


@dataclass(frozen=True, order=True)
class Mismatch:
    d: int
    n: int
    algorithm: str
    expected: int
    got: int


@dataclass(frozen=True, order=True)
class OverflowEvent:
    d: int
    n: int
    algorithm: str
    step: str
    value: int


@dataclass(frozen=True)
class LemmaFailure:
    lemma: str
    witness: dict


@dataclass
class VerificationReport:
    name: str
    width: int
    plan: Optional[SweepPlan] = None
    cases_run: int = 0
    mismatches: list[Mismatch] = field(default_factory=list)
    overflow_events: list[OverflowEvent] = field(default_factory=list)
    lemma_failures: list[LemmaFailure] = field(default_factory=list)
    details: dict = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not (self.mismatches or self.overflow_events or self.lemma_failures)

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def events_for(self, algorithm: str) -> list[OverflowEvent]:
        return [e for e in self.overflow_events if e.algorithm == algorithm]

    def to_dict(self, include_elapsed: bool = True) -> dict:
        out = {
            "name": self.name,
            "verdict": self.verdict,
            "width": self.width,
            "plan": self.plan.to_dict() if self.plan else None,
            "cases_run": self.cases_run,
            "mismatches": [
                {"algorithm": m.algorithm, "d": str(m.d), "n": str(m.n),
                 "expected": str(m.expected), "got": str(m.got)}
                for m in self.mismatches
            ],
            "overflow_events": [
                {"algorithm": e.algorithm, "step": e.step, "d": str(e.d),
                 "n": str(e.n), "value": str(e.value)}
                for e in self.overflow_events
            ],
            "lemma_failures": [
                {"lemma": f.lemma, "witness": _stringify(f.witness)}
                for f in self.lemma_failures
            ],
            "details": _stringify(self.details),
        }
        if include_elapsed:
            out["elapsed_s"] = round(self.elapsed, 6)
        return out


def _stringify(obj):
    # decimal strings for every integer; JSON numbers lose precision above 2**53
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, float)):
        return obj
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _stringify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [_stringify(v) for v in items]
    return str(obj)


def oracle_divide(d: RegisterValue, n: RegisterValue) -> RegisterValue:
    """Ground truth ``floor(n / d)`` from the platform's integer division."""
    if d.value == 0:
        raise DomainError("divisor must be non-zero")
    if d.width != n.width:
        raise ValueError("divisor and dividend widths differ")
    return RegisterValue(n.width, n.value // d.value)


# -- sweeps ------------------------------------------------------------------


def thread_count(requested: Optional[int] = None) -> int:
    if requested is None:
        raw = os.environ.get(THREADS_ENV, "").strip()
        requested = int(raw) if raw else 0
    if requested <= 0:
        requested = os.cpu_count() or 1
    return requested


@dataclass
class _Partial:
    cases: int = 0
    bounded_cases: int = 0
    mismatches: list = field(default_factory=list)
    events: list = field(default_factory=list)
    naive_overflows: int = 0
    naive_overflow_divisors: int = 0


def _sweep_divisor_batch(plan: SweepPlan, d: int, acc: _Partial) -> None:
    n_bits = plan.width
    params = precompute_magic(n_bits, d)
    ns = plan.dividends(d)
    expected = ns // np.uint64(d)
    acc.cases += ns.size

    got, events = divide_general_batch(params, ns)
    _collect(acc, d, ns, expected, got, events, "general", params)

    bounded = ns[ns < np.uint64(1 << (n_bits - 1))]
    acc.bounded_cases += bounded.size
    if bounded.size:
        got_b, events_b = divide_bounded_batch(params, bounded)
        _collect(acc, d, bounded, bounded // np.uint64(d), got_b, events_b, "bounded", params)

    # how often the naive single-add form would overflow on this divisor
    q = batch.mulhi(np.uint64(params.m_lo), ns, n_bits)
    _, naive = batch.checked_add(ns, q, n_bits)
    hits = int(np.count_nonzero(naive))
    acc.naive_overflows += hits
    acc.naive_overflow_divisors += hits > 0


def _collect(acc, d, ns, expected, got, events, algorithm, params) -> None:
    for i in np.flatnonzero(got != expected):
        acc.mismatches.append(Mismatch(d, int(ns[i]), algorithm, int(expected[i]), int(got[i])))
    for step, bad in events.items():
        for i in np.flatnonzero(bad):
            n = int(ns[i])
            acc.events.append(OverflowEvent(d, n, algorithm, step,
                                            _exact_step_value(params, n, step)))


def _exact_step_value(params, n: int, step: str) -> int:
    q = (params.m_lo * n) >> params.width
    if step == batch.STEP_GENERAL_SUB:
        return n - q
    if step == batch.STEP_GENERAL_ADD:
        return ((n - q) >> min(params.p, 1)) + q
    return n + q


def _sweep_divisor_scalar(plan: SweepPlan, d: int, acc: _Partial) -> None:
    # one checked RegisterValue computation per case; slow, for cross-checks
    n_bits = plan.width
    params = precompute_magic(n_bits, d)
    divisor = RegisterValue(n_bits, d)
    half = 1 << (n_bits - 1)
    hits = 0
    for raw in plan.dividends(d).tolist():
        n = RegisterValue(n_bits, raw)
        expected = oracle_divide(divisor, n).value
        acc.cases += 1
        for algorithm, fn in (("general", divide_general), ("bounded", divide_bounded)):
            if algorithm == "bounded":
                if raw >= half:
                    continue
                acc.bounded_cases += 1
            try:
                got = fn(params, n).value
            except InvariantError as exc:
                if algorithm == "bounded":
                    step = batch.STEP_BOUNDED_ADD
                elif isinstance(exc.__cause__, RegisterUnderflowError):
                    step = batch.STEP_GENERAL_SUB
                else:
                    step = batch.STEP_GENERAL_ADD
                acc.events.append(OverflowEvent(d, raw, algorithm, step,
                                                _exact_step_value(params, raw, step)))
                continue
            if got != expected:
                acc.mismatches.append(Mismatch(d, raw, algorithm, expected, got))
        q = mulhi(params.magic_lo, n).value
        hits += (raw + q) >> n_bits
    acc.naive_overflows += hits
    acc.naive_overflow_divisors += hits > 0


def run_sweep(plan: SweepPlan, threads: Optional[int] = None,
              engine: str = "batch") -> VerificationReport:
    """Run both division paths over ``plan`` and compare against the oracle.

    ``engine="batch"`` uses the vectorised register model; ``"scalar"`` runs
    one :class:`RegisterValue` computation per case. Divisors are split
    across threads, and the merged lists are sorted so the report does not
    depend on scheduling.
    """
    if engine not in ("batch", "scalar"):
        raise ValueError(f"unknown engine {engine!r}")
    worker = _sweep_divisor_batch if engine == "batch" else _sweep_divisor_scalar
    start = time.perf_counter()
    divisors = list(plan.divisors)
    n_threads = min(thread_count(threads), len(divisors))
    chunks = [divisors[i::n_threads] for i in range(n_threads)]

    def run_chunk(chunk):
        acc = _Partial()
        for d in chunk:
            worker(plan, d, acc)
        return acc

    if n_threads == 1:
        partials = [run_chunk(chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            partials = list(pool.map(run_chunk, chunks))

    report = VerificationReport(name="sweep", width=plan.width, plan=plan)
    for part in partials:
        report.cases_run += part.cases
        report.mismatches.extend(part.mismatches)
        report.overflow_events.extend(part.events)
    report.mismatches.sort()
    report.overflow_events.sort()
    report.details = {
        "engine": engine,
        "bounded_cases_run": sum(p.bounded_cases for p in partials),
        "naive_addition_overflows": sum(p.naive_overflows for p in partials),
        "divisors_with_naive_overflow": sum(p.naive_overflow_divisors for p in partials),
    }
    report.elapsed = time.perf_counter() - start
    return report


# -- overflow witnesses --------------------------------------------------------


@dataclass(frozen=True)
class OverflowWitness:
    """A dividend for which the single-add form ``n + q`` leaves N bits."""

    width: int
    divisor: RegisterValue
    dividend: RegisterValue
    n_plus_q: int

    def revalidate(self) -> bool:
        m = full_magic(self.width, self.divisor)
        m_lo = m - (1 << self.width)
        n = self.dividend.value
        exact = n + (m_lo * n >> self.width)
        return exact == self.n_plus_q and exact >= 1 << self.width


def find_addition_overflow_witness(width: int, d: RegisterValue | int,
                                   search_budget: int) -> Optional[OverflowWitness]:
    """Scan ``n`` downward from ``2**N - 1`` for at most ``search_budget`` values
    and return the first one where ``n + mulhi(m_lo, n)`` needs ``N + 1`` bits."""
    params = precompute_magic(width, d)
    if params.m_lo == 0:
        return None  # q is always 0, so n + q = n fits
    top = (1 << width) - 1
    for n in range(top, max(top - search_budget, -1), -1):
        dividend = RegisterValue(width, n)
        total = n + mulhi(params.magic_lo, dividend).value
        if total >> width:
            return OverflowWitness(width, params.divisor, dividend, total)
    return None


# -- lemma checks ----------------------------------------------------------


def _divisor_list(width: int, divisors: Optional[Iterable[int]]) -> Sequence[int]:
    if divisors is None:
        return range(1, 1 << width)
    divisors = divisors if isinstance(divisors, range) else list(divisors)
    if len(divisors) == 0:
        raise PlanError("divisor range is empty")
    if min(divisors) < 1 or max(divisors) >= 1 << width:
        raise PlanError(f"divisors must lie in [1, {(1 << width) - 1}]")
    return divisors


def _require_exhaustive_width(width: int) -> None:
    check_width(width)
    if width > MAX_EXHAUSTIVE_LEMMA_WIDTH:
        raise PlanError(f"exhaustive lemma checks are limited to width <= "
                        f"{MAX_EXHAUSTIVE_LEMMA_WIDTH}")


def check_lemma_ratio(width: int) -> VerificationReport:
    """``2**ceil(log2 u) / u <= 2**N / (2**(N-1) + 1)`` for every non-zero
    N-bit ``u``, with equality only at ``u = 2**(N-1) + 1``.

    Checked cross-multiplied, so every comparison is between integers.
    """
    _require_exhaustive_width(width)
    start = time.perf_counter()
    report = VerificationReport(name="lemma-ratio", width=width)
    bound_den = (1 << (width - 1)) + 1
    bound_num = 1 << width
    equality = []
    for u in range(1, 1 << width):
        lhs = (1 << ceil_log2(RegisterValue(width, u))) * bound_den
        rhs = bound_num * u
        if lhs > rhs:
            report.lemma_failures.append(LemmaFailure("ratio", {"u": u}))
        elif lhs == rhs:
            equality.append(u)
    report.cases_run = (1 << width) - 1
    if equality != [bound_den]:
        report.lemma_failures.append(
            LemmaFailure("ratio-equality", {"expected": [bound_den], "found": equality}))
    report.details = {"equality_set": equality}
    report.elapsed = time.perf_counter() - start
    return report


def check_lemma_33bits(width: int, divisors: Optional[Iterable[int]] = None) -> VerificationReport:
    """The full magic number has exactly ``N + 1`` bits for each divisor.

    Also checks the two consequences used by the runtime: ``m_lo = m - 2**N``,
    and ``m_lo = 0`` for power-of-two divisors.
    """
    check_width(width)
    divisors = _divisor_list(width, divisors)
    start = time.perf_counter()
    report = VerificationReport(name="lemma-33bits", width=width)
    lo, hi = 1 << width, 1 << (width + 1)
    smallest, largest = None, None
    magic = {}
    for d in divisors:
        dv = RegisterValue(width, d)
        m = full_magic(width, dv)
        if not lo <= m < hi:
            report.lemma_failures.append(LemmaFailure("33bits", {"d": d, "m": m}))
        m_lo = precompute_magic(width, dv).m_lo
        if m_lo != m - lo:
            report.lemma_failures.append(LemmaFailure("m_lo", {"d": d, "m": m, "m_lo": m_lo}))
        if is_power_of_two(dv) and m_lo != 0:
            report.lemma_failures.append(LemmaFailure("pow2", {"d": d, "m_lo": m_lo}))
        smallest = m if smallest is None else min(smallest, m)
        largest = m if largest is None else max(largest, m)
        if len(divisors) <= 64:
            magic[d] = m
    report.cases_run = len(divisors)
    report.details = {"min_magic": smallest, "max_magic": largest}
    if magic:
        report.details["magic"] = magic
    report.elapsed = time.perf_counter() - start
    return report


def check_lemma5_residual(width: int, divisors: Optional[Iterable[int]] = None) -> VerificationReport:
    """``m * d == 2**k + e`` with ``0 <= e < d``, where ``k = N + p`` and
    ``e = d - 1 - ((2**k - 1) mod d)``."""
    check_width(width)
    divisors = _divisor_list(width, divisors)
    start = time.perf_counter()
    report = VerificationReport(name="lemma5-residual", width=width)
    residuals = {}
    for d in divisors:
        dv = RegisterValue(width, d)
        k = width + ceil_log2(dv)
        e = d - 1 - (((1 << k) - 1) % d)
        m = full_magic(width, dv)
        if not 0 <= e < d or m * d != (1 << k) + e:
            report.lemma_failures.append(LemmaFailure("lemma5", {"d": d, "k": k, "e": e, "m": m}))
        if len(divisors) <= 64:
            residuals[d] = e
    report.cases_run = len(divisors)
    if residuals:
        report.details = {"residuals": residuals}
    report.elapsed = time.perf_counter() - start
    return report


def check_product_width(max_width: int) -> VerificationReport:
    """For all ``M, N`` in ``[2, max_width]``, every M-bit by N-bit product fits in
    ``M + N`` bits and ``(2**M - 1) * (2**N - 1)`` needs all of them."""
    if not 2 <= max_width <= 8:
        raise PlanError("check_product_width is exhaustive; max_width must be in [2, 8]")
    start = time.perf_counter()
    report = VerificationReport(name="product-width", width=max_width)
    cases = 0
    for m_bits in range(2, max_width + 1):
        for n_bits in range(2, max_width + 1):
            limit = m_bits + n_bits
            ys = range(1 << n_bits)
            for x in range(1 << m_bits):
                widest = max(product_bit_width(x, y) for y in ys)
                if widest > limit:
                    y = next(y for y in ys if product_bit_width(x, y) > limit)
                    report.lemma_failures.append(LemmaFailure(
                        "product-bound", {"M": m_bits, "N": n_bits, "x": x, "y": y}))
            cases += (1 << m_bits) * (1 << n_bits)
            x_max, y_max = (1 << m_bits) - 1, (1 << n_bits) - 1
            if product_bit_width(x_max, y_max) != limit:
                report.lemma_failures.append(LemmaFailure(
                    "product-tight", {"M": m_bits, "N": n_bits, "x": x_max, "y": y_max}))
    report.cases_run = cases
    report.elapsed = time.perf_counter() - start
    return report
