"""Reproducible input generation and the engine timing harness."""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .automata import Dfa
from .errors import PlantOverflow, ResultMismatch
from .matcher import MatchMode, MatchReport, run_enum, run_parem, run_sequential

ENGINES = ("seq", "parem", "enum")


def gen_input(
    length: int,
    alphabet: str,
    seed: int,
    plant: tuple[str, int] | None = None,
) -> bytes:
    """Uniform random text over ``alphabet``, optionally with ``plant = (literal,
    occurrences)`` non-overlapping copies written over it at random positions."""
    if not alphabet:
        raise ValueError("alphabet must not be empty")
    if length < 0:
        raise ValueError("length must be non-negative")
    rng = np.random.default_rng(seed)
    symbols = np.frombuffer(alphabet.encode("latin-1"), dtype=np.uint8)
    data = symbols[rng.integers(0, len(symbols), size=length)]
    if plant is not None:
        literal, occurrences = plant
        width = len(literal)
        if width == 0 or occurrences < 0:
            raise ValueError("planting needs a non-empty literal and a non-negative count")
        if occurrences * width > length:
            raise PlantOverflow(f"{occurrences} copies of {literal!r} do not fit in {length} characters")
        if occurrences:
            # k sorted distinct picks from n - k*w + k slots, spread by w - 1 each,
            # give k non-overlapping windows of width w
            slots = length - occurrences * width + occurrences
            picks = np.sort(rng.choice(slots, size=occurrences, replace=False))
            positions = picks + np.arange(occurrences) * (width - 1)
            word = np.frombuffer(literal.encode("latin-1"), dtype=np.uint8)
            for pos in positions.tolist():
                data[pos:pos + width] = word
    return data.tobytes()


@dataclass
class BenchConfig:
    engines: tuple = ENGINES
    threads: tuple = (1, 2, 4)
    lengths: tuple = (1_000_000,)
    repetitions: int = 20
    seed: int = 0
    mode: MatchMode = MatchMode.COUNT
    out: Path | None = None
    plant: tuple | None = None

    def __post_init__(self):
        self.engines = tuple(self.engines)
        self.threads = tuple(int(t) for t in self.threads)
        self.lengths = tuple(int(n) for n in self.lengths)
        unknown = set(self.engines) - set(ENGINES)
        if unknown:
            raise ValueError(f"unknown engines: {sorted(unknown)}")
        if not self.engines or not self.threads or not self.lengths:
            raise ValueError("engines, thread counts and lengths must be non-empty")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        if min(self.threads) < 1 or min(self.lengths) < 1:
            raise ValueError("thread counts and lengths must be positive")


@dataclass(frozen=True)
class BenchRow:
    engine: str
    threads: int
    input_length: int
    mean_ms: float
    stddev_ms: float
    min_ms: float
    speedup_vs_seq: float
    routes_total: int
    match_count: int


CSV_HEADER = [f.name for f in fields(BenchRow)]


def time_runs(fn: Callable[[], object], repetitions: int) -> tuple[list[float], object]:
    """One discarded warm-up call, then ``repetitions`` timed calls (milliseconds)."""
    result = fn()
    times = []
    for _ in range(repetitions):
        t0 = time.perf_counter()
        result = fn()
        times.append((time.perf_counter() - t0) * 1e3)
    return times, result


def _match_count(report: MatchReport) -> int:
    return report.count if report.mode is MatchMode.COUNT else int(report.accepted)


def run_bench(
    dfa: Dfa,
    config: BenchConfig,
    progress: Callable[[BenchRow], None] | None = None,
) -> list[BenchRow]:
    rows: list[BenchRow] = []
    reps, mode = config.repetitions, config.mode
    for length in config.lengths:
        text = gen_input(length, "".join(dfa.alphabet), config.seed, config.plant)
        data = np.frombuffer(text, dtype=np.uint8)
        # sequential baseline; it ignores the thread count
        seq_times, seq_report = time_runs(lambda: run_sequential(dfa, data, mode), reps)
        seq_mean = statistics.fmean(seq_times)
        for engine in config.engines:
            for threads in config.threads:
                if engine == "seq":
                    times, report, routes = seq_times, seq_report, 1
                else:
                    runner = run_parem if engine == "parem" else run_enum
                    times, (report, stats) = time_runs(
                        lambda: runner(dfa, data, threads, mode, workers=threads), reps
                    )
                    routes = stats.routes_executed
                if report != seq_report:
                    raise ResultMismatch(
                        f"{engine}@{threads} threads reported {report}, sequential reported {seq_report}"
                    )
                mean = statistics.fmean(times)
                row = BenchRow(
                    engine=engine,
                    threads=threads,
                    input_length=length,
                    mean_ms=mean,
                    stddev_ms=statistics.stdev(times) if len(times) > 1 else 0.0,
                    min_ms=min(times),
                    speedup_vs_seq=seq_mean / mean if mean > 0 else float("inf"),
                    routes_total=routes,
                    match_count=_match_count(report),
                )
                rows.append(row)
                if progress is not None:
                    progress(row)
    return rows


def write_csv(rows: Sequence[BenchRow], target) -> None:
    """Write rows to a path or an open text stream."""
    if hasattr(target, "write"):
        _write_rows(rows, target)
        return
    with open(target, "w", newline="") as fh:
        _write_rows(rows, fh)


def _write_rows(rows, fh) -> None:
    writer = csv.DictWriter(fh, fieldnames=CSV_HEADER, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(asdict(row))


def read_csv(path) -> list[BenchRow]:
    with open(path, newline="") as fh:
        out = []
        for rec in csv.DictReader(fh):
            out.append(
                BenchRow(
                    engine=rec["engine"],
                    threads=int(rec["threads"]),
                    input_length=int(rec["input_length"]),
                    mean_ms=float(rec["mean_ms"]),
                    stddev_ms=float(rec["stddev_ms"]),
                    min_ms=float(rec["min_ms"]),
                    speedup_vs_seq=float(rec["speedup_vs_seq"]),
                    routes_total=int(rec["routes_total"]),
                    match_count=int(rec["match_count"]),
                )
            )
        return out
