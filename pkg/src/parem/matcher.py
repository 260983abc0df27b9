"""Sequential, speculative-parallel (PaREM) and enumeration DFA engines.

All three engines return the same :class:`MatchReport` for the same DFA, input
and mode.  The parallel engines split the input into ``p`` chunks, run every
chunk from a set of candidate start states in its own worker, digest each chunk
into a :class:`SegmentSummary` and then compose the summaries left to right.

PaREM picks the candidates for chunk ``i`` as ``R = S & L``: ``S`` holds the
states with a transition on the chunk's first character, ``L`` the states
reachable on the previous chunk's last character.  Candidates whose first step
lands in the same state share one route (``share_routes``), so only the
smallest of them is actually run.  The enumeration baseline runs every state.
"""

from __future__ import annotations

import enum
import functools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

from . import _kernels
from .automata import DEAD, FOREIGN, Dfa
from .errors import MissingRoute, SymbolNotInAlphabet

Text = Union[str, bytes, bytearray, memoryview, np.ndarray]

__all__ = [
    "MatchMode",
    "Chunk",
    "Route",
    "SegmentSummary",
    "MatchReport",
    "SpeculationStats",
    "chunk_input",
    "compute_S",
    "compute_L",
    "speculate_starts",
    "run_chunk",
    "share_first_step",
    "compose_summaries",
    "reduce_summaries",
    "run_sequential",
    "run_parem",
    "run_enum",
]


class MatchMode(enum.Enum):
    ACCEPT = "accept"
    COUNT = "count"


@dataclass(frozen=True)
class Chunk:
    index: int
    offset: int
    text: Text
    boundary_char: str | None = None

    def __len__(self) -> int:
        return len(self.text)


@dataclass(frozen=True)
class Route:
    start: int
    visited: tuple
    end: int
    hits: int
    dead: bool


@dataclass(frozen=True)
class SegmentSummary:
    """``start -> (end, hits, dead)`` for one stretch of input.

    ``entry_sources`` is the set of states that have a transition on the
    segment's first character, when the domain was narrowed by speculation.  A
    left-hand route ending outside the domain but also outside
    ``entry_sources`` dies on that first character; ending inside it means the
    speculation missed a state.
    """

    routes: Mapping[int, tuple]
    entry_sources: frozenset | None = None
    traces: tuple | None = field(default=None, compare=False, repr=False)

    @property
    def domain(self) -> frozenset:
        return frozenset(self.routes)

    @classmethod
    def identity(cls, state_count: int) -> "SegmentSummary":
        return cls({q: (q, 0, False) for q in range(state_count)})


@dataclass(frozen=True)
class MatchReport:
    mode: MatchMode
    accepted: bool
    count: int
    end_state: int | None


@dataclass(frozen=True)
class SpeculationStats:
    """Per-chunk speculation sets and route counts.

    Chunk 0 always starts from the initial state, so its ``S``/``L`` sizes are
    ``None`` and its ``R`` is the singleton initial state.  ``route_starts``
    are the states PaREM runs per chunk (``R`` minus shared routes) and
    ``total_routes_parem`` counts them, whichever engine produced the stats.
    """

    engine: str
    s_sizes: tuple
    l_sizes: tuple
    r_sets: tuple
    route_starts: tuple
    total_routes_parem: int
    total_routes_enum: int
    traces: tuple | None = field(default=None, compare=False, repr=False)

    @property
    def chunks(self) -> int:
        return len(self.r_sets)

    @property
    def r_sizes(self) -> tuple:
        return tuple(len(r) for r in self.r_sets)

    @property
    def routes_executed(self) -> int:
        return self.total_routes_parem if self.engine == "parem" else self.total_routes_enum


# -- input handling -----------------------------------------------------------


def _as_array(text: Text, dfa: Dfa) -> np.ndarray:
    if isinstance(text, np.ndarray):
        return np.ascontiguousarray(text, dtype=np.uint8)
    if isinstance(text, str):
        try:
            text = text.encode("latin-1")
        except UnicodeEncodeError as exc:
            head = np.frombuffer(text[: exc.start].encode("latin-1"), dtype=np.uint8)
            bad = _kernels.first_foreign(head, 0, len(head), dfa.symbol_mask)
            if bad >= 0:
                raise SymbolNotInAlphabet(chr(head[bad]), int(bad)) from None
            raise SymbolNotInAlphabet(text[exc.start], exc.start) from None
    return np.frombuffer(text, dtype=np.uint8)


def _symbol(char) -> str:
    return chr(char) if isinstance(char, (int, np.integer)) else char


def _chunk_bounds(n: int, p: int) -> list[tuple[int, int]]:
    if p < 1:
        raise ValueError(f"chunk count must be positive, got {p}")
    p = min(p, max(1, n))
    size = n // p
    bounds = [(i * size, (i + 1) * size) for i in range(p)]
    bounds[-1] = (bounds[-1][0], n)
    return bounds


def chunk_input(text: Text, p: int) -> list[Chunk]:
    """Split into ``min(p, len)`` equal chunks; the last one takes the remainder."""
    chunks = []
    for i, (lo, hi) in enumerate(_chunk_bounds(len(text), p)):
        boundary = None if i == 0 else _symbol(text[lo - 1])
        chunks.append(Chunk(i, lo, text[lo:hi], boundary))
    return chunks


# -- speculation --------------------------------------------------------------


def compute_S(dfa: Dfa, first_char) -> frozenset:
    column = dfa.table[:, dfa.column(_symbol(first_char))]
    return frozenset(np.flatnonzero(column != DEAD).tolist())


def compute_L(dfa: Dfa, prev_last_char) -> frozenset:
    column = dfa.table[:, dfa.column(_symbol(prev_last_char))]
    return frozenset(np.unique(column[column != DEAD]).tolist())


def _located(fn, dfa, char, position):
    try:
        return fn(dfa, char)
    except SymbolNotInAlphabet as exc:
        raise SymbolNotInAlphabet(exc.symbol, position) from None


def speculate_starts(dfa: Dfa, chunk: Chunk) -> frozenset:
    if chunk.index == 0:
        return frozenset({dfa.start})
    s = _located(compute_S, dfa, chunk.text[0], chunk.offset)
    l = _located(compute_L, dfa, chunk.boundary_char, chunk.offset - 1)
    return s & l


# -- route execution ----------------------------------------------------------


def _run_segment(dfa, data, lo, hi, starts, trace=False, shift=0):
    """Run ``data[lo:hi]`` from each start; returns ``(routes, traces)``."""
    table, finals = dfa.byte_table, dfa.final_mask
    routes: dict[int, tuple] = {}
    traces: list[Route] | None = [] if trace else None
    checked = lo  # every byte in data[lo:checked] is known to be in the alphabet
    for q in starts:
        if trace:
            buf = np.empty(hi - lo, dtype=np.int64)
            end, hits, stop, code = _kernels.walk_traced(data, lo, hi, table, finals, q, buf)
        else:
            end, hits, stop, code = _kernels.walk(data, lo, hi, table, finals, q)
        if code == FOREIGN:
            raise SymbolNotInAlphabet(chr(data[stop]), int(stop) + shift)
        dead = code == DEAD
        checked = max(checked, int(stop) + 1 if dead else hi)
        routes[int(q)] = (None if dead else int(end), int(hits), dead)
        if trace:
            visited = tuple(buf[: stop - lo].tolist())
            traces.append(Route(int(q), visited, int(end), int(hits), dead))
    if checked < hi:
        bad = _kernels.first_foreign(data, checked, hi, dfa.symbol_mask)
        if bad >= 0:
            raise SymbolNotInAlphabet(chr(data[bad]), int(bad) + shift)
    return routes, (tuple(traces) if trace else None)


def run_chunk(dfa: Dfa, chunk: Chunk, starts, trace: bool = False) -> SegmentSummary:
    data = _as_array(chunk.text, dfa)
    routes, traces = _run_segment(dfa, data, 0, len(data), sorted(starts), trace, shift=chunk.offset)
    return SegmentSummary(routes, traces=traces)


def compose_summaries(left: SegmentSummary, right: SegmentSummary) -> SegmentSummary:
    routes = {}
    for q, (end, hits, dead) in left.routes.items():
        if dead:
            routes[q] = (None, hits, True)
        elif end in right.routes:
            end2, hits2, dead2 = right.routes[end]
            routes[q] = (end2, hits + hits2, dead2)
        elif right.entry_sources is not None and end not in right.entry_sources:
            routes[q] = (None, hits, True)
        else:
            raise MissingRoute(f"route from {q} ends in {end}, which the next segment never explored")
    return SegmentSummary(routes, left.entry_sources)


def reduce_summaries(summaries: Sequence[SegmentSummary], how: str = "tree") -> SegmentSummary:
    if not summaries:
        raise ValueError("nothing to reduce")
    if how == "fold":
        return functools.reduce(compose_summaries, summaries)
    if how != "tree":
        raise ValueError(f"unknown reduction {how!r}")
    level = list(summaries)
    while len(level) > 1:
        paired = [compose_summaries(level[i], level[i + 1]) for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            paired.append(level[-1])
        level = paired
    return level[0]


def _report(dfa: Dfa, mode: MatchMode, end, hits, dead) -> MatchReport:
    end_state = None if dead else int(end)
    accepted = end_state is not None and end_state in dfa.finals
    return MatchReport(mode, accepted, int(hits), end_state)


# -- engines ------------------------------------------------------------------


def run_sequential(dfa: Dfa, text: Text, mode: MatchMode = MatchMode.COUNT) -> MatchReport:
    data = _as_array(text, dfa)
    routes, _ = _run_segment(dfa, data, 0, len(data), [dfa.start])
    return _report(dfa, mode, *routes[dfa.start])


def share_first_step(dfa: Dfa, starts, first_char) -> dict[int, int]:
    """Map each start to the smallest start whose first step reaches the same state.

    Routes that agree after one character agree on the whole chunk, so only the
    representatives need to be run.
    """
    column = dfa.table[:, dfa.column(_symbol(first_char))]
    leader: dict[int, int] = {}
    shared = {}
    for q in sorted(starts):
        shared[q] = leader.setdefault(int(column[q]), q)
    return shared


@dataclass
class _ChunkOutcome:
    s: frozenset | None
    l: frozenset | None
    r: frozenset
    parem_starts: frozenset
    summary: SegmentSummary


def _chunk_task(dfa, data, lo, hi, index, enumerate_all, share_routes, trace):
    if index == 0:
        s = l = None
        r = parem_starts = frozenset({dfa.start})
        shared: dict[int, int] = {}
    else:
        s = _located(compute_S, dfa, int(data[lo]), lo)
        l = _located(compute_L, dfa, int(data[lo - 1]), lo - 1)
        r = s & l
        shared = share_first_step(dfa, r, int(data[lo])) if share_routes else {q: q for q in r}
        parem_starts = frozenset(shared.values())
    if enumerate_all and index:
        routes, traces = _run_segment(dfa, data, lo, hi, range(dfa.state_count), trace)
        return _ChunkOutcome(s, l, r, parem_starts, SegmentSummary(routes, None, traces))
    routes, traces = _run_segment(dfa, data, lo, hi, sorted(parem_starts), trace)
    for q, leader in shared.items():
        routes[q] = routes[leader]
    routes = dict(sorted(routes.items()))
    return _ChunkOutcome(s, l, r, parem_starts, SegmentSummary(routes, s, traces))


def _run_chunked(dfa, text, p, mode, engine, workers, trace, reduction, share_routes=True):
    data = _as_array(text, dfa)
    bounds = _chunk_bounds(len(data), p)
    enumerate_all = engine == "enum"
    tasks = [(dfa, data, lo, hi, i, enumerate_all, share_routes, trace) for i, (lo, hi) in enumerate(bounds)]
    workers = min(len(tasks), workers or os.cpu_count() or 1)

    outcomes: list = []
    errors: list[SymbolNotInAlphabet] = []
    if workers == 1:
        for task in tasks:
            try:
                outcomes.append(_chunk_task(*task))
            except SymbolNotInAlphabet as exc:
                errors.append(exc)
                break
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_chunk_task, *task) for task in tasks]
            # barrier: wait for the slowest chunk
            for future in futures:
                try:
                    outcomes.append(future.result())
                except SymbolNotInAlphabet as exc:
                    errors.append(exc)
    if errors:
        raise min(errors, key=lambda e: e.position)

    q = dfa.state_count
    chunks = len(bounds)
    stats = SpeculationStats(
        engine=engine,
        s_sizes=tuple(None if o.s is None else len(o.s) for o in outcomes),
        l_sizes=tuple(None if o.l is None else len(o.l) for o in outcomes),
        r_sets=tuple(o.r for o in outcomes),
        route_starts=tuple(o.parem_starts for o in outcomes),
        total_routes_parem=sum(len(o.parem_starts) for o in outcomes),
        total_routes_enum=(chunks - 1) * q + 1,
        traces=tuple(o.summary.traces for o in outcomes) if trace else None,
    )
    total = reduce_summaries([o.summary for o in outcomes], reduction)
    return _report(dfa, mode, *total.routes[dfa.start]), stats


def run_parem(
    dfa: Dfa,
    text: Text,
    p: int,
    mode: MatchMode = MatchMode.COUNT,
    *,
    workers: int | None = None,
    trace: bool = False,
    reduction: str = "tree",
    share_routes: bool = True,
) -> tuple[MatchReport, SpeculationStats]:
    """Speculative parallel match over ``p`` chunks using up to ``workers`` threads.

    ``p`` is clamped to the input length.  With ``trace`` the per-chunk
    :class:`Route` objects are kept in ``stats.traces``; ``reduction`` is
    ``"tree"`` or ``"fold"`` and never changes the result.
    """
    return _run_chunked(dfa, text, p, mode, "parem", workers, trace, reduction, share_routes)


def run_enum(
    dfa: Dfa,
    text: Text,
    p: int,
    mode: MatchMode = MatchMode.COUNT,
    *,
    workers: int | None = None,
    trace: bool = False,
    reduction: str = "tree",
) -> tuple[MatchReport, SpeculationStats]:
    """Baseline: every chunk after the first is run from all states."""
    return _run_chunked(dfa, text, p, mode, "enum", workers, trace, reduction)
