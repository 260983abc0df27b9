"""NFA/DFA types, regex-to-DFA construction and the transition-table file format."""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AutomatonError,
    InvariantViolation,
    LiteralNotInAlphabet,
    StateExplosion,
    SymbolNotInAlphabet,
    TableParseError,
)
from .regex_frontend import (
    Concat,
    Literal,
    Optional,
    Plus,
    Range,
    RegexAst,
    Star,
    Union,
    parse_pattern,
    pattern_alphabet,
)

EPSILON = None
DEAD = -1
# byte_table marker for bytes that are not in the alphabet at all
FOREIGN = -2

DEFAULT_MAX_DFA_STATES = 1_000_000
MAX_STATES_ENV = "PAREM_MAX_DFA_STATES"


def default_state_cap() -> int:
    value = os.environ.get(MAX_STATES_ENV)
    return int(value) if value else DEFAULT_MAX_DFA_STATES


# -- NFA ----------------------------------------------------------------------


@dataclass(frozen=True)
class Nfa:
    """Epsilon-NFA with a single start and a single accept state.

    ``transitions`` holds ``(src, label, dst)`` triples, ``label`` being a
    one-character string or ``EPSILON``.
    """

    state_count: int
    transitions: tuple
    start: int
    accept: int

    def __post_init__(self):
        object.__setattr__(self, "transitions", tuple(self.transitions))
        n = self.state_count
        if not (0 <= self.start < n and 0 <= self.accept < n):
            raise InvariantViolation("start/accept state out of range")
        for src, label, dst in self.transitions:
            if not (0 <= src < n and 0 <= dst < n):
                raise InvariantViolation(f"transition {src}->{dst} leaves the state range")
            if label is not EPSILON and len(label) != 1:
                raise InvariantViolation(f"label {label!r} is not a single character")

    @property
    def epsilon_count(self) -> int:
        return sum(1 for _, label, _ in self.transitions if label is EPSILON)

    @property
    def labels(self) -> set[str]:
        return {label for _, label, _ in self.transitions if label is not EPSILON}

    @cached_property
    def _adjacency(self):
        eps: list[list[int]] = [[] for _ in range(self.state_count)]
        moves: list[dict[str, list[int]]] = [{} for _ in range(self.state_count)]
        for src, label, dst in self.transitions:
            if label is EPSILON:
                eps[src].append(dst)
            else:
                moves[src].setdefault(label, []).append(dst)
        return eps, moves

    def closure(self, states: Iterable[int]) -> frozenset[int]:
        eps, _ = self._adjacency
        seen = set(states)
        queue = deque(seen)
        while queue:
            for nxt in eps[queue.popleft()]:
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return frozenset(seen)

    def step(self, states: Iterable[int], symbol: str) -> frozenset[int]:
        """Closure of the states reachable from ``states`` on ``symbol``."""
        _, moves = self._adjacency
        targets = [dst for q in states for dst in moves[q].get(symbol, ())]
        return self.closure(targets)


class _ThompsonBuilder:
    def __init__(self):
        self.count = 0
        self.edges: list[tuple] = []

    def new_state(self) -> int:
        self.count += 1
        return self.count - 1

    def edge(self, src, label, dst):
        self.edges.append((src, label, dst))

    def symbol(self, ch: str) -> tuple[int, int]:
        s, f = self.new_state(), self.new_state()
        self.edge(s, ch, f)
        return s, f

    def alternatives(self, fragments) -> tuple[int, int]:
        s, f = self.new_state(), self.new_state()
        for cs, cf in fragments:
            self.edge(s, EPSILON, cs)
            self.edge(cf, EPSILON, f)
        return s, f

    def build(self, node: RegexAst) -> tuple[int, int]:
        # depth-first: children are built before their parent's gadget
        if isinstance(node, Literal):
            return self.symbol(node.symbol)
        if isinstance(node, Range):
            return self.alternatives([self.symbol(ch) for ch in node.symbols()])
        if isinstance(node, Union):
            return self.alternatives([self.build(c) for c in node.children])
        if isinstance(node, Concat):
            start, end = self.build(node.children[0])
            for child in node.children[1:]:
                cs, cf = self.build(child)
                self.edge(end, EPSILON, cs)
                end = cf
            return start, end
        inner_s, inner_f = self.build(node.child)
        s, f = self.new_state(), self.new_state()
        self.edge(s, EPSILON, inner_s)
        self.edge(inner_f, EPSILON, f)
        if isinstance(node, (Star, Optional)):
            self.edge(s, EPSILON, f)
        if isinstance(node, (Star, Plus)):
            self.edge(inner_f, EPSILON, inner_s)
        return s, f


def thompson_nfa(ast: RegexAst) -> Nfa:
    builder = _ThompsonBuilder()
    start, accept = builder.build(ast)
    return Nfa(builder.count, tuple(builder.edges), start, accept)


def simplify_nfa(nfa: Nfa) -> Nfa:
    """Contract epsilon edges u->v where u has no other way out and v no other way in."""
    edges = list(nfa.transitions)
    start, accept = nfa.start, nfa.accept
    while True:
        out_deg: dict[int, int] = {}
        in_deg: dict[int, int] = {}
        for src, _, dst in edges:
            out_deg[src] = out_deg.get(src, 0) + 1
            in_deg[dst] = in_deg.get(dst, 0) + 1
        victim = next(
            (
                e for e in edges
                if e[1] is EPSILON and e[0] != e[2] and out_deg[e[0]] == 1 and in_deg[e[2]] == 1
            ),
            None,
        )
        if victim is None:
            break
        u, _, v = victim
        edges.remove(victim)
        edges = [(u if s == v else s, label, u if d == v else d) for s, label, d in edges]
        if start == v:
            start = u
        if accept == v:
            accept = u

    alive = sorted({s for s, _, _ in edges} | {d for _, _, d in edges} | {start, accept})
    renumber = {old: new for new, old in enumerate(alive)}
    return Nfa(
        len(alive),
        tuple((renumber[s], label, renumber[d]) for s, label, d in edges),
        renumber[start],
        renumber[accept],
    )


def nfa_simulate(nfa: Nfa, text: str) -> bool:
    current = nfa.closure([nfa.start])
    for ch in text:
        if not current:
            return False
        current = nfa.step(current, ch)
    return nfa.accept in current


# -- DFA ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Dfa:
    """Dense transition-table DFA; missing transitions hold ``DEAD``."""

    state_count: int
    alphabet: tuple
    table: np.ndarray
    start: int
    finals: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        alphabet = tuple(self.alphabet)
        table = np.array(self.table, dtype=np.int32, copy=True).reshape(self.state_count, len(alphabet))
        table.flags.writeable = False
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "finals", frozenset(int(q) for q in self.finals))
        n = self.state_count
        if n < 1:
            raise InvariantViolation("a DFA needs at least one state")
        if len(set(alphabet)) != len(alphabet):
            raise InvariantViolation("alphabet has duplicate symbols")
        for symbol in alphabet:
            if not isinstance(symbol, str) or len(symbol) != 1 or ord(symbol) > 255:
                raise InvariantViolation(f"symbol {symbol!r} is not a single-byte character")
        if not 0 <= self.start < n:
            raise InvariantViolation(f"start state {self.start} out of range")
        bad = [q for q in self.finals if not 0 <= q < n]
        if bad:
            raise InvariantViolation(f"final state {bad[0]} out of range")
        if table.size and (table.min() < DEAD or table.max() >= n):
            raise InvariantViolation("transition table entry out of range")

    def __eq__(self, other):
        if not isinstance(other, Dfa):
            return NotImplemented
        return (
            self.state_count == other.state_count
            and self.alphabet == other.alphabet
            and self.start == other.start
            and self.finals == other.finals
            and np.array_equal(self.table, other.table)
        )

    def __hash__(self):
        return hash((self.state_count, self.alphabet, self.start, self.finals, self.table.tobytes()))

    def __repr__(self):
        return (
            f"Dfa(states={self.state_count}, alphabet={''.join(self.alphabet)!r}, "
            f"start={self.start}, finals={sorted(self.finals)})"
        )

    @property
    def complete(self) -> bool:
        return not bool((self.table == DEAD).any())

    @cached_property
    def _columns(self) -> dict[str, int]:
        return {symbol: i for i, symbol in enumerate(self.alphabet)}

    def column(self, symbol: str) -> int:
        try:
            return self._columns[symbol]
        except KeyError:
            raise SymbolNotInAlphabet(symbol) from None

    def delta(self, state: int, symbol: str) -> int | None:
        dest = int(self.table[state, self.column(symbol)])
        return None if dest == DEAD else dest

    @cached_property
    def byte_table(self) -> np.ndarray:
        """Flattened ``state * 256 + byte`` lookup holding ``dest * 256``, ``DEAD``,
        or ``FOREIGN`` for bytes outside the alphabet."""
        if self.state_count * 256 > np.iinfo(np.int32).max:
            raise InvariantViolation(f"{self.state_count} states is too many for the byte lookup table")
        wide = np.full((self.state_count, 256), FOREIGN, dtype=np.int32)
        for col, symbol in enumerate(self.alphabet):
            column = self.table[:, col].astype(np.int64)
            wide[:, ord(symbol)] = np.where(column >= 0, column * 256, column)
        flat = wide.reshape(-1)
        flat.flags.writeable = False
        return flat

    @cached_property
    def final_mask(self) -> np.ndarray:
        mask = np.zeros(self.state_count, dtype=np.uint8)
        mask[list(self.finals)] = 1
        mask.flags.writeable = False
        return mask

    @cached_property
    def symbol_mask(self) -> np.ndarray:
        mask = np.zeros(256, dtype=np.uint8)
        mask[[ord(s) for s in self.alphabet]] = 1
        mask.flags.writeable = False
        return mask


def subset_construct(nfa: Nfa, alphabet: Sequence[str] | None = None, max_states: int | None = None) -> Dfa:
    """Determinize ``nfa``; states are numbered in breadth-first discovery order.

    ``alphabet`` fixes the column order and defaults to the sorted NFA labels.
    """
    cap = default_state_cap() if max_states is None else max_states
    symbols = tuple(sorted(nfa.labels) if alphabet is None else alphabet)
    first = nfa.closure([nfa.start])
    ids = {first: 0}
    order = [first]
    rows: list[list[int]] = []
    queue = deque([first])
    while queue:
        current = queue.popleft()
        row = []
        for symbol in symbols:
            target = nfa.step(current, symbol)
            if not target:
                row.append(DEAD)
                continue
            if target not in ids:
                if len(ids) >= cap:
                    raise StateExplosion(cap)
                ids[target] = len(ids)
                order.append(target)
                queue.append(target)
            row.append(ids[target])
        rows.append(row)
    finals = {i for i, subset in enumerate(order) if nfa.accept in subset}
    table = np.array(rows, dtype=np.int32).reshape(len(order), len(symbols))
    return Dfa(len(order), symbols, table, 0, frozenset(finals))


def compile_regex(pattern: str, max_states: int | None = None) -> Dfa:
    ast = parse_pattern(pattern)
    nfa = simplify_nfa(thompson_nfa(ast))
    return subset_construct(nfa, pattern_alphabet(ast), max_states)


def build_search_dfa(literal: str, alphabet: Sequence[str]) -> Dfa:
    """Complete DFA for ``alphabet* literal``: state k = length of the longest
    suffix of the consumed input that is also a prefix of ``literal``."""
    if not literal:
        raise AutomatonError("search literal must be non-empty")
    symbols = tuple(alphabet)
    col = {s: i for i, s in enumerate(symbols)}
    missing = sorted(set(literal) - set(col))
    if missing:
        raise LiteralNotInAlphabet(f"literal symbols {''.join(missing)!r} are not in the alphabet")
    m = len(literal)
    table = np.zeros((m + 1, len(symbols)), dtype=np.int32)
    table[0, col[literal[0]]] = 1
    fallback = 0
    for j in range(1, m + 1):
        table[j] = table[fallback]
        if j < m:
            table[j, col[literal[j]]] = j + 1
            fallback = int(table[fallback, col[literal[j]]])
    return Dfa(m + 1, symbols, table, 0, frozenset({m}))


# -- text formats -------------------------------------------------------------


def export_dfa_table(dfa: Dfa) -> str:
    for symbol in dfa.alphabet:
        if symbol in "\t\n\r":
            raise InvariantViolation(f"symbol {symbol!r} cannot be written to a table file")
    lines = [
        "\t".join(["symbols", *dfa.alphabet]),
        f"start\t{dfa.start}",
        "\t".join(["finals", *(str(q) for q in sorted(dfa.finals))]),
    ]
    for q in range(dfa.state_count):
        cells = ("-" if d == DEAD else str(d) for d in dfa.table[q].tolist())
        lines.append("\t".join([str(q), *cells]))
    return "\n".join(lines) + "\n"


def _int(token: str, line: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise TableParseError(f"{what} {token!r} is not an integer", line) from None


def load_dfa_table(text: str) -> Dfa:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) < 4:
        raise TableParseError("expected symbols, start, finals and at least one state row", len(lines) + 1)

    header = lines[0].split("\t")
    if header[0] != "symbols":
        raise TableParseError("first line must start with 'symbols'", 1)
    alphabet = header[1:]
    for symbol in alphabet:
        if len(symbol) != 1:
            raise TableParseError(f"symbol {symbol!r} is not a single character", 1)

    start_fields = lines[1].split("\t")
    if start_fields[0] != "start" or len(start_fields) != 2:
        raise TableParseError("second line must be 'start<TAB><id>'", 2)
    start = _int(start_fields[1], 2, "start state")

    final_fields = lines[2].split("\t")
    if final_fields[0] != "finals":
        raise TableParseError("third line must start with 'finals'", 3)
    finals = [_int(tok, 3, "final state") for tok in final_fields[1:]]

    rows = []
    for offset, line in enumerate(lines[3:]):
        lineno = offset + 4
        cells = line.split("\t")
        if _int(cells[0], lineno, "state id") != offset:
            raise TableParseError(f"expected row for state {offset}", lineno)
        if len(cells) != len(alphabet) + 1:
            raise TableParseError(f"expected {len(alphabet)} transitions, found {len(cells) - 1}", lineno)
        rows.append([DEAD if c == "-" else _int(c, lineno, "destination") for c in cells[1:]])

    n = len(rows)
    table = np.array(rows, dtype=np.int32).reshape(n, len(alphabet))
    try:
        return Dfa(n, tuple(alphabet), table, start, frozenset(finals))
    except InvariantViolation:
        raise
    except AutomatonError as exc:  # pragma: no cover - Dfa only raises InvariantViolation
        raise InvariantViolation(str(exc)) from exc


def _dot_label(symbol: str) -> str:
    return symbol.replace("\\", "\\\\").replace('"', '\\"')


def export_dot(dfa: Dfa) -> str:
    out = ["digraph dfa {", "  rankdir=LR;"]
    for q in range(dfa.state_count):
        shape = "doublecircle" if q in dfa.finals else "circle"
        style = ", style=bold" if q == dfa.start else ""
        out.append(f"  {q} [shape={shape}{style}];")
    for q in range(dfa.state_count):
        for col, dest in enumerate(dfa.table[q].tolist()):
            if dest != DEAD:
                out.append(f'  {q} -> {dest} [label="{_dot_label(dfa.alphabet[col])}"];')
    out.append("}")
    return "\n".join(out) + "\n"
