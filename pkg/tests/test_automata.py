import numpy as np
import pytest
from hypothesis import given, strategies as st

from parem.automata import (
    DEAD,
    EPSILON,
    Dfa,
    Nfa,
    build_search_dfa,
    compile_regex,
    export_dfa_table,
    export_dot,
    load_dfa_table,
    nfa_simulate,
    simplify_nfa,
    subset_construct,
    thompson_nfa,
)
from parem.errors import (
    InvariantViolation,
    LiteralNotInAlphabet,
    StateExplosion,
    SymbolNotInAlphabet,
    TableParseError,
)
from parem.regex_frontend import Concat, Literal, Plus, Star, Union, parse_pattern, pattern_alphabet, to_pattern

from .conftest import PARALLEL_TABLE
from .oracles import all_strings, dfa_language, longest_prefix_suffix, nfa_language
from .strategies import dfas, random_ast, random_dfa

FIG4 = "(a|b)?c*[0..3]b+"


# -- Thompson construction ----------------------------------------------------


def test_literal_gadget():
    nfa = thompson_nfa(Literal("a"))
    assert nfa.state_count == 2
    assert nfa.transitions == ((nfa.start, "a", nfa.accept),)


def test_star_gadget_shape():
    nfa = thompson_nfa(Star(Literal("a")))
    eps = {(s, d) for s, label, d in nfa.transitions if label is EPSILON}
    (inner_s, _, inner_f), = [t for t in nfa.transitions if t[1] == "a"]
    assert (nfa.start, nfa.accept) in eps
    assert (inner_f, inner_s) in eps
    assert (nfa.start, inner_s) in eps and (inner_f, nfa.accept) in eps


def test_plus_language_equals_a_then_a_star():
    plus = thompson_nfa(Plus(Literal("a")))
    spelled = thompson_nfa(Concat((Literal("a"), Star(Literal("a")))))
    for s in all_strings("a", 4):
        assert nfa_simulate(plus, s) == nfa_simulate(spelled, s)


def test_union_gadget_accepts_either_branch():
    nfa = thompson_nfa(Union((Literal("a"), Literal("b"))))
    assert {s for s in all_strings("ab", 3) if nfa_simulate(nfa, s)} == {"a", "b"}


def test_nfa_rejects_bad_endpoints():
    with pytest.raises(InvariantViolation):
        Nfa(2, ((0, "a", 2),), 0, 1)


# -- simulation ---------------------------------------------------------------


@pytest.mark.parametrize(
    "pattern, text, expected",
    [("a*", "", True), ("a*", "aaa", True), ("a+", "", False), ("a+", "aa", True), ("a?", "aa", False)],
)
def test_nfa_simulate(pattern, text, expected):
    assert nfa_simulate(thompson_nfa(parse_pattern(pattern)), text) is expected


def test_nfa_simulate_foreign_symbol_rejects():
    assert not nfa_simulate(thompson_nfa(parse_pattern("a*")), "ab")


# -- epsilon simplification ---------------------------------------------------


def test_simplify_without_epsilons_is_identity():
    nfa = Nfa(3, ((0, "a", 1), (1, "b", 2)), 0, 2)
    assert simplify_nfa(nfa) == nfa


def test_simplify_concatenation_to_chain():
    simple = simplify_nfa(thompson_nfa(parse_pattern("ab")))
    assert simple.state_count == 3
    assert simple.epsilon_count == 0
    assert sorted(label for _, label, _ in simple.transitions) == ["a", "b"]
    assert nfa_simulate(simple, "ab") and not nfa_simulate(simple, "a")


def test_simplify_figure_pattern_preserves_language():
    raw = thompson_nfa(parse_pattern(FIG4))
    simple = simplify_nfa(raw)
    assert simple.state_count <= raw.state_count
    assert simple.epsilon_count < raw.epsilon_count
    for s in all_strings("abc0123", 5):
        assert nfa_simulate(simple, s) == nfa_simulate(raw, s), s


def test_simplify_preserves_language_on_random_patterns():
    rng = np.random.default_rng(11)
    for _ in range(150):
        ast = random_ast(rng, 4, "abc")
        raw = thompson_nfa(ast)
        simple = simplify_nfa(raw)
        assert simple.state_count <= raw.state_count
        assert simple.epsilon_count <= raw.epsilon_count
        assert nfa_language(simple, "abc", 5) == nfa_language(raw, "abc", 5)


# -- subset construction ------------------------------------------------------


def test_subset_single_literal():
    dfa = subset_construct(thompson_nfa(Literal("a")))
    assert dfa.state_count == 2
    assert dfa.delta(0, "a") == 1 and dfa.delta(1, "a") is None
    assert dfa.finals == {1}
    assert dfa.table[1, 0] == DEAD


def test_subset_union_language():
    nfa = thompson_nfa(Union((Literal("a"), Literal("b"))))
    dfa = subset_construct(nfa)
    assert dfa_language(dfa, "ab", 3) == {"a", "b"}


def test_subset_mixed_pattern_agrees_with_nfa():
    dfa = compile_regex(FIG4)
    nfa = thompson_nfa(parse_pattern(FIG4))
    assert dfa.alphabet == tuple("abc0123")
    accepted = dfa_language(dfa, "abc0123", 5)
    for s in all_strings("abc0123", 5):
        assert (s in accepted) == nfa_simulate(nfa, s), s


def test_subset_state_zero_is_start_closure_and_bfs_numbered():
    dfa = compile_regex("ab|ac")
    assert dfa.start == 0
    # breadth-first: state 1 is the target of the first column from state 0
    assert dfa.delta(0, "a") == 1


def test_state_explosion_cap():
    # (a|b)*a(a|b)^k needs at least 2^(k+1) DFA states
    pattern = "(a|b)*a" + "(a|b)" * 6
    with pytest.raises(StateExplosion):
        compile_regex(pattern, max_states=50)
    assert compile_regex(pattern, max_states=1000).state_count >= 128


def test_state_cap_from_environment(monkeypatch):
    monkeypatch.setenv("PAREM_MAX_DFA_STATES", "4")
    with pytest.raises(StateExplosion):
        compile_regex("(a|b)*a(a|b)(a|b)")


def test_pipeline_soundness_random():
    rng = np.random.default_rng(5)
    for _ in range(200):
        ast = random_ast(rng, 4, "abcd"[: int(rng.integers(1, 5))])
        alphabet = pattern_alphabet(ast)
        nfa = thompson_nfa(ast)
        dfa = subset_construct(simplify_nfa(nfa), alphabet)
        assert dfa_language(dfa, alphabet, 5) == nfa_language(nfa, alphabet, 5)


@given(st.sampled_from("0123456789abcdefgh"), st.sampled_from("0123456789abcdefgh"))
def test_range_expansion_equivalence(x, y):
    lo, hi = sorted((x, y))
    spelled = "|".join(to_pattern(Literal(chr(c))) for c in range(ord(lo), ord(hi) + 1))
    ranged = thompson_nfa(parse_pattern(f"[{lo}..{hi}]"))
    union = thompson_nfa(parse_pattern(spelled))
    probe = [chr(c) for c in range(ord("0") - 1, ord("h") + 2)]
    assert nfa_language(ranged, probe, 2) == nfa_language(union, probe, 2)


# -- search automaton ---------------------------------------------------------


def test_search_dfa_reproduces_table_one(parallel_dfa):
    assert parallel_dfa.alphabet == tuple("parel")
    assert parallel_dfa.table.tolist() == PARALLEL_TABLE
    assert parallel_dfa.start == 0 and parallel_dfa.finals == {8}
    assert parallel_dfa.delta(5, "l") == 6
    assert parallel_dfa.delta(6, "e") == 7
    assert parallel_dfa.delta(7, "l") == 8
    assert all(parallel_dfa.delta(k, "p") == 1 for k in range(9))


def test_search_dfa_unary():
    dfa = build_search_dfa("a", ["a"])
    assert dfa.state_count == 2
    assert dfa.table.tolist() == [[1], [1]]
    assert dfa.finals == {1}


def test_search_dfa_failure_links_by_brute_force():
    dfa = build_search_dfa("aba", ["a", "b"])
    assert dfa.delta(3, "b") == 2
    for s in all_strings("ab", 6):
        q = dfa.start
        for ch in s:
            q = dfa.delta(q, ch)
        assert q == longest_prefix_suffix(s, "aba"), s


@given(st.text(alphabet="abc", min_size=1, max_size=7))
def test_search_dfa_is_complete_with_len_plus_one_states(word):
    dfa = build_search_dfa(word, list("abc"))
    assert dfa.complete
    assert dfa.state_count == len(word) + 1


def test_search_dfa_errors():
    with pytest.raises(LiteralNotInAlphabet):
        build_search_dfa("parallel", list("par"))


# -- Dfa type -----------------------------------------------------------------


def test_dfa_invariants():
    with pytest.raises(InvariantViolation):
        Dfa(2, ("a", "a"), [[0, 0], [0, 0]], 0, set())
    with pytest.raises(InvariantViolation):
        Dfa(2, ("a",), [[0], [1]], 2, set())
    with pytest.raises(InvariantViolation):
        Dfa(2, ("a",), [[0], [1]], 0, {5})
    with pytest.raises(InvariantViolation):
        Dfa(2, ("a",), [[0], [7]], 0, set())


def test_dfa_column_lookup_error(parallel_dfa):
    with pytest.raises(SymbolNotInAlphabet):
        parallel_dfa.column("x")


def test_dfa_table_is_read_only(parallel_dfa):
    with pytest.raises(ValueError):
        parallel_dfa.table[0, 0] = 3


# -- serialization ------------------------------------------------------------


def test_export_table_one_layout(parallel_dfa):
    lines = export_dfa_table(parallel_dfa).splitlines()
    assert lines[0] == "symbols\tp\ta\tr\te\tl"
    assert lines[1] == "start\t0"
    assert lines[2] == "finals\t8"
    assert len(lines) == 3 + 9
    assert lines[3 + 7] == "7\t1\t0\t0\t0\t8"


def test_empty_alphabet_round_trip():
    dfa = Dfa(1, (), np.zeros((1, 0), dtype=np.int32), 0, {0})
    text = export_dfa_table(dfa)
    assert text.splitlines()[0] == "symbols"
    assert load_dfa_table(text) == dfa


def test_random_large_round_trip():
    rng = np.random.default_rng(50)
    table = rng.integers(0, 50, size=(50, 10))
    table[rng.random((50, 10)) < 0.3] = DEAD
    dfa = Dfa(50, tuple("0123456789"), table, 3, {1, 7, 49})
    back = load_dfa_table(export_dfa_table(dfa))
    assert back == dfa
    assert export_dfa_table(back) == export_dfa_table(dfa)


@given(dfas(max_states=10, max_symbols=5))
def test_round_trip_property(dfa):
    assert load_dfa_table(export_dfa_table(dfa)) == dfa


def test_dead_entries_are_dashes():
    dfa = Dfa(2, ("a", "b"), [[1, DEAD], [DEAD, DEAD]], 0, set())
    assert export_dfa_table(dfa).splitlines()[2:] == ["finals", "0\t1\t-", "1\t-\t-"]


@pytest.mark.parametrize(
    "text, line",
    [
        ("sym\ta\nstart\t0\nfinals\n0\t0\n", 1),
        ("symbols\ta\nstart\tx\nfinals\n0\t0\n", 2),
        ("symbols\ta\nstart\t0\nfin\n0\t0\n", 3),
        ("symbols\ta\nstart\t0\nfinals\n0\t0\t0\n", 4),
        ("symbols\ta\nstart\t0\nfinals\n0\t0\n2\t0\n", 5),
        ("symbols\ta\nstart\t0\nfinals\n0\tq\n", 4),
        ("symbols\ta\nstart\t0\n", 3),
    ],
)
def test_load_parse_errors_carry_line(text, line):
    with pytest.raises(TableParseError) as info:
        load_dfa_table(text)
    assert info.value.line == line


def test_load_invariant_violation():
    with pytest.raises(InvariantViolation):
        load_dfa_table("symbols\ta\nstart\t0\nfinals\t4\n0\t0\n")
    with pytest.raises(InvariantViolation):
        load_dfa_table("symbols\ta\nstart\t0\nfinals\n0\t3\n")


# -- DOT ----------------------------------------------------------------------


def _dot_counts(dot):
    lines = dot.splitlines()
    nodes = [l for l in lines if "shape=" in l]
    edges = [l for l in lines if "->" in l]
    return nodes, edges


def test_dot_table_one(parallel_dfa):
    nodes, edges = _dot_counts(export_dot(parallel_dfa))
    assert len(nodes) == 9 and len(edges) == 45
    assert [n for n in nodes if "doublecircle" in n] == ["  8 [shape=doublecircle];"]


def test_dot_single_state():
    dfa = Dfa(1, ("a",), [[DEAD]], 0, set())
    nodes, edges = _dot_counts(export_dot(dfa))
    assert len(nodes) == 1 and not edges


def test_dot_stable_across_table_round_trip():
    dfa = random_dfa(np.random.default_rng(3), dead_fraction=0.2)
    assert export_dot(load_dfa_table(export_dfa_table(dfa))) == export_dot(dfa)
