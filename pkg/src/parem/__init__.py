"""Regex-to-DFA compilation and speculative parallel DFA matching."""

from .automata import (
    DEAD,
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
from .matcher import (
    MatchMode,
    MatchReport,
    SpeculationStats,
    run_enum,
    run_parem,
    run_sequential,
)
from .regex_frontend import parse, parse_pattern, tokenize

__version__ = "0.1.0"
