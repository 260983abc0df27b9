"""``parem`` command line: compile, match, gen, bench.

Exit codes: 0 ok, 1 I/O failure, 2 bad input or validation error, 3 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from .automata import (
    MAX_STATES_ENV,
    Dfa,
    build_search_dfa,
    compile_regex,
    export_dfa_table,
    export_dot,
    load_dfa_table,
)
from .bench import BenchConfig, gen_input, run_bench, write_csv
from .errors import MissingRoute, ParemError, ResultMismatch
from .matcher import MatchMode, run_enum, run_parem, run_sequential

EXIT_IO, EXIT_INPUT, EXIT_INTERNAL = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    # accepts 1e6-style values for lengths
    return [int(float(tok)) for tok in text.split(",") if tok.strip()]


def _add_dfa_source(p: argparse.ArgumentParser, required: bool) -> None:
    group = p.add_mutually_exclusive_group(required=required)
    group.add_argument("--dfa", type=Path, help="transition-table file")
    group.add_argument("--regex", help="pattern to compile")
    group.add_argument("--literal", help="word to search for (needs --alphabet)")
    p.add_argument("--alphabet", help="alphabet for --literal, e.g. 'parel'")
    p.add_argument("--max-dfa-states", type=int, help=f"subset-construction cap (env {MAX_STATES_ENV})")


def _load_dfa(args, default_literal: tuple[str, str] | None = None) -> Dfa:
    if args.dfa is not None:
        return load_dfa_table(args.dfa.read_text(encoding="utf-8"))
    if args.regex is not None:
        return compile_regex(args.regex, args.max_dfa_states)
    literal, alphabet = args.literal, args.alphabet
    if literal is None and default_literal is not None:
        literal, alphabet = default_literal
    if alphabet is None:
        raise ValueError("--literal needs --alphabet")
    return build_search_dfa(literal, list(alphabet))


def cmd_compile(args) -> int:
    if args.literal is None and args.alphabet is not None:
        raise ValueError("--alphabet is only valid with --literal")
    dfa = _load_dfa(args)
    table = export_dfa_table(dfa)
    print(f"states: {dfa.state_count}")
    print(f"alphabet: {''.join(dfa.alphabet)}")
    print(f"complete: {'true' if dfa.complete else 'false'}")
    if args.out is not None:
        args.out.write_text(table, encoding="utf-8")
        print(f"table: {args.out}")
    else:
        sys.stdout.write(table)
    if args.dot is not None:
        dot_path = args.dot if args.dot != "-" else None
        if dot_path is None and args.out is not None:
            dot_path = args.out.with_suffix(".dot")
        if dot_path is None:
            sys.stdout.write(export_dot(dfa))
        else:
            Path(dot_path).write_text(export_dot(dfa), encoding="utf-8")
            print(f"dot: {dot_path}")
    return 0


def cmd_match(args) -> int:
    dfa = _load_dfa(args)
    data = np.frombuffer(args.input.read_bytes(), dtype=np.uint8)
    mode = MatchMode(args.mode)
    threads = args.threads or os.cpu_count() or 1
    run_sequential(dfa, data[:0], mode)  # loads the compiled kernels outside the timed region
    t0 = time.perf_counter()
    if args.engine == "seq":
        report, routes = run_sequential(dfa, data, mode), 1
    else:
        runner = run_parem if args.engine == "parem" else run_enum
        report, stats = runner(dfa, data, threads, mode, workers=threads)
        routes = stats.routes_executed
    elapsed = (time.perf_counter() - t0) * 1e3
    if mode is MatchMode.COUNT:
        print(f"count: {report.count}")
    else:
        print(f"accepted: {'true' if report.accepted else 'false'}")
    print(f"end_state: {'none' if report.end_state is None else report.end_state}")
    print(f"routes: {routes}")
    print(f"time_ms: {elapsed:.3f}")
    return 0


def cmd_gen(args) -> int:
    plant = None
    if args.plant is not None:
        plant = (args.plant, args.occurrences)
    elif args.occurrences:
        raise ValueError("--occurrences needs --plant")
    data = gen_input(args.length, args.alphabet, args.seed, plant)
    if args.out is None:
        sys.stdout.buffer.write(data)
    else:
        args.out.write_bytes(data)
    return 0


def cmd_bench(args) -> int:
    dfa = _load_dfa(args, default_literal=("parallel", "parel"))
    plant = (args.plant, args.occurrences) if args.plant else None
    config = BenchConfig(
        engines=tuple(e for e in args.engines.split(",") if e),
        threads=tuple(_int_list(args.threads)),
        lengths=tuple(_int_list(args.lengths)),
        repetitions=args.reps,
        seed=args.seed,
        mode=MatchMode(args.mode),
        out=args.out,
        plant=plant,
    )

    def show(row):
        print(
            f"{row.engine:>5} threads={row.threads:<3} n={row.input_length:<11} "
            f"mean={row.mean_ms:10.3f}ms sd={row.stddev_ms:8.3f} "
            f"speedup={row.speedup_vs_seq:6.2f} routes={row.routes_total} count={row.match_count}",
            file=sys.stderr,
        )

    rows = run_bench(dfa, config, progress=show)
    write_csv(rows, config.out if config.out is not None else sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="parem", description="Regex-to-DFA compiler and parallel DFA matcher.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compile", help="compile a regex or search word to a transition table")
    _add_dfa_source(p, required=True)
    p.add_argument("-o", "--out", type=Path)
    p.add_argument("--dot", nargs="?", const="-", help="also write a DOT graph (path, or next to --out)")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("match", help="run one engine over an input file")
    _add_dfa_source(p, required=True)
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--engine", choices=["seq", "parem", "enum"], default="parem")
    p.add_argument("--threads", type=int, help="chunks and worker threads (default: CPU count)")
    p.add_argument("--mode", choices=["accept", "count"], default="count")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("gen", help="generate a seeded random input file")
    p.add_argument("--length", type=lambda s: int(float(s)), required=True)
    p.add_argument("--alphabet", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--plant", help="literal to plant")
    p.add_argument("--occurrences", type=int, default=0)
    p.add_argument("-o", "--out", type=Path)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="time engines over generated inputs and write CSV")
    _add_dfa_source(p, required=False)
    p.add_argument("--engines", default="seq,parem,enum")
    p.add_argument("--threads", default="1,2,4")
    p.add_argument("--lengths", default="1e6")
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=["accept", "count"], default="count")
    p.add_argument("--plant")
    p.add_argument("--occurrences", type=int, default=0)
    p.add_argument("-o", "--out", type=Path)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", None) is not None and isinstance(args.threads, int) and args.threads < 1:
        parser.error("--threads must be positive")
    try:
        return args.func(args)
    except (MissingRoute, ResultMismatch) as exc:
        code, message = EXIT_INTERNAL, str(exc)
    except (ParemError, ValueError) as exc:
        code, message = EXIT_INPUT, str(exc)
    except OSError as exc:
        code, message = EXIT_IO, f"{exc.strerror or exc}: {exc.filename}" if exc.filename else str(exc)
    print(f"parem: error: {message}".replace("\n", " "), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
