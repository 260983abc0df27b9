"""Print the 'parallel' search DFA, the per-chunk routes on the 24-character
worked input, and the route counts of both parallel engines."""

from parem import build_search_dfa
from parem.matcher import MatchMode, compute_L, run_enum, run_parem

TEXT = "plaraparallelapareparapl"


def main():
    dfa = build_search_dfa("parallel", list("parel"))
    print("state  " + "  ".join(dfa.alphabet))
    for q, row in enumerate(dfa.table.tolist()):
        mark = "*" if q in dfa.finals else " "
        print(f"{q}{mark}     " + "  ".join(str(d) for d in row))

    report, stats = run_parem(dfa, TEXT, 4, MatchMode.COUNT, trace=True)
    width = len(TEXT) // 4
    for i, routes in enumerate(stats.traces):
        chunk = TEXT[i * width:(i + 1) * width] if i < 3 else TEXT[3 * width:]
        print(f"\nP{i} {chunk!r}  S∩L={sorted(stats.r_sets[i])}")
        for route in routes:
            print(f"  from {route.start}: {' '.join(map(str, route.visited))}  hits={route.hits}")

    _, enum_stats = run_enum(dfa, TEXT, 4, MatchMode.COUNT)
    worst = len(compute_L(dfa, "l"))
    q = dfa.state_count
    print(f"\nmatches: {report.count}, end state: {report.end_state}")
    print(f"routes: speculative {stats.total_routes_parem}, enumeration {enum_stats.total_routes_enum}")
    print(f"worst case ratio: ({3 * q + 1})/({3 * worst + 1}) = {(3 * q + 1) / (3 * worst + 1):.2f}")


if __name__ == "__main__":
    main()
