"""Thread-scaling sweep for the three engines; writes a bench CSV.

    python scripts/scaling_experiment.py --lengths 1e7,1e8 --threads 1,2,4,8 -o scaling.csv
"""

import argparse
import os
import sys

from parem import build_search_dfa
from parem.bench import BenchConfig, run_bench, write_csv


def main(argv=None):
    cpus = os.cpu_count() or 1
    default_threads = ",".join(str(t) for t in (1, 2, 4, 8, 16, 32, 48) if t <= 2 * cpus)
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lengths", default="1e7")
    ap.add_argument("--threads", default=default_threads)
    ap.add_argument("--engines", default="seq,parem,enum")
    ap.add_argument("--reps", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("-o", "--out", default="scaling.csv")
    args = ap.parse_args(argv)

    config = BenchConfig(
        engines=args.engines.split(","),
        threads=[int(t) for t in args.threads.split(",")],
        lengths=[int(float(n)) for n in args.lengths.split(",")],
        repetitions=args.reps,
        seed=args.seed,
    )
    dfa = build_search_dfa("parallel", list("parel"))
    rows = run_bench(
        dfa,
        config,
        progress=lambda r: print(
            f"{r.engine:>5} t={r.threads:<3} n={r.input_length:<10} {r.mean_ms:9.2f} ms  x{r.speedup_vs_seq:.2f}",
            file=sys.stderr,
        ),
    )
    write_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)


if __name__ == "__main__":
    main()
