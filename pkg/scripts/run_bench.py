"""Time scenario counts on the two-chain benchmark, with an optional filter.

    python3 scripts/run_bench.py --n 1 8
    python3 scripts/run_bench.py --n 10 10 --filter 'dist<3' --json out.json
"""

from __future__ import annotations

import argparse
import json
import time
from dataclasses import asdict, dataclass

from cpd.analyze import binomial_prediction, parse_filter
from cpd.enumeration import EnumOptions, EnumStats, iter_scenarios
from cpd.models import bench


@dataclass
class Row:
    n: int
    filter: str | None
    count: int
    predicted: int
    seconds: float
    num_vars: int
    num_clauses: int
    conflicts: int


def run(n: int, filt: str | None, blocking: str, seed: int) -> Row:
    st = EnumStats()
    opts = EnumOptions(filter=parse_filter(filt) if filt else None, verify=False,
                       blocking=blocking, seed=seed)
    t = time.perf_counter()
    count = sum(1 for _ in iter_scenarios(bench(n), opts, st, decode_runs=False))
    return Row(n, filt, count, binomial_prediction(n), time.perf_counter() - t,
               st.num_vars, st.num_clauses, st.conflicts)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, nargs=2, default=(1, 6), metavar=("LO", "HI"))
    ap.add_argument("--filter")
    ap.add_argument("--blocking", choices=("full", "compact"), default="compact")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json")
    args = ap.parse_args()
    rows = []
    for n in range(args.n[0], args.n[1] + 1):
        r = run(n, args.filter, args.blocking, args.seed)
        rows.append(r)
        print(f"n={r.n} filter={r.filter} count={r.count} predicted={r.predicted} "
              f"time={r.seconds:.1f}s vars={r.num_vars} clauses={r.num_clauses}", flush=True)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump([asdict(r) for r in rows], fh, indent=2)


if __name__ == "__main__":
    main()
