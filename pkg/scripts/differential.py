"""Compare SAT enumeration with explicit-state search on seeded random models.

    python3 scripts/differential.py --models 2000 --start 10000
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

import random  # noqa: E402

from cpd.dsl import serialize  # noqa: E402
from cpd.enumeration import EnumOptions, enumerate_scenarios  # noqa: E402
from cpd.oracle import oracle_enumerate  # noqa: E402
from helpers import random_filter, random_model  # noqa: E402


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--models", type=int, default=500)
    ap.add_argument("--start", type=int, default=0)
    ap.add_argument("--max-cars", type=int, default=4)
    ap.add_argument("--max-boxes", type=int, default=12)
    args = ap.parse_args()
    t = time.perf_counter()
    runs = mismatches = 0
    for seed in range(args.start, args.start + args.models):
        rng = random.Random(seed)
        m = random_model(rng, args.max_cars, args.max_boxes)
        f = random_filter(rng, m)
        got = enumerate_scenarios(m, EnumOptions(filter=f, seed=seed))
        ref = oracle_enumerate(m, f)
        runs += ref.count
        if set(got.scenarios) != ref.scenarios:
            mismatches += 1
            print(f"seed {seed}: sat={got.count} oracle={ref.count} filter={f}")
            print(serialize(m))
    print(f"models={args.models} scenarios={runs} mismatches={mismatches} "
          f"time={time.perf_counter() - t:.1f}s")
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
