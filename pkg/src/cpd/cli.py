"""``cpd`` command line.

Exit codes: 0 success, 1 model or parse error, 2 infeasible positions or an
unsatisfiable encoding where a run was expected, 3 budget exhausted before
the enumeration finished, 4 internal invariant failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .analyze import (
    binomial_prediction,
    collision_pairs,
    detect_collisions,
    parse_filter,
    summarize,
)
from .core import CyclicModelError, ModelError, validate_model
from .dsl import ParseFailure
from .encode import encode_filter, encode_unrolled, step_keys, to_cnf, conj, _Vars
from .enumeration import (
    EnumOptions,
    EnumStats,
    InvariantError,
    count_scenarios,
    dumps_scenarios,
    enumerate_scenarios,
    _bound,
)
from .models import bench, load
from .oracle import oracle_enumerate
from .positions import PositionsInfeasible, resolve_positions
from .render import RenderOptions, render_model_dot, render_scenario_ascii, render_scenario_tree
from .sat import SolverError, Status, export_dimacs, new_session

OK, MODEL_ERROR, INFEASIBLE, INCOMPLETE, INTERNAL = range(5)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get("CPD_SEED", "0"))


def _options(args, **over) -> EnumOptions:
    kw = dict(
        k=args.k,
        filter=parse_filter(args.filter) if getattr(args, "filter", None) else None,
        limit=getattr(args, "limit", None),
        conflict_budget=getattr(args, "conflicts", None),
        time_budget=getattr(args, "budget", None),
        seed=_seed(args),
        verify=not getattr(args, "no_verify", False),
    )
    kw.update(over)
    return EnumOptions(**kw)


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _status_line(count: int, complete: bool) -> str:
    return f"count={count} complete={'true' if complete else 'false'}"


def cmd_validate(args) -> int:
    m = load(args.model)
    report = validate_model(m)
    resolve_positions(m)
    print(f"model {m.name}: {len(m.cars)} cars, {len(m.box_ids)} boxes, "
          f"{len(m.transitions)} transitions, {len(m.syncs)} sync groups")
    for w in report.warnings:
        print(f"warning: {w}")
    print("ok")
    return OK


def cmd_enumerate(args) -> int:
    m = load(args.model)
    o = _options(args)
    res = enumerate_scenarios(m, o)
    if args.format == "jsonl":
        text = dumps_scenarios(m, res.scenarios)
    elif args.format == "ascii":
        text = "".join(f"# scenario {i}\n{render_scenario_ascii(m, s)}\n"
                       for i, s in enumerate(res.scenarios))
    else:
        text = render_scenario_tree(res.scenarios, RenderOptions("dot", args.max_tree))
    _emit(args, text)
    report = detect_collisions(res.scenarios, collision_pairs(m))
    print(_status_line(res.count, res.complete), file=sys.stderr)
    print(f"colliding={report.colliding}", file=sys.stderr)
    print("phases: " + res.stats.to_text(), file=sys.stderr)
    return OK if res.complete else INCOMPLETE


def cmd_count(args) -> int:
    m = load(args.model)
    t = time.perf_counter()
    n, complete = count_scenarios(m, _options(args, verify=args.verify))
    print(_status_line(n, complete))
    print(f"time={time.perf_counter() - t:.3f}s", file=sys.stderr)
    return OK if complete else INCOMPLETE


def cmd_report(args) -> int:
    m = load(args.model)
    res = enumerate_scenarios(m, _options(args))
    summary = summarize(res, detect_collisions(res.scenarios, collision_pairs(m)))
    sys.stdout.write(summary.to_text(with_timings=args.timings))
    return OK if res.complete else INCOMPLETE


def cmd_oracle(args) -> int:
    m = load(args.model)
    o = _options(args)
    sat = enumerate_scenarios(m, o)
    depth = o.k if m.is_cyclic() else None
    ref = oracle_enumerate(m, o.filter, max_depth=depth)
    same = set(sat.scenarios) == ref.scenarios and sat.count == ref.count
    print(f"oracle={ref.count} sat={sat.count} {'MATCH' if same else 'MISMATCH'}")
    return OK if same else INTERNAL


def cmd_render(args) -> int:
    _emit(args, render_model_dot(load(args.model)))
    return OK


def _bench_row(n: int, filt: str | None, seed: int) -> tuple:
    m = bench(n)
    t = time.perf_counter()
    count, _ = count_scenarios(m, EnumOptions(seed=seed, verify=False, blocking="compact"))
    dt = time.perf_counter() - t
    fcount = fdt = None
    if filt:
        t = time.perf_counter()
        fcount, _ = count_scenarios(
            m, EnumOptions(filter=parse_filter(filt), seed=seed, verify=False, blocking="compact"))
        fdt = time.perf_counter() - t
    return n, count, binomial_prediction(n), dt, fcount, fdt


def cmd_bench(args) -> int:
    ns = range(args.min, args.max + 1)
    seed = _seed(args)
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_bench_row, ns, [args.filter] * len(ns), [seed] * len(ns)))
    else:
        rows = [_bench_row(n, args.filter, seed) for n in ns]
    head = f"{'n':>3} {'count':>9} {'predicted':>9} {'time_s':>9}"
    if args.filter:
        head += f" {'filtered':>9} {'ftime_s':>9}"
    print(head)
    bad = False
    for n, c, p, dt, fc, fdt in rows:
        line = f"{n:>3} {c:>9} {p:>9} {dt:>9.3f}"
        if args.filter:
            line += f" {fc:>9} {fdt:>9.3f}"
        print(line)
        bad |= c != p
    return INTERNAL if bad else OK


def cmd_dimacs(args) -> int:
    m = load(args.model)
    o = _options(args)
    k = _bound(m, o)
    s = _Vars()
    f = encode_unrolled(m, k, s)
    if o.filter is not None:
        f = conj(f, encode_filter(m, o.filter, k, s))
    cnf = to_cnf(f, keys=step_keys(m, k))
    comments = [f"model {m.name} k={k}"]
    comments += [f"var {v} {key}" for key, v in sorted(cnf.var_map.items(), key=lambda kv: kv[1])]
    _emit(args, export_dimacs(cnf, comments))
    print(f"vars={cnf.num_vars} clauses={len(cnf.clauses)}", file=sys.stderr)
    if new_session(cnf, o.seed).solve().status is not Status.SAT:
        return INFEASIBLE
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cpd", description="Car position diagram scenario tools")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def model_cmd(name, fn, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("model", help="model file, '-' for stdin, bench:N or builtin:NAME")
        sp.set_defaults(fn=fn)
        return sp

    def search_flags(sp):
        sp.add_argument("--k", type=int, help="unrolling bound (required for cyclic models)")
        sp.add_argument("--filter", help="e.g. 'dist<3', 'collision', 'no-collision', 'occupies(Car.1)'")
        sp.add_argument("--budget", type=float, help="wall-clock budget in seconds")
        sp.add_argument("--conflicts", type=int, help="solver conflict budget")
        sp.add_argument("--seed", type=int, help="solver seed (default $CPD_SEED or 0)")

    model_cmd("validate", cmd_validate, "parse and check a model")
    sp = model_cmd("enumerate", cmd_enumerate, "list every scenario")
    search_flags(sp)
    sp.add_argument("--limit", type=int)
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("jsonl", "ascii", "tree"), default="jsonl")
    sp.add_argument("--max-tree", type=int, default=64, help="scenario cap for --format tree")
    sp.add_argument("--no-verify", action="store_true", help="skip replaying runs against the model")
    sp = model_cmd("count", cmd_count, "count scenarios")
    search_flags(sp)
    sp.add_argument("--verify", action="store_true", help="replay runs while counting")
    sp = model_cmd("report", cmd_report, "scenario and collision summary")
    search_flags(sp)
    sp.add_argument("--timings", action="store_true")
    sp = model_cmd("oracle", cmd_oracle, "compare the SAT enumeration with explicit search")
    search_flags(sp)
    sp = model_cmd("render", cmd_render, "model graph as DOT")
    sp.add_argument("--out")
    sp = model_cmd("dimacs", cmd_dimacs, "write the bounded encoding as DIMACS CNF")
    search_flags(sp)
    sp.add_argument("--out")

    sp = sub.add_parser("bench", help="two-chain benchmark table")
    sp.add_argument("--min", type=int, default=1)
    sp.add_argument("--max", type=int, default=6)
    sp.add_argument("--filter")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--seed", type=int)
    sp.set_defaults(fn=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ParseFailure as e:
        print(e, file=sys.stderr)
        return MODEL_ERROR
    except PositionsInfeasible as e:
        print(f"error: {e}", file=sys.stderr)
        return INFEASIBLE
    except (InvariantError, SolverError) as e:
        print(f"internal error: {e}", file=sys.stderr)
        return INTERNAL
    except (ModelError, CyclicModelError, KeyError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return MODEL_ERROR


if __name__ == "__main__":
    sys.exit(main())
