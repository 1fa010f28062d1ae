"""Acceptance gate.  One test per criterion; stretch tiers carry the slow marker."""

import os
import random
import subprocess
import sys
import time

import pytest

from cpd.analyze import DistanceBound, binomial_prediction, collision_pairs, detect_collisions
from cpd.core import BoxId, Configuration, enabled_firings, fire, longest_run_bound
from cpd.dsl import parse, serialize
from cpd.encode import to_cnf
from cpd.enumeration import EnumOptions, count_scenarios, enumerate_scenarios
from cpd.models import FAMILIES, bench, builtin_names, load_builtin
from cpd.oracle import oracle_count, oracle_enumerate
from cpd.sat import Session
from helpers import random_filter, random_formula, random_model, truth_table


def report(n, ok, detail):
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


def test_criterion_1_fig2():
    t = time.perf_counter()
    r = enumerate_scenarios(load_builtin("fig2"))
    dt = time.perf_counter() - t
    report(1, r.count == 6 and r.complete and dt < 1.0, f"count={r.count} time={dt:.3f}s")


def test_criterion_2_bench_counts():
    t = time.perf_counter()
    sat = [enumerate_scenarios(bench(n)).count for n in range(1, 7)]
    ref = [oracle_count(bench(n)) for n in range(1, 7)]
    dt = time.perf_counter() - t
    want = [binomial_prediction(n) for n in range(1, 7)]
    assert want == [2, 6, 20, 70, 252, 924]
    report(2, sat == ref == want and dt < 30, f"sat={sat} oracle={ref} time={dt:.1f}s")


def test_criterion_3_bench8():
    t = time.perf_counter()
    n, complete = count_scenarios(bench(8), EnumOptions(verify=False, blocking="compact"))
    dt = time.perf_counter() - t
    report(3, n == 12870 and complete and dt < 600, f"count={n} complete={complete} time={dt:.1f}s")


@pytest.mark.slow
def test_criterion_3_stretch_bench10():
    t = time.perf_counter()
    n, complete = count_scenarios(bench(10), EnumOptions(verify=False, blocking="compact"))
    dt = time.perf_counter() - t
    report("3-stretch", n == 184756 and complete and dt < 3600, f"count={n} time={dt:.0f}s")


def test_criterion_4_mining():
    r = enumerate_scenarios(bench(3), EnumOptions(filter=DistanceBound(3)))
    ref = oracle_enumerate(bench(3), DistanceBound(3))
    report(4, r.count == 18 and set(r.scenarios) == ref.scenarios, f"count={r.count} oracle={ref.count}")


@pytest.mark.slow
def test_criterion_4_stretch_bench10_distance():
    t = time.perf_counter()
    n, complete = count_scenarios(
        bench(10), EnumOptions(filter=DistanceBound(3), verify=False, blocking="compact"))
    dt = time.perf_counter() - t
    reduction = 1 - n / binomial_prediction(10)
    ok = n == 39366 and complete and abs(reduction - 0.787) < 5e-4 and round(reduction * 100) == 79
    report("4-stretch", ok, f"count={n} reduction={reduction:.5f} time={dt:.0f}s")


def test_criterion_5_sync():
    m = load_builtin("fig3_sync")
    r = enumerate_scenarios(m)
    bad = {frozenset({BoxId("LCar", 0), BoxId("RCar", 1)}), frozenset({BoxId("LCar", 1), BoxId("RCar", 0)})}
    hits = [s for s in r.scenarios for sc in s.scenes if frozenset(sc.boxes) in bad]
    report(5, r.count >= 1 and not hits, f"scenarios={r.count} forbidden_scenes={len(hits)}")


def test_criterion_6_guards():
    rows = []
    for name, kind in (("fig3_exists", True), ("fig3_absent", False)):
        m = load_builtin(name)
        for rcar in (0, 1):
            c = Configuration((BoxId("LCar", 0), BoxId("RCar", rcar)))
            moves = {t.dst for f in enabled_firings(m, c) for t in f.moves if t.car == "LCar"}
            fires = BoxId("LCar", 1) in moves
            rows.append(fires == ((rcar == 0) == kind))
    report(6, all(rows), f"table={rows}")


def test_criterion_7_differential():
    t = time.perf_counter()
    bad = []
    for seed in range(500):
        rng = random.Random(seed)
        m = random_model(rng)
        f = random_filter(rng, m)
        got = enumerate_scenarios(m, EnumOptions(filter=f, seed=seed))
        if set(got.scenarios) != oracle_enumerate(m, f).scenarios:
            bad.append(seed)
    dt = time.perf_counter() - t
    report(7, not bad and dt < 300, f"models=500 mismatches={bad} time={dt:.1f}s")


class _Checked(Session):
    """Session that audits every model it returns against the token game."""

    model = None
    k = 0
    violations: list = []
    seen = 0

    def solve(self, conflict_budget=None):
        r = super().solve(conflict_budget)
        if r.sat:
            type(self).seen += 1
            self._audit(r.assignment)
        return r

    def _audit(self, a):
        m, nb = self.model, len(self.model.box_ids)
        scenes = []
        for j in range(self.k + 1):
            row = [b for i, b in enumerate(m.box_ids) if a[j * nb + i + 1]]
            per_car = {c: [b for b in row if b.car == c] for c in m.cars}
            if any(len(v) != 1 for v in per_car.values()):
                self.violations.append(("tokens", j, row))
                return
            scenes.append(Configuration(tuple(per_car[c][0] for c in m.cars)))
        for x, y in zip(scenes, scenes[1:]):
            fs = enabled_firings(m, x)
            if not (any(fire(x, f) == y for f in fs) or (not fs and x == y)):
                self.violations.append(("step", x, y))


def _audited(m, **kw):
    _Checked.model, _Checked.k = m, kw.get("k") or longest_run_bound(m)
    enumerate_scenarios(m, EnumOptions(verify=False, **kw), engine=_Checked)


def test_criterion_8_encoding_invariants():
    _Checked.violations, _Checked.seen = [], 0
    _audited(load_builtin("fig2"))
    for n in range(1, 7):
        _audited(bench(n))
    _audited(bench(3), filter=DistanceBound(3))
    for name in ("fig3_sync", "fig3_exists", "fig3_absent"):
        _audited(load_builtin(name))
    for seed in range(500):
        rng = random.Random(seed)
        m = random_model(rng)
        _audited(m, filter=random_filter(rng, m), seed=seed)
    v = _Checked.violations
    report(8, not v and _Checked.seen > 0, f"models_checked={_Checked.seen} violations={len(v)}")


def test_criterion_9_tseitin():
    bad = 0
    for seed in range(1000):
        rng = random.Random(seed)
        nvars = rng.randint(1, 10)
        names = [f"x{i}" for i in range(nvars)]
        f = random_formula(rng, nvars)
        cnf = to_cnf(f, keys=names)
        table = truth_table(f, names)
        r = Session(cnf.num_vars, cnf.clauses).solve()
        if r.sat != bool(table):
            bad += 1
            continue
        if r.sat and not f.evaluate({n: r.assignment[cnf.var_map[n]] for n in names}):
            bad += 1
            continue
        # fixing the named inputs must agree with the truth table row
        for _ in range(3):
            env = {n: rng.random() < 0.5 for n in names}
            s = Session(cnf.num_vars, cnf.clauses)
            for n in names:
                s.add_clause([cnf.var_map[n] if env[n] else -cnf.var_map[n]])
            if s.solve().sat != f.evaluate(env):
                bad += 1
                break
    report(9, bad == 0, f"formulas=1000 mismatches={bad}")


def test_criterion_10_monotonicity():
    rows, ok = [], True
    for fam, (nc, c, n) in FAMILIES.items():
        stats = {}
        for name in (nc, c, n):
            m = load_builtin(name)
            runs = enumerate_scenarios(m).scenarios
            stats[name] = (len(runs), detect_collisions(runs, collision_pairs(m)).colliding)
        for i in (0, 1):
            ok &= stats[nc][i] <= stats[c][i] <= stats[n][i]
        rows.append(f"{fam}: " + " ".join(f"{k.rsplit('_', 1)[1]}={v}" for k, v in stats.items()))
    report(10, ok, "; ".join(rows) + " (total, colliding)")


def test_criterion_11_round_trip_and_determinism():
    fix = all(serialize(parse(serialize(load_builtin(n)))) == serialize(load_builtin(n))
              for n in builtin_names())
    outs = []
    env = {**os.environ, "CPD_SEED": "11"}
    for _ in range(2):
        run = []
        for model in ("builtin:fig2", "builtin:lane_change2_nc", "bench:4"):
            p = subprocess.run([sys.executable, "-m", "cpd", "enumerate", model],
                               capture_output=True, text=True, env=env, check=True)
            run.append(p.stdout)
        outs.append(run)
    report(11, fix and outs[0] == outs[1], f"fixpoint={fix} identical={outs[0] == outs[1]}")
