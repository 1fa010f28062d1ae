"""All-solutions enumeration of scenarios through the SAT engine.

The bounded unrolling is solved, the model is decoded into a scenario, a
blocking clause over every step variable excludes it, and the loop repeats
until the formula becomes unsatisfiable.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Sequence

from .analyze import SceneFilter
from .core import (
    BoxId,
    Configuration,
    CyclicModelError,
    Model,
    Scenario,
    enabled_firings,
    fire,
    longest_run_bound,
)
from .encode import (
    StepVar,
    _Vars,
    conj,
    encode_enabled,
    encode_filter,
    encode_unrolled,
    step_keys,
    to_cnf,
)
from .positions import PositionAssignment, resolve_positions
from .sat import Engine, Session, Status

log = logging.getLogger(__name__)


class InvariantError(AssertionError):
    """A solver model does not correspond to a run of the model (a bug, not a user error)."""


@dataclass
class EnumOptions:
    k: int | None = None
    filter: SceneFilter | None = None
    limit: int | None = None
    conflict_budget: int | None = None
    time_budget: float | None = None
    seed: int = 0
    # replay every decoded run against the token game
    verify: bool = True
    # "full" blocks on every step variable; "compact" only on the true ones,
    # which is equivalent under the one-token-per-car invariant
    blocking: str = "full"

    def __post_init__(self) -> None:
        if self.k is not None and self.k < 0:
            raise ValueError("k must be non-negative")
        if self.limit is not None and self.limit < 1:
            raise ValueError("limit must be at least 1")
        if self.blocking not in ("full", "compact"):
            raise ValueError("blocking must be 'full' or 'compact'")


@dataclass
class EnumStats:
    k: int = 0
    num_vars: int = 0
    num_clauses: int = 0
    solves: int = 0
    conflicts: int = 0
    decisions: int = 0
    saturated: bool | None = None
    times: dict[str, float] = field(default_factory=lambda: dict.fromkeys(
        ("encode", "cnf", "solve", "block", "decode"), 0.0))

    def to_text(self) -> str:
        parts = [f"k={self.k}", f"vars={self.num_vars}", f"clauses={self.num_clauses}",
                 f"solves={self.solves}", f"conflicts={self.conflicts}"]
        parts += [f"t_{k}={v:.3f}s" for k, v in self.times.items()]
        return " ".join(parts)


@dataclass
class EnumResult:
    scenarios: list[Scenario]
    count: int
    complete: bool
    stats: EnumStats


def _check_run(m: Model, configs: Sequence[Configuration]) -> None:
    for a, b in zip(configs, configs[1:]):
        firings = enabled_firings(m, a)
        if not firings:
            if a != b:
                raise InvariantError(f"deadlocked scene {a} followed by {b}")
        elif not any(fire(a, f) == b for f in firings):
            raise InvariantError(f"no enabled firing leads from {a} to {b}")


def _truncate(m: Model, configs: Sequence[Configuration]) -> Scenario:
    for i, c in enumerate(configs):
        if not enabled_firings(m, c):
            return Scenario(tuple(configs[: i + 1]))
    return Scenario(tuple(configs))


def _configs(m: Model, values: Sequence[bool], ids: list[list[int]]) -> list[Configuration]:
    cars = m.car_index
    out = []
    for j, row in enumerate(ids):
        slot: list[BoxId | None] = [None] * len(cars)
        for b, v in zip(m.box_ids, row):
            if values[v]:
                ci = cars[b.car]
                if slot[ci] is not None:
                    raise InvariantError(f"car {b.car} occupies two boxes at step {j}")
                slot[ci] = b
        if any(x is None for x in slot):
            missing = [c for c, x in zip(m.cars, slot) if x is None]
            raise InvariantError(f"cars {missing} occupy no box at step {j}")
        out.append(Configuration(tuple(slot)))
    return out


def decode(assignment: Sequence[bool] | Mapping[int, bool], var_map: Mapping[StepVar, int],
           m: Model) -> Scenario:
    """Turn a solver model into the scenario it denotes, dropping the stutter tail."""
    k = max(sv.step for sv in var_map)
    ids = [[var_map[StepVar(j, b)] for b in m.box_ids] for j in range(k + 1)]
    values = assignment
    if isinstance(assignment, Mapping):
        values = [False] * (max(assignment) + 1)
        for v, x in assignment.items():
            values[v] = x
    return _truncate(m, _configs(m, values, ids))


def _bound(m: Model, options: EnumOptions) -> int:
    if options.k is not None:
        return options.k
    return longest_run_bound(m)


def iter_scenarios(
    m: Model,
    options: EnumOptions | None = None,
    stats: EnumStats | None = None,
    engine: Callable[..., Engine] | None = None,
    decode_runs: bool = True,
) -> Iterator[Scenario | None]:
    """Yield scenarios as the solver finds them.

    ``stats`` is filled in as a side effect; ``stats.saturated`` is set and a
    final ``StopIteration`` reached only when the search ran to completion.
    With ``decode_runs=False`` (and ``verify`` off) ``None`` is yielded per
    solution instead of a scenario.
    """
    o = options or EnumOptions()
    st = stats if stats is not None else EnumStats()
    resolve_positions(m)  # contradictory layouts are rejected up front
    T = st.times
    k = _bound(m, o)
    st.k = k
    t0 = time.perf_counter()
    sv = _Vars()
    f = encode_unrolled(m, k, sv)
    if o.filter is not None:
        f = conj(f, encode_filter(m, o.filter, k, sv))
    t1 = time.perf_counter()
    T["encode"] += t1 - t0
    cnf = to_cnf(f, keys=step_keys(m, k))
    T["cnf"] += time.perf_counter() - t1
    st.num_vars, st.num_clauses = cnf.num_vars, len(cnf.clauses)
    nb = len(m.box_ids)
    ids = [[cnf.var_map[StepVar(j, b)] for b in m.box_ids] for j in range(k + 1)]
    flat = [v for row in ids for v in row]
    assert flat == list(range(1, (k + 1) * nb + 1))
    make = engine or Session
    session = make(cnf.num_vars, cnf.clauses, seed=o.seed, check_models=o.verify)
    deadline = None if o.time_budget is None else time.monotonic() + o.time_budget
    seen: set[tuple[int, ...]] = set()
    found = 0
    budget = o.conflict_budget
    decode_runs = decode_runs or o.verify
    while True:
        if o.limit is not None and found >= o.limit:
            return
        if deadline is not None and time.monotonic() > deadline:
            return
        t = time.perf_counter()
        before = getattr(session, "conflicts", 0)
        res = session.solve(conflict_budget=budget)
        T["solve"] += time.perf_counter() - t
        st.solves += 1
        spent = getattr(session, "conflicts", 0) - before
        st.conflicts += spent
        st.decisions = getattr(session, "decisions", 0)
        if res.status is Status.UNKNOWN:
            return
        if budget is not None:
            budget -= spent
        if res.status is Status.UNSAT:
            break
        a = res.assignment
        t = time.perf_counter()
        scenario = None
        if decode_runs:
            configs = _configs(m, a, ids)
            if o.verify:
                _check_run(m, configs)
            scenario = _truncate(m, configs)
        T["decode"] += time.perf_counter() - t
        t = time.perf_counter()
        if o.blocking == "full":
            clause = [-v if a[v] else v for v in flat]
        else:
            clause = [-v for v in flat if a[v]]
        if o.verify:
            key = tuple(v for v in flat if a[v])
            if key in seen:
                raise InvariantError("solver returned a blocked assignment")
            seen.add(key)
        # the seen-set above stands in for re-checking every blocking clause
        session.add_clause(clause, verify=False)
        T["block"] += time.perf_counter() - t
        found += 1
        yield scenario
    st.saturated = _saturated(m, o, k)
    if not st.saturated:
        log.warning("bound k=%d cuts off runs that are still live; raise k", k)


def _saturated(m: Model, o: EnumOptions, k: int) -> bool:
    """True iff no run (passing the filter) is still enabled after ``k`` steps."""
    if not m.is_cyclic() and k >= longest_run_bound(m):
        return True
    sv = _Vars()
    f = encode_unrolled(m, k, sv)
    if o.filter is not None:
        f = conj(f, encode_filter(m, o.filter, k, sv))
    f = conj(f, encode_enabled(m, k, sv))
    cnf = to_cnf(f, keys=step_keys(m, k))
    return Session(cnf.num_vars, cnf.clauses, seed=o.seed).solve().status is Status.UNSAT


def enumerate_scenarios(m: Model, options: EnumOptions | None = None, **kw) -> EnumResult:
    o = options or EnumOptions()
    if m.is_cyclic() and o.k is None:
        raise CyclicModelError("cyclic model: pass an explicit bound k")
    stats = EnumStats()
    scenarios = list(iter_scenarios(m, o, stats, **kw))
    return EnumResult(scenarios, len(scenarios), stats.saturated is not None, stats)


def count_scenarios(m: Model, options: EnumOptions | None = None, **kw) -> tuple[int, bool]:
    o = options or EnumOptions()
    if m.is_cyclic() and o.k is None:
        raise CyclicModelError("cyclic model: pass an explicit bound k")
    stats = EnumStats()
    n = sum(1 for _ in iter_scenarios(m, o, stats, decode_runs=False, **kw))
    return n, stats.saturated is not None


# -- line-delimited scenario records ----------------------------------------


def scenario_record(m: Model, s: Scenario, positions: PositionAssignment | None = None,
                    index: int | None = None) -> dict:
    """One scenario as ``{"index", "scenes"}``; a scene lists
    ``[car, box_index, lane, position]`` per car in model car order."""
    pos = positions if positions is not None else resolve_positions(m)
    scenes = [[[b.car, b.index, m.decl[b].lane, pos[b]] for b in scene.boxes] for scene in s.scenes]
    rec = {"scenes": scenes}
    if index is not None:
        rec = {"index": index, **rec}
    return rec


def dumps_scenarios(m: Model, scenarios, positions: PositionAssignment | None = None) -> str:
    pos = positions if positions is not None else resolve_positions(m)
    return "".join(
        json.dumps(scenario_record(m, s, pos, i), separators=(",", ":")) + "\n"
        for i, s in enumerate(scenarios)
    )


def loads_scenarios(text: str) -> list[Scenario]:
    out = []
    for line in text.splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        out.append(Scenario(tuple(
            Configuration(tuple(BoxId(car, idx) for car, idx, _lane, _pos in scene))
            for scene in rec["scenes"]
        )))
    return out
