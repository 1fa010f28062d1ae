"""Explicit-state enumeration of scenarios by playing the token game.

This is deliberately independent of the propositional pipeline: it only uses
the firing rules in :mod:`cpd.core`.
"""

from __future__ import annotations

from dataclasses import dataclass

from .analyze import SceneFilter, accepts
from .core import (
    Configuration,
    CyclicModelError,
    Model,
    Scenario,
    enabled_firings,
    fire,
)


@dataclass(frozen=True)
class RunSet:
    scenarios: frozenset[Scenario]

    @property
    def count(self) -> int:
        return len(self.scenarios)


def oracle_enumerate(
    m: Model, filter: SceneFilter | None = None, max_depth: int | None = None
) -> RunSet:
    """All maximal runs as scene sequences, by depth-first search.

    With ``max_depth`` a run that is still live after ``max_depth`` firings is
    recorded as its prefix of that length, mirroring a bounded unrolling.
    Without it the model must be acyclic.
    """
    if max_depth is None and m.is_cyclic():
        raise CyclicModelError("cyclic model needs max_depth")
    runs: set[Scenario] = set()
    stack: list[tuple[Configuration, ...]] = [(m.initial_configuration(),)]
    while stack:
        path = stack.pop()
        cur = path[-1]
        firings = enabled_firings(m, cur)
        if not firings or (max_depth is not None and len(path) > max_depth):
            s = Scenario(path)
            if filter is None or accepts(m, filter, s):
                runs.add(s)
            continue
        for nxt in dict.fromkeys(fire(cur, f) for f in firings):
            stack.append(path + (nxt,))
    return RunSet(frozenset(runs))


def oracle_count(m: Model) -> int:
    """Number of distinct maximal scene sequences, counted over the configuration DAG."""
    if m.is_cyclic():
        raise CyclicModelError("counting requires an acyclic model")
    memo: dict[Configuration, int] = {}
    # iterative post-order so long runs do not hit the recursion limit
    stack = [m.initial_configuration()]
    while stack:
        cur = stack[-1]
        if cur in memo:
            stack.pop()
            continue
        succ = list(dict.fromkeys(fire(cur, f) for f in enabled_firings(m, cur)))
        todo = [s for s in succ if s not in memo]
        if todo:
            stack.extend(todo)
            continue
        memo[cur] = sum(memo[s] for s in succ) if succ else 1
        stack.pop()
    return memo[m.initial_configuration()]
