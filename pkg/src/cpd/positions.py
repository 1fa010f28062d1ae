"""Integer positions for boxes under difference constraints.

Every constraint is a lower bound of the form ``pos(v) >= pos(u) + w``:
``a < b`` gives weight 1, ``a <= b`` weight 0, ``a = b`` two weight-0 edges.
Concrete boxes are pinned to a synthetic origin in both directions and
parametric boxes get a floor edge of weight 0 from the origin.  The least
solution is then the longest-path distance from the origin, and a positive
cycle is exactly an infeasible system.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping

from .core import BoxId, Model, ModelError, PositionConstraint, Relation

ORIGIN = BoxId("", -1)
NEG_INF = float("-inf")


@dataclass(frozen=True)
class Edge:
    src: BoxId
    dst: BoxId
    weight: int
    reason: PositionConstraint | str

    def __str__(self) -> str:
        return str(self.reason)


class PositionsInfeasible(ModelError):
    def __init__(self, cycle: list[Edge]):
        self.cycle = cycle
        super().__init__(
            "position constraints are contradictory: " + "; ".join(str(e) for e in cycle)
        )


@dataclass(frozen=True)
class PositionAssignment(Mapping[BoxId, int]):
    pos: dict[BoxId, int]

    def __getitem__(self, box: BoxId) -> int:
        return self.pos[box]

    def __iter__(self) -> Iterator[BoxId]:
        return iter(self.pos)

    def __len__(self) -> int:
        return len(self.pos)


def constraint_edges(m: Model) -> list[Edge]:
    edges = []
    for b in m.boxes:
        if b.position is None:
            edges.append(Edge(ORIGIN, b.id, 0, f"pos({b.id}) >= 0"))
        else:
            why = f"pos({b.id}) = {b.position}"
            edges.append(Edge(ORIGIN, b.id, b.position, why))
            edges.append(Edge(b.id, ORIGIN, -b.position, why))
    for c in m.constraints:
        if c.rel is Relation.LT:
            edges.append(Edge(c.lhs, c.rhs, 1, c))
        elif c.rel is Relation.LE:
            edges.append(Edge(c.lhs, c.rhs, 0, c))
        else:
            edges.append(Edge(c.lhs, c.rhs, 0, c))
            edges.append(Edge(c.rhs, c.lhs, 0, c))
    return edges


def _bellman_ford(nodes: list[BoxId], edges: list[Edge]) -> dict[BoxId, int]:
    dist: dict[BoxId, float] = {n: NEG_INF for n in nodes}
    pred: dict[BoxId, Edge] = {}
    dist[ORIGIN] = 0
    changed = None
    for _ in range(len(nodes)):
        changed = None
        for e in edges:
            d = dist[e.src]
            if d != NEG_INF and d + e.weight > dist[e.dst]:
                dist[e.dst] = d + e.weight
                pred[e.dst] = e
                changed = e.dst
        if changed is None:
            return {n: int(d) for n, d in dist.items() if d != NEG_INF}
    # still relaxing after |V| rounds: walk back into the positive cycle
    node = changed
    for _ in range(len(nodes)):
        node = pred[node].src
    cycle = []
    cur = node
    while True:
        e = pred[cur]
        cycle.append(e)
        cur = e.src
        if cur == node:
            break
    cycle.reverse()
    raise PositionsInfeasible(cycle)


def resolve_positions(m: Model) -> PositionAssignment:
    """Least non-negative integer positions satisfying every constraint.

    Raises :class:`PositionsInfeasible` carrying a contradictory cycle.
    """
    cached = m.__dict__.get("_positions")
    if cached is not None:
        return cached
    nodes = [ORIGIN, *m.box_ids]
    dist = _bellman_ford(nodes, constraint_edges(m))
    pa = PositionAssignment({b: dist[b] for b in m.box_ids})
    m.__dict__["_positions"] = pa
    return pa


def _longest_paths(m: Model) -> dict[BoxId, dict[BoxId, float]]:
    cached = m.__dict__.get("_longest")
    if cached is not None:
        return cached
    resolve_positions(m)  # raises on infeasible systems
    nodes = [ORIGIN, *m.box_ids]
    L = {u: {v: (0 if u == v else NEG_INF) for v in nodes} for u in nodes}
    for e in constraint_edges(m):
        if e.weight > L[e.src][e.dst]:
            L[e.src][e.dst] = e.weight
    for k in nodes:
        Lk = L[k]
        for i in nodes:
            lik = L[i][k]
            if lik == NEG_INF:
                continue
            Li = L[i]
            for j in nodes:
                cand = lik + Lk[j]
                if cand > Li[j]:
                    Li[j] = cand
    m.__dict__["_longest"] = L
    return L


def entailed_bound(m: Model, a: BoxId, b: BoxId) -> float:
    """Largest ``w`` such that every solution has ``pos(b) >= pos(a) + w``."""
    return _longest_paths(m)[a][b]


def entailed_equal(m: Model, a: BoxId, b: BoxId) -> bool:
    """True iff every integer solution puts ``a`` and ``b`` at the same position."""
    L = _longest_paths(m)
    return L[a][b] >= 0 and L[b][a] >= 0
