"""Seeded random model generator shared by the property and acceptance suites."""

from __future__ import annotations

import random

from cpd.analyze import AllOf, DistanceBound, ForbidCollision, Occupancy, RequireCollision
from cpd.core import (
    BoxDecl,
    BoxId,
    Guard,
    GuardKind,
    Model,
    PositionConstraint,
    Relation,
    SyncGroup,
    Transition,
)

CARS = ("Ego", "Lft", "Rgt", "Oth")


def random_model(rng: random.Random, max_cars: int = 4, max_boxes: int = 12) -> Model:
    """An acyclic model mixing plain, guarded and synchronised transitions.

    Some boxes are parametric, constrained consistently with a hidden
    placement so that the position system is always feasible.
    """
    ncars = rng.randint(1, max_cars)
    cars = list(CARS[:ncars])
    lanes = [f"l{i}" for i in range(rng.randint(1, 3))]
    budget = rng.randint(ncars, max_boxes)
    sizes = [1] * ncars
    for _ in range(budget - ncars):
        sizes[rng.randrange(ncars)] += 1
    boxes, hidden = [], {}
    for car, n in zip(cars, sizes):
        for i in range(n):
            b = BoxId(car, i)
            hidden[b] = rng.randint(0, 4)
            param = rng.random() < 0.25
            boxes.append(BoxDecl(b, rng.choice(lanes), None if param else hidden[b]))
    ids = [d.id for d in boxes]
    trans = []
    for car, n in zip(cars, sizes):
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < (0.7 if j == i + 1 else 0.2):
                    guard = None
                    others = [b for b in ids if b.car != car]
                    if others and rng.random() < 0.3:
                        guard = Guard(rng.choice(list(GuardKind)), rng.choice(others))
                    trans.append(Transition(BoxId(car, i), BoxId(car, j), guard))
    syncs = []
    plain = [t for t in trans if t.guard is None]
    if len({t.car for t in plain}) >= 2 and rng.random() < 0.5:
        by_car: dict[str, list[Transition]] = {}
        for t in plain:
            by_car.setdefault(t.car, []).append(t)
        chosen = rng.sample(sorted(by_car), rng.randint(2, min(3, len(by_car))))
        syncs.append(SyncGroup(tuple(rng.choice(by_car[c]) for c in chosen)))
    constraints = []
    params = [d.id for d in boxes if d.position is None]
    for b in params:
        for _ in range(rng.randint(0, 2)):
            o = rng.choice(ids)
            if o == b:
                continue
            lo, hi = (b, o) if hidden[b] <= hidden[o] else (o, b)
            if hidden[lo] == hidden[hi]:
                rel = rng.choice([Relation.EQ, Relation.LE])
            else:
                rel = rng.choice([Relation.LT, Relation.LE])
            constraints.append(PositionConstraint(lo, rel, hi))
    initial = [BoxId(car, 0) for car in cars]
    return Model.create(
        boxes=boxes, initial=initial, transitions=trans, syncs=syncs,
        lanes=lanes, constraints=constraints, cars=cars, name="rand",
    )


def random_filter(rng: random.Random, m: Model):
    pick = rng.random()
    if pick < 0.4:
        return None
    atoms = [
        lambda: DistanceBound(rng.randint(1, 4)),
        lambda: RequireCollision(),
        lambda: ForbidCollision(),
        lambda: Occupancy(rng.choice(m.box_ids)),
    ]
    if pick < 0.85:
        return rng.choice(atoms)()
    return AllOf((rng.choice(atoms)(), rng.choice(atoms)()))


def random_formula(rng: random.Random, nvars: int, depth: int = 4):
    from cpd.encode import FALSE, TRUE, Var, conj, disj, iff, neg

    def go(d: int):
        r = rng.random()
        if d == 0 or r < 0.2:
            if rng.random() < 0.05:
                return rng.choice([TRUE, FALSE])
            return Var(f"x{rng.randrange(nvars)}")
        if r < 0.35:
            return neg(go(d - 1))
        if r < 0.6:
            return conj(*(go(d - 1) for _ in range(rng.randint(2, 3))))
        if r < 0.85:
            return disj(*(go(d - 1) for _ in range(rng.randint(2, 3))))
        return iff(go(d - 1), go(d - 1))

    return go(depth)


def truth_table(f, names):
    from itertools import product

    from cpd.encode import evaluate

    return [env for vals in product((False, True), repeat=len(names))
            for env in [dict(zip(names, vals))] if evaluate(f, env)]
