"""Domain model of a car position diagram and its token-game semantics.

A model is a set of per-car transition graphs over boxes.  Each car holds
exactly one token; a scene (``Configuration``) records which box every car
occupies, and a scenario is a maximal sequence of scenes obtained by firing
enabled transitions one step at a time.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping


class ModelError(ValueError):
    """Raised when an operation's precondition on the model is violated."""


class CyclicModelError(ModelError):
    """The per-car transition graphs contain a cycle; a bound must be supplied."""


class FiringError(ValueError):
    """Raised when a firing is applied to a configuration where it is not enabled."""


@dataclass(frozen=True, order=True)
class BoxId:
    car: str
    index: int

    def __str__(self) -> str:
        return f"{self.car}.{self.index}"

    @classmethod
    def parse(cls, text: str) -> "BoxId":
        car, _, idx = text.strip().rpartition(".")
        if not car or not idx.isdigit():
            raise ValueError(f"not a box reference: {text!r}")
        return cls(car, int(idx))


@dataclass(frozen=True)
class BoxDecl:
    """A box, its lane, and its position (``None`` marks a parametric box)."""

    id: BoxId
    lane: str
    position: int | None = None

    @property
    def parametric(self) -> bool:
        return self.position is None


class GuardKind(enum.Enum):
    EXISTS = "exists"
    ABSENT = "absent"

    def __lt__(self, other: "GuardKind") -> bool:
        return self.value < other.value


@dataclass(frozen=True, order=True)
class Guard:
    kind: GuardKind
    box: BoxId

    def holds(self, occupied: bool) -> bool:
        return occupied if self.kind is GuardKind.EXISTS else not occupied

    def __str__(self) -> str:
        return f"when {self.kind.value} {self.box}"


@dataclass(frozen=True)
class Transition:
    src: BoxId
    dst: BoxId
    guard: Guard | None = None

    def sort_key(self) -> tuple:
        g = self.guard
        return (self.src, self.dst, () if g is None else (g.kind.value, g.box))

    def __lt__(self, other: "Transition") -> bool:
        return self.sort_key() < other.sort_key()

    @property
    def car(self) -> str:
        return self.src.car

    def __str__(self) -> str:
        s = f"{self.src} -> {self.dst}"
        return f"{s} {self.guard}" if self.guard else s


@dataclass(frozen=True)
class SyncGroup:
    """Transitions that fire together in a single step."""

    members: tuple[Transition, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", tuple(sorted(set(self.members))))

    def __lt__(self, other: "SyncGroup") -> bool:
        return [t.sort_key() for t in self.members] < [t.sort_key() for t in other.members]

    def __str__(self) -> str:
        return "{" + ", ".join(str(t) for t in self.members) + "}"


class Relation(enum.Enum):
    LT = "<"
    LE = "<="
    EQ = "="


@dataclass(frozen=True)
class PositionConstraint:
    lhs: BoxId
    rel: Relation
    rhs: BoxId

    def holds(self, a: int, b: int) -> bool:
        if self.rel is Relation.LT:
            return a < b
        if self.rel is Relation.LE:
            return a <= b
        return a == b

    def __str__(self) -> str:
        return f"pos({self.lhs}) {self.rel.value} pos({self.rhs})"


@dataclass(frozen=True)
class Model:
    """An immutable CPD.  Build instances with :meth:`Model.create`."""

    name: str
    cars: tuple[str, ...]
    lanes: tuple[str, ...]
    boxes: tuple[BoxDecl, ...]
    transitions: tuple[Transition, ...]
    syncs: tuple[SyncGroup, ...]
    initial: tuple[BoxId, ...]
    constraints: tuple[PositionConstraint, ...] = ()

    @classmethod
    def create(
        cls,
        *,
        boxes: Iterable[BoxDecl],
        initial: Iterable[BoxId] | Mapping[str, BoxId],
        transitions: Iterable[Transition] = (),
        syncs: Iterable[SyncGroup] = (),
        lanes: Iterable[str] | None = None,
        constraints: Iterable[PositionConstraint] = (),
        cars: Iterable[str] | None = None,
        name: str = "cpd",
    ) -> "Model":
        """Canonicalise the parts into a model.

        Cars are sorted, boxes sorted by id, transitions sorted and
        deduplicated; sync members are added to the transition set.  Lanes and
        constraints keep their given order.  No validation happens here.
        """
        boxes = sorted(boxes, key=lambda b: (b.id, b.lane, b.position is None, b.position or 0))
        syncs = sorted(set(syncs))
        trans = set(transitions)
        for g in syncs:
            trans.update(g.members)
        if isinstance(initial, Mapping):
            initial = initial.values()
        initial = sorted(initial)
        if cars is None:
            cars = {b.id.car for b in boxes} | {b.car for b in initial}
        if lanes is None:
            lanes = dict.fromkeys(b.lane for b in boxes)
        return cls(
            name=name,
            cars=tuple(sorted(set(cars))),
            lanes=tuple(dict.fromkeys(lanes)),
            boxes=tuple(boxes),
            transitions=tuple(sorted(trans)),
            syncs=tuple(syncs),
            initial=tuple(initial),
            constraints=tuple(constraints),
        )

    # lookups; cached_property writes through __dict__ so frozen is fine

    @cached_property
    def box_ids(self) -> tuple[BoxId, ...]:
        return tuple(b.id for b in self.boxes)

    @cached_property
    def decl(self) -> dict[BoxId, BoxDecl]:
        return {b.id: b for b in self.boxes}

    @cached_property
    def boxes_of(self) -> dict[str, tuple[BoxId, ...]]:
        out: dict[str, list[BoxId]] = {c: [] for c in self.cars}
        for b in self.boxes:
            out.setdefault(b.id.car, []).append(b.id)
        return {c: tuple(v) for c, v in out.items()}

    @cached_property
    def initial_of(self) -> dict[str, BoxId]:
        return {b.car: b for b in self.initial}

    @cached_property
    def sync_members(self) -> frozenset[Transition]:
        return frozenset(t for g in self.syncs for t in g.members)

    @cached_property
    def single_transitions(self) -> tuple[Transition, ...]:
        """Transitions that may fire on their own (i.e. not in any sync group)."""
        return tuple(t for t in self.transitions if t not in self.sync_members)

    @cached_property
    def car_index(self) -> dict[str, int]:
        return {c: i for i, c in enumerate(self.cars)}

    def initial_configuration(self) -> "Configuration":
        return Configuration(tuple(self.initial_of[c] for c in self.cars))

    def is_cyclic(self) -> bool:
        return bool(_cyclic_cars(self))


@dataclass(frozen=True, order=True)
class Configuration:
    """One occupied box per car, ordered like ``Model.cars``."""

    boxes: tuple[BoxId, ...]

    def __contains__(self, box: object) -> bool:
        return box in self.boxes

    def box_of(self, car: str) -> BoxId:
        for b in self.boxes:
            if b.car == car:
                return b
        raise KeyError(car)

    def as_dict(self) -> dict[str, BoxId]:
        return {b.car: b for b in self.boxes}

    def __str__(self) -> str:
        return "{" + ", ".join(str(b) for b in self.boxes) + "}"


@dataclass(frozen=True)
class Single:
    transition: Transition

    @property
    def moves(self) -> tuple[Transition, ...]:
        return (self.transition,)


@dataclass(frozen=True)
class Sync:
    group: SyncGroup

    @property
    def moves(self) -> tuple[Transition, ...]:
        return self.group.members


Firing = Single | Sync


@dataclass(frozen=True, order=True)
class Scenario:
    scenes: tuple[Configuration, ...]

    def __len__(self) -> int:
        return len(self.scenes)

    def __iter__(self):
        return iter(self.scenes)

    def __str__(self) -> str:
        return " ; ".join(str(s) for s in self.scenes)


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def __str__(self) -> str:
        lines = [f"error: {e}" for e in self.errors]
        lines += [f"warning: {w}" for w in self.warnings]
        return "\n".join(lines) if lines else "ok"


CYCLE_WARNING = "cyclic graph: enumeration requires explicit bound"


def _cyclic_cars(m: Model) -> list[str]:
    succ: dict[BoxId, set[BoxId]] = defaultdict(set)
    for t in m.transitions:
        succ[t.src].add(t.dst)
    cyclic = set()
    color: dict[BoxId, int] = {}
    for start in sorted(succ):
        if start in color:
            continue
        stack = [(start, iter(sorted(succ[start])))]
        color[start] = 1
        while stack:
            node, it = stack[-1]
            for nxt in it:
                state = color.get(nxt, 0)
                if state == 1:
                    cyclic.add(nxt.car)
                elif state == 0:
                    color[nxt] = 1
                    stack.append((nxt, iter(sorted(succ[nxt]))))
                    break
            else:
                color[node] = 2
                stack.pop()
    return sorted(cyclic)


def validate_model(m: Model) -> ValidationReport:
    rep = ValidationReport()
    err, warn = rep.errors.append, rep.warnings.append
    declared = set()
    for b in m.boxes:
        if b.id in declared:
            err(f"duplicate box {b.id}")
        declared.add(b.id)
        if b.lane not in m.lanes:
            err(f"box {b.id} is in undeclared lane {b.lane!r}")
        if b.position is not None and b.position < 0:
            err(f"box {b.id} has negative position {b.position}")
        if b.id.car not in m.cars:
            err(f"box {b.id} belongs to undeclared car {b.id.car!r}")
    if len(set(m.lanes)) != len(m.lanes):
        err("duplicate lane declaration")

    def known(box: BoxId, where: str) -> bool:
        if box not in declared:
            err(f"{where} references undeclared box {box}")
            return False
        return True

    for car in m.cars:
        inits = [b for b in m.initial if b.car == car]
        if not inits:
            err(f"car {car} has no initial box")
        elif len(inits) > 1:
            err(f"car {car} has {len(inits)} initial boxes")
    for b in m.initial:
        known(b, "initial")

    for t in m.transitions:
        known(t.src, f"transition {t}")
        known(t.dst, f"transition {t}")
        if t.src.car != t.dst.car:
            err(f"transition {t} connects boxes of different cars")
        if t.guard is not None:
            known(t.guard.box, f"transition {t}")
            if t.guard.box.car == t.src.car:
                warn(f"transition {t} is guarded on a box of its own car")

    seen_in: dict[Transition, int] = {}
    for i, g in enumerate(m.syncs):
        if len(g.members) < 2:
            err(f"sync group {g} has fewer than two members")
        cars = [t.car for t in g.members]
        if len(set(cars)) != len(cars):
            err(f"sync group {g} has two members of the same car")
        for t in g.members:
            if t.guard is not None:
                err(f"sync group {g} contains guarded transition {t}")
            if t in seen_in:
                err(f"transition {t} appears in more than one sync group")
            seen_in[t] = i

    for c in m.constraints:
        known(c.lhs, f"constraint {c}")
        known(c.rhs, f"constraint {c}")
        if c.rel is Relation.LT and c.lhs == c.rhs:
            err(f"constraint {c} is trivially unsatisfiable")

    for car in _cyclic_cars(m):
        warn(f"{CYCLE_WARNING} (car {car})")
    return rep


def _occupied(c: Configuration, box: BoxId) -> bool:
    return box in c.boxes


def enabled_firings(m: Model, c: Configuration) -> tuple[Firing, ...]:
    out: list[Firing] = []
    occ = set(c.boxes)
    for t in m.single_transitions:
        if t.src in occ and (t.guard is None or t.guard.holds(t.guard.box in occ)):
            out.append(Single(t))
    for g in m.syncs:
        if all(t.src in occ for t in g.members):
            out.append(Sync(g))
    return tuple(out)


def is_enabled(m: Model, c: Configuration, f: Firing) -> bool:
    occ = set(c.boxes)
    if isinstance(f, Sync):
        return f.group in m.syncs and all(t.src in occ for t in f.group.members)
    t = f.transition
    return (
        t in m.single_transitions
        and t.src in occ
        and (t.guard is None or t.guard.holds(t.guard.box in occ))
    )


def fire(c: Configuration, f: Firing) -> Configuration:
    """Move tokens for ``f`` without checking enabledness."""
    moved = {t.car: t.dst for t in f.moves}
    return Configuration(tuple(moved.get(b.car, b) for b in c.boxes))


def apply_firing(m: Model, c: Configuration, f: Firing) -> Configuration:
    if not is_enabled(m, c, f):
        raise FiringError(f"{f} is not enabled at {c}")
    return fire(c, f)


def successors(m: Model, c: Configuration) -> list[Configuration]:
    """Distinct configurations reachable in one firing, in firing order."""
    return list(dict.fromkeys(fire(c, f) for f in enabled_firings(m, c)))


def is_deadlocked(m: Model, c: Configuration) -> bool:
    return not enabled_firings(m, c)


def longest_run_bound(m: Model) -> int:
    """Upper bound on the number of firings in any run of an acyclic model."""
    cyclic = _cyclic_cars(m)
    if cyclic:
        raise CyclicModelError(
            f"cars {', '.join(cyclic)} have cyclic transition graphs; supply an explicit bound"
        )
    succ: dict[BoxId, list[BoxId]] = defaultdict(list)
    for t in m.transitions:
        succ[t.src].append(t.dst)
    memo: dict[BoxId, int] = {}

    def depth(b: BoxId) -> int:
        # graphs are acyclic, and chains are short enough for recursion
        if b not in memo:
            memo[b] = max((1 + depth(n) for n in succ[b]), default=0)
        return memo[b]

    return sum(depth(m.initial_of[car]) for car in m.cars if car in m.initial_of)


def all_normal_variant(m: Model, name: str | None = None) -> Model:
    """Drop every guard and dissolve every sync group into plain transitions."""
    trans = {Transition(t.src, t.dst) for t in m.transitions}
    return Model.create(
        boxes=m.boxes,
        initial=m.initial,
        transitions=trans,
        lanes=m.lanes,
        constraints=m.constraints,
        cars=m.cars,
        name=name or f"{m.name}_n",
    )
