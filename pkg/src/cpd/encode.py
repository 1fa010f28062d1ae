"""Propositional encoding of bounded CPD runs and its Tseitin CNF form.

``s_j[b]`` (a :class:`StepVar`) holds when box ``b`` carries its car's token
at step ``j``.  One step of the model is the disjunction of every
individually firing transition, every sync group, and the stutter case that
is only possible when nothing is enabled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

from .analyze import (
    AllOf,
    DistanceBound,
    ForbidCollision,
    Occupancy,
    RequireCollision,
    SceneFilter,
    collision_pairs,
    far_pairs,
)
from .core import BoxId, GuardKind, Model, Transition


@dataclass(frozen=True, order=True)
class StepVar:
    step: int
    box: BoxId

    def __str__(self) -> str:
        return f"s{self.step}[{self.box}]"


class Formula:
    __slots__ = ("_hash",)

    def __and__(self, other: "Formula") -> "Formula":
        return conj(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return disj(self, other)

    def __invert__(self) -> "Formula":
        return neg(self)

    def __hash__(self) -> int:
        return self._hash

    def __init_subclass__(cls, **kw) -> None:
        super().__init_subclass__(**kw)
        # defining __eq__ in a subclass would otherwise reset __hash__ to None
        cls.__hash__ = Formula.__hash__

    def size(self) -> int:
        """Number of distinct nodes in the formula DAG."""
        seen: set[int] = set()
        stack: list[Formula] = [self]
        while stack:
            f = stack.pop()
            if id(f) in seen:
                continue
            seen.add(id(f))
            stack.extend(f.children())
        return len(seen)

    def children(self) -> tuple["Formula", ...]:
        return ()


class Const(Formula):
    __slots__ = ("value",)

    def __init__(self, value: bool):
        self.value = value
        self._hash = hash(("const", value))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Const) and other.value == self.value

    def __repr__(self) -> str:
        return "True" if self.value else "False"

    def evaluate(self, env: Mapping) -> bool:
        return self.value


TRUE = Const(True)
FALSE = Const(False)


class Var(Formula):
    __slots__ = ("key",)

    def __init__(self, key: Hashable):
        self.key = key
        self._hash = hash(("var", key))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Var) and other.key == self.key

    def __repr__(self) -> str:
        return str(self.key)

    def evaluate(self, env: Mapping) -> bool:
        return env[self.key]


class Not(Formula):
    __slots__ = ("arg",)

    def __init__(self, arg: Formula):
        self.arg = arg
        self._hash = hash(("not", arg))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Not) and other._hash == self._hash and other.arg == self.arg

    def __repr__(self) -> str:
        return f"~{self.arg!r}"

    def children(self) -> tuple[Formula, ...]:
        return (self.arg,)

    def evaluate(self, env: Mapping) -> bool:
        return not self.arg.evaluate(env)


class _NAry(Formula):
    __slots__ = ("args",)
    op = ""

    def __init__(self, args: Iterable[Formula]):
        self.args = tuple(args)
        self._hash = hash((self.op, self.args))

    def __eq__(self, other: object) -> bool:
        return (
            type(other) is type(self)
            and other._hash == self._hash
            and other.args == self.args
        )

    def __repr__(self) -> str:
        return "(" + f" {self.op} ".join(repr(a) for a in self.args) + ")"

    def children(self) -> tuple[Formula, ...]:
        return self.args


class And(_NAry):
    __slots__ = ()
    op = "&"

    def evaluate(self, env: Mapping) -> bool:
        return all(a.evaluate(env) for a in self.args)


class Or(_NAry):
    __slots__ = ()
    op = "|"

    def evaluate(self, env: Mapping) -> bool:
        return any(a.evaluate(env) for a in self.args)


class Iff(Formula):
    __slots__ = ("a", "b")

    def __init__(self, a: Formula, b: Formula):
        self.a, self.b = a, b
        self._hash = hash(("iff", a, b))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Iff)
            and other._hash == self._hash
            and other.a == self.a
            and other.b == self.b
        )

    def __repr__(self) -> str:
        return f"({self.a!r} <-> {self.b!r})"

    def children(self) -> tuple[Formula, ...]:
        return (self.a, self.b)

    def evaluate(self, env: Mapping) -> bool:
        return self.a.evaluate(env) == self.b.evaluate(env)


def _flatten(cls, parts, unit, zero):
    out: dict[Formula, None] = {}
    for p in parts:
        if p == unit:
            continue
        if p == zero:
            return None
        if type(p) is cls:
            out.update(dict.fromkeys(p.args))
        else:
            out[p] = None
    return list(out)


def conj(*parts: Formula) -> Formula:
    args = _flatten(And, parts, TRUE, FALSE)
    if args is None:
        return FALSE
    if not args:
        return TRUE
    return args[0] if len(args) == 1 else And(args)


def disj(*parts: Formula) -> Formula:
    args = _flatten(Or, parts, FALSE, TRUE)
    if args is None:
        return TRUE
    if not args:
        return FALSE
    return args[0] if len(args) == 1 else Or(args)


def neg(f: Formula) -> Formula:
    if isinstance(f, Const):
        return FALSE if f.value else TRUE
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def iff(a: Formula, b: Formula) -> Formula:
    return Iff(a, b)


def evaluate(f: Formula, env: Mapping) -> bool:
    return f.evaluate(env)


# ---------------------------------------------------------------------------
# model encoding


class _Vars:
    def __init__(self) -> None:
        self._cache: dict[tuple[int, BoxId], Var] = {}

    def __call__(self, step: int, box: BoxId) -> Var:
        v = self._cache.get((step, box))
        if v is None:
            v = self._cache[(step, box)] = Var(StepVar(step, box))
        return v


def encode_initial(m: Model, _s: _Vars | None = None) -> Formula:
    s = _s or _Vars()
    init = set(m.initial)
    return conj(*(s(0, b) if b in init else neg(s(0, b)) for b in m.box_ids))


def _frame(m: Model, j: int, s: _Vars, touched: set[BoxId]) -> list[Formula]:
    return [iff(s(j, b), s(j + 1, b)) for b in m.box_ids if b not in touched]


def _move(t: Transition, j: int, s: _Vars) -> list[Formula]:
    parts = [s(j, t.src)]
    if t.src != t.dst:
        parts.append(neg(s(j + 1, t.src)))
    parts.append(s(j + 1, t.dst))
    return parts


def _guard_lit(t: Transition, j: int, s: _Vars) -> list[Formula]:
    if t.guard is None:
        return []
    v = s(j, t.guard.box)
    return [v if t.guard.kind is GuardKind.EXISTS else neg(v)]


def transition_formula(m: Model, t: Transition, j: int, _s: _Vars | None = None) -> Formula:
    """One transition firing alone between steps ``j`` and ``j+1``."""
    s = _s or _Vars()
    return conj(*_guard_lit(t, j, s), *_move(t, j, s), *_frame(m, j, s, {t.src, t.dst}))


def sync_formula(m: Model, g, j: int, _s: _Vars | None = None) -> Formula:
    s = _s or _Vars()
    parts: list[Formula] = []
    touched: set[BoxId] = set()
    for t in g.members:
        parts += _move(t, j, s)
        touched |= {t.src, t.dst}
    return conj(*parts, *_frame(m, j, s, touched))


def _disabled(m: Model, j: int, s: _Vars) -> list[Formula]:
    parts: list[Formula] = []
    for t in m.single_transitions:
        src = s(j, t.src)
        if t.guard is None:
            parts.append(neg(src))
        else:
            parts.append(disj(neg(src), neg(_guard_lit(t, j, s)[0])))
    for g in m.syncs:
        parts.append(disj(*(neg(s(j, t.src)) for t in g.members)))
    return parts


def stutter_formula(m: Model, j: int, _s: _Vars | None = None) -> Formula:
    s = _s or _Vars()
    return conj(*_frame(m, j, s, set()), *_disabled(m, j, s))


def encode_enabled(m: Model, j: int, _s: _Vars | None = None) -> Formula:
    """Some firing is enabled in the scene at step ``j``."""
    s = _s or _Vars()
    return neg(conj(*_disabled(m, j, s)))


def encode_step(m: Model, j: int, _s: _Vars | None = None) -> Formula:
    s = _s or _Vars()
    parts = [transition_formula(m, t, j, s) for t in m.single_transitions]
    parts += [sync_formula(m, g, j, s) for g in m.syncs]
    parts.append(stutter_formula(m, j, s))
    return disj(*parts)


def encode_unrolled(m: Model, k: int, _s: _Vars | None = None) -> Formula:
    if k < 0:
        raise ValueError("bound must be non-negative")
    s = _s or _Vars()
    return conj(encode_initial(m, s), *(encode_step(m, j, s) for j in range(k)))


def encode_filter(m: Model, f: SceneFilter, k: int, _s: _Vars | None = None) -> Formula:
    s = _s or _Vars()
    steps = range(k + 1)
    if isinstance(f, AllOf):
        return conj(*(encode_filter(m, g, k, s) for g in f.filters))
    if isinstance(f, DistanceBound):
        pairs = far_pairs(m, f.d)
        return conj(*(disj(neg(s(j, a)), neg(s(j, b))) for j in steps for a, b in pairs))
    if isinstance(f, Occupancy):
        return disj(*(s(j, f.box) for j in steps))
    pairs = sorted(collision_pairs(m))
    if isinstance(f, RequireCollision):
        return disj(*(conj(s(j, a), s(j, b)) for j in steps for a, b in pairs))
    if isinstance(f, ForbidCollision):
        return conj(*(disj(neg(s(j, a)), neg(s(j, b))) for j in steps for a, b in pairs))
    raise TypeError(f"unknown filter {f!r}")


# ---------------------------------------------------------------------------
# CNF


@dataclass
class CNF:
    num_vars: int
    clauses: list[list[int]]
    var_map: dict[Hashable, int] = field(default_factory=dict)

    @property
    def inverse(self) -> dict[int, Hashable]:
        return {v: k for k, v in self.var_map.items()}


def _collect_vars(f: Formula) -> list[Hashable]:
    seen: set[int] = set()
    keys: dict[Hashable, None] = {}
    stack = [f]
    while stack:
        g = stack.pop()
        if id(g) in seen:
            continue
        seen.add(id(g))
        if isinstance(g, Var):
            keys[g.key] = None
        else:
            stack.extend(g.children())
    try:
        return sorted(keys)
    except TypeError:
        return sorted(keys, key=repr)


def to_cnf(f: Formula, keys: Iterable[Hashable] | None = None) -> CNF:
    """Tseitin transformation.

    Named variables get ids ``1..n`` in sorted key order (or the order of
    ``keys``, if given); every inner connective gets one auxiliary variable
    with full equivalence clauses, shared between structurally equal nodes.
    Top-level conjunctions and disjunctions are asserted directly.
    """
    var_map: dict[Hashable, int] = {}
    for key in list(keys or ()) + _collect_vars(f):
        if key not in var_map:
            var_map[key] = len(var_map) + 1
    clauses: list[list[int]] = []
    cache: dict[Formula, int] = {}
    counter = [len(var_map)]

    def fresh() -> int:
        counter[0] += 1
        return counter[0]

    def add(clause: list[int]) -> None:
        lits = list(dict.fromkeys(clause))
        if any(-x in lits for x in lits):
            return
        clauses.append(lits)

    def lit(g: Formula) -> int:
        if isinstance(g, Var):
            return var_map[g.key]
        if isinstance(g, Not):
            return -lit(g.arg)
        x = cache.get(g)
        if x is not None:
            return x
        if isinstance(g, Const):
            x = fresh()
            add([x] if g.value else [-x])
        elif isinstance(g, And):
            cs = [lit(a) for a in g.args]
            x = fresh()
            for c in cs:
                add([-x, c])
            add([x, *(-c for c in cs)])
        elif isinstance(g, Or):
            cs = [lit(a) for a in g.args]
            x = fresh()
            for c in cs:
                add([x, -c])
            add([-x, *cs])
        elif isinstance(g, Iff):
            a, b = lit(g.a), lit(g.b)
            x = fresh()
            add([-x, -a, b])
            add([-x, a, -b])
            add([x, a, b])
            add([x, -a, -b])
        else:
            raise TypeError(f"not a formula: {g!r}")
        cache[g] = x
        return x

    def assert_(g: Formula) -> None:
        if isinstance(g, And):
            for a in g.args:
                assert_(a)
        elif isinstance(g, Or):
            add([lit(a) for a in g.args])
        elif isinstance(g, Iff):
            a, b = lit(g.a), lit(g.b)
            add([-a, b])
            add([a, -b])
        elif isinstance(g, Const):
            if not g.value:
                clauses.append([])
        else:
            add([lit(g)])

    assert_(f)
    return CNF(num_vars=counter[0], clauses=clauses, var_map=var_map)


def step_keys(m: Model, k: int) -> list[StepVar]:
    """All step variables for steps ``0..k`` in canonical numbering order."""
    return [StepVar(j, b) for j in range(k + 1) for b in m.box_ids]


def blocking_clause(assignment: Mapping[int, bool]) -> list[int]:
    """The clause falsified by exactly this assignment of the given variables."""
    return [-v if val else v for v, val in sorted(assignment.items())]
