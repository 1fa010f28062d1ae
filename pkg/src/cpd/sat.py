"""A small incremental CDCL SAT solver and DIMACS I/O.

Two-watched-literal propagation, first-UIP learning with local clause
minimisation, VSIDS branching over a lazy heap, phase saving, Luby restarts
and LBD-based learnt clause reduction.  Clauses may be added between
``solve`` calls; a clause that is falsified by the last model is analysed
like a conflict, so an all-solutions loop backjumps instead of restarting.

Internally a literal ``l`` is coded as ``2*|l| + (l < 0)``.
"""

from __future__ import annotations

import enum
import heapq
import random
import re
from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence

from .encode import CNF


class SolverError(ValueError):
    pass


class DimacsError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class Status(enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


@dataclass
class SolveResult:
    status: Status
    # assignment[v] for v in 1..num_vars; index 0 unused
    assignment: list[bool] | None = None

    @property
    def sat(self) -> bool:
        return self.status is Status.SAT

    def value(self, var: int) -> bool:
        assert self.assignment is not None
        return self.assignment[var]

    def as_dict(self) -> dict[int, bool]:
        assert self.assignment is not None
        return {v: self.assignment[v] for v in range(1, len(self.assignment))}


class Engine(Protocol):
    """Anything that can stand in for :class:`Session` in the enumeration loop."""

    num_vars: int

    def add_clause(self, lits: Iterable[int], verify: bool = True) -> None: ...

    def solve(self, conflict_budget: int | None = None) -> SolveResult: ...


def _luby(i: int) -> int:
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1


class Session:
    """Solver state for one clause database.  Not thread-safe."""

    restart_base = 100
    var_decay = 0.95

    def __init__(self, num_vars: int, clauses: Iterable[Sequence[int]] = (), seed: int = 0,
                 check_models: bool = True):
        self.num_vars = num_vars
        # re-evaluate every verified clause before returning a model
        self.check_models = check_models
        n2 = 2 * num_vars + 2
        self.vals = [0] * n2
        self.level = [0] * (num_vars + 1)
        self.reason: list[list[int] | None] = [None] * (num_vars + 1)
        self.watches: list[list[list[int]]] = [[] for _ in range(n2)]
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.phase = [2 * v + 1 for v in range(num_vars + 1)]
        self.seen = [False] * (num_vars + 1)
        self.activity = [0.0] * (num_vars + 1)
        if seed:
            rng = random.Random(seed)
            self.activity = [rng.random() * 1e-5 for _ in range(num_vars + 1)]
        self.var_inc = 1.0
        self.heap = [(-self.activity[v], v) for v in range(1, num_vars + 1)]
        heapq.heapify(self.heap)
        self.clauses: list[list[int]] = []
        self.learnts: list[list[int]] = []
        self.lbd: dict[int, int] = {}
        self.max_learnts = 4000
        self._check: list[list[int]] = []
        self.ok = True
        self.conflicts = 0
        self.decisions = 0
        self.propagations = 0
        self.solves = 0
        self._restarts = 0
        self._since_restart = 0
        self._restart_limit = self.restart_base
        for c in clauses:
            self.add_clause(c)

    # -- clause management -------------------------------------------------

    def _code(self, lit: int) -> int:
        if lit == 0 or abs(lit) > self.num_vars:
            raise SolverError(f"literal {lit} out of range 1..{self.num_vars}")
        return 2 * lit if lit > 0 else -2 * lit + 1

    def add_clause(self, lits: Iterable[int], verify: bool = True) -> None:
        """Permanently add a clause.

        With ``verify`` set, every later model is checked against it before
        being returned.
        """
        coded = list(dict.fromkeys(self._code(l) for l in lits))
        if any(c ^ 1 in coded for c in coded):
            return
        if verify:
            self._check.append(coded)
        if not self.ok:
            return
        vals = self.vals
        if self.trail_lim:
            if len(coded) > 1 and all(vals[c] == -1 for c in coded):
                self._add_falsified(coded)
                return
            self._cancel_until(0)
        self._add_at_root(coded)

    def _add_at_root(self, coded: list[int]) -> None:
        vals = self.vals
        if any(vals[c] == 1 for c in coded):
            return
        live = [c for c in coded if vals[c] == 0]
        if not live:
            self.ok = False
        elif len(live) == 1:
            self._enqueue(live[0], None)
            if self._propagate() is not None:
                self.ok = False
        else:
            self.clauses.append(live)
            self.watches[live[0]].append(live)
            self.watches[live[1]].append(live)

    def _add_falsified(self, c: list[int]) -> None:
        level = self.level
        c.sort(key=lambda l: -level[l >> 1])
        top = level[c[0] >> 1]
        if top == 0:
            self.ok = False
            return
        self._cancel_until(top)
        self.clauses.append(c)
        self.watches[c[0]].append(c)
        self.watches[c[1]].append(c)
        if level[c[1] >> 1] < top:
            self._cancel_until(level[c[1] >> 1])
            self._enqueue(c[0], c)
        else:
            self._learn(c)

    def _enqueue(self, lit: int, reason: list[int] | None) -> None:
        self.vals[lit] = 1
        self.vals[lit ^ 1] = -1
        v = lit >> 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    # -- search -------------------------------------------------------------

    def _propagate(self) -> list[int] | None:
        vals = self.vals
        watches = self.watches
        trail = self.trail
        level = self.level
        reason = self.reason
        dl = len(self.trail_lim)
        qhead = self.qhead
        while qhead < len(trail):
            fl = trail[qhead] ^ 1
            qhead += 1
            ws = watches[fl]
            if not ws:
                continue
            keep = []
            i = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                c0 = c[0]
                if c0 == fl:
                    c0 = c[1]
                    c[0] = c0
                    c[1] = fl
                if vals[c0] == 1:
                    keep.append(c)
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if vals[lk] != -1:
                        c[1] = lk
                        c[k] = fl
                        watches[lk].append(c)
                        break
                else:
                    keep.append(c)
                    if vals[c0] == -1:
                        keep.extend(ws[i:])
                        watches[fl] = keep
                        self.propagations += qhead - self.qhead
                        self.qhead = len(trail)
                        return c
                    vals[c0] = 1
                    vals[c0 ^ 1] = -1
                    v = c0 >> 1
                    level[v] = dl
                    reason[v] = c
                    trail.append(c0)
            watches[fl] = keep
        self.propagations += qhead - self.qhead
        self.qhead = qhead
        return None

    def _bump(self, v: int) -> None:
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for i in range(len(act)):
                act[i] *= 1e-100
            self.var_inc *= 1e-100
            self._rebuild_heap()
        elif self.vals[2 * v] == 0:
            heapq.heappush(self.heap, (-act[v], v))

    def _rebuild_heap(self) -> None:
        vals, act = self.vals, self.activity
        self.heap = [(-act[v], v) for v in range(1, self.num_vars + 1) if vals[2 * v] == 0]
        heapq.heapify(self.heap)

    def _analyze(self, confl: list[int]) -> tuple[list[int], int]:
        seen = self.seen
        level = self.level
        reason = self.reason
        trail = self.trail
        dl = len(self.trail_lim)
        learnt = [0]
        marked = []
        path = 0
        p = -1
        idx = len(trail) - 1
        clause = confl
        start = 0
        while True:
            for k in range(start, len(clause)):
                q = clause[k]
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    marked.append(v)
                    self._bump(v)
                    if level[v] >= dl:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            seen[p >> 1] = False
            clause = reason[p >> 1]
            start = 1
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1
        # drop literals implied by the rest of the clause
        out = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r is None or not all(seen[x >> 1] or level[x >> 1] == 0 for x in r[1:]):
                out.append(q)
        for v in marked:
            seen[v] = False
        bt = 0
        if len(out) > 1:
            best = 1
            for k in range(2, len(out)):
                if level[out[k] >> 1] > level[out[best] >> 1]:
                    best = k
            out[1], out[best] = out[best], out[1]
            bt = level[out[1] >> 1]
        self.var_inc /= self.var_decay
        return out, bt

    def _learn(self, confl: list[int]) -> None:
        learnt, bt = self._analyze(confl)
        self._cancel_until(bt)
        if len(learnt) == 1:
            self._enqueue(learnt[0], None)
            return
        self.learnts.append(learnt)
        self.lbd[id(learnt)] = len({self.level[l >> 1] for l in learnt})
        self.watches[learnt[0]].append(learnt)
        self.watches[learnt[1]].append(learnt)
        self._enqueue(learnt[0], learnt)

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        lim = self.trail_lim[lvl]
        vals, reason, phase, act = self.vals, self.reason, self.phase, self.activity
        heap = self.heap
        push = heapq.heappush
        trail = self.trail
        for i in range(len(trail) - 1, lim - 1, -1):
            p = trail[i]
            v = p >> 1
            vals[p] = 0
            vals[p ^ 1] = 0
            reason[v] = None
            phase[v] = p
            push(heap, (-act[v], v))
        del trail[lim:]
        del self.trail_lim[lvl:]
        self.qhead = lim
        if len(heap) > 4 * self.num_vars + 64:
            self._rebuild_heap()

    def _pick(self) -> int:
        heap, vals, act = self.heap, self.vals, self.activity
        while heap:
            a, v = heapq.heappop(heap)
            if vals[2 * v] == 0 and -a == act[v]:
                return v
        return 0

    def _reduce(self) -> None:
        """Drop the less useful half of the learnt clauses (called at level 0)."""
        lbd = self.lbd
        keep, cand = [], []
        for c in self.learnts:
            (keep if lbd.get(id(c), 99) <= 2 else cand).append(c)
        cand.sort(key=lambda c: (lbd.get(id(c), 99), len(c)))
        keep += cand[: len(cand) // 2]
        dropped = {id(c) for c in cand[len(cand) // 2:]}
        self.learnts = keep
        self.lbd = {id(c): lbd[id(c)] for c in keep if id(c) in lbd}
        self.max_learnts = int(self.max_learnts * 1.1)
        vals = self.vals
        self.watches = [[] for _ in range(len(vals))]
        live = []
        for c in self.clauses + self.learnts:
            if any(vals[l] == 1 for l in c):
                continue
            c.sort(key=lambda l: vals[l] == -1)
            live.append(c)
            self.watches[c[0]].append(c)
            self.watches[c[1]].append(c)
        learnt_ids = {id(c) for c in self.learnts}
        self.clauses = [c for c in live if id(c) not in learnt_ids and id(c) not in dropped]
        self.learnts = [c for c in live if id(c) in learnt_ids]

    def _verify(self) -> bool:
        vals = self.vals
        for c in self._check:
            if vals[c[0]] != 1 and not any(vals[l] == 1 for l in c):
                return False
        return True

    def solve(self, conflict_budget: int | None = None) -> SolveResult:
        """Search for a model of all clauses added so far.

        Returns ``UNKNOWN`` when ``conflict_budget`` conflicts have been spent.
        The trail is kept after a SAT answer so that a following
        :meth:`add_clause` can backjump from it.
        """
        self.solves += 1
        if not self.ok:
            return SolveResult(Status.UNSAT)
        spent = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                spent += 1
                self._since_restart += 1
                if not self.trail_lim:
                    self.ok = False
                    return SolveResult(Status.UNSAT)
                self._learn(confl)
                if conflict_budget is not None and spent >= conflict_budget:
                    self._cancel_until(0)
                    return SolveResult(Status.UNKNOWN)
                if self._since_restart >= self._restart_limit:
                    self._restarts += 1
                    self._since_restart = 0
                    self._restart_limit = self.restart_base * _luby(self._restarts + 1)
                    self._cancel_until(0)
                    if len(self.learnts) > self.max_learnts:
                        if self._propagate() is not None:
                            self.ok = False
                            return SolveResult(Status.UNSAT)
                        self._reduce()
                continue
            v = self._pick()
            if v == 0:
                if self.check_models and not self._verify():
                    raise SolverError("internal error: model violates a clause")
                vals = self.vals
                return SolveResult(Status.SAT, [False] + [vals[2 * i] == 1 for i in range(1, self.num_vars + 1)])
            self.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(self.phase[v], None)


def new_session(cnf: CNF, seed: int = 0) -> Session:
    return Session(cnf.num_vars, cnf.clauses, seed=seed)


def solve_cnf(cnf: CNF, seed: int = 0) -> SolveResult:
    return new_session(cnf, seed=seed).solve()


# -- DIMACS -----------------------------------------------------------------


def export_dimacs(cnf: CNF, comments: Iterable[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {cnf.num_vars} {len(cnf.clauses)}")
    lines += [" ".join(map(str, [*c, 0])) for c in cnf.clauses]
    return "\n".join(lines) + "\n"


def import_dimacs(text: str) -> CNF:
    header = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            if header is not None:
                raise DimacsError(no, "duplicate header")
            m = re.fullmatch(r"p\s+cnf\s+(\d+)\s+(\d+)", line)
            if not m:
                raise DimacsError(no, f"malformed header {line!r}")
            header = (int(m.group(1)), int(m.group(2)))
            continue
        if header is None:
            raise DimacsError(no, "clause before header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(no, f"bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(current)
                current = []
            elif abs(lit) > header[0]:
                raise DimacsError(no, f"literal {lit} exceeds declared {header[0]} variables")
            else:
                current.append(lit)
    if header is None:
        raise DimacsError(0, "missing header")
    if current:
        clauses.append(current)
    if len(clauses) != header[1]:
        raise DimacsError(0, f"header declares {header[1]} clauses, found {len(clauses)}")
    return CNF(num_vars=header[0], clauses=clauses)
