import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from cpd.encode import CNF
from cpd.sat import DimacsError, Session, SolverError, Status, export_dimacs, import_dimacs


def brute(n, clauses):
    sols = []
    for vals in itertools.product((False, True), repeat=n):
        if all(any(vals[abs(l) - 1] == (l > 0) for l in c) for c in clauses):
            sols.append(vals)
    return sols


def random_cnf(rng, n, m, width=3):
    return [[rng.choice((1, -1)) * rng.randint(1, n) for _ in range(rng.randint(1, width))]
            for _ in range(m)]


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**6))
def test_matches_brute_force(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 9)
    clauses = random_cnf(rng, n, rng.randint(1, 5 * n))
    sols = brute(n, clauses)
    s = Session(n, clauses, seed=seed % 3)
    found = set()
    while (r := s.solve()).sat:
        vals = tuple(r.assignment[1:])
        assert vals in sols and vals not in found
        found.add(vals)
        s.add_clause([-(v + 1) if x else v + 1 for v, x in enumerate(vals)], verify=False)
    assert found == set(sols)


def test_pigeonhole_4_into_3():
    var = lambda p, h: p * 3 + h + 1
    clauses = [[var(p, h) for h in range(3)] for p in range(4)]
    clauses += [[-var(p, h), -var(q, h)] for h in range(3) for p, q in itertools.combinations(range(4), 2)]
    s = Session(12, clauses)
    assert s.solve().status is Status.UNSAT
    assert s.conflicts > 0


def test_conflict_budget_gives_unknown():
    var = lambda p, h: p * 5 + h + 1
    clauses = [[var(p, h) for h in range(5)] for p in range(6)]
    clauses += [[-var(p, h), -var(q, h)] for h in range(5) for p, q in itertools.combinations(range(6), 2)]
    s = Session(30, clauses)
    assert s.solve(conflict_budget=3).status is Status.UNKNOWN
    assert s.solve().status is Status.UNSAT


def test_incremental_add_after_sat():
    s = Session(3, [[1, 2, 3]])
    r = s.solve()
    assert r.sat
    s.add_clause([-1])
    s.add_clause([-2])
    r = s.solve()
    assert r.sat and r.value(3) and not r.value(1)
    s.add_clause([-3])
    assert s.solve().status is Status.UNSAT


def test_verification_catches_corruption():
    s = Session(2, [[1], [2]])
    assert s.solve().sat
    s._check.append([s._code(-1)])  # a clause the solver never saw
    with pytest.raises(SolverError):
        s.solve()


def test_bad_literal():
    with pytest.raises(SolverError):
        Session(2, [[3]])


def test_empty_clause_is_unsat():
    assert Session(1, [[]]).solve().status is Status.UNSAT


def test_dimacs_round_trip():
    cnf = CNF(num_vars=3, clauses=[[1, -2], [2, 3], [-1]])
    text = export_dimacs(cnf, ["hello"])
    assert text.splitlines()[:2] == ["c hello", "p cnf 3 3"]
    back = import_dimacs(text)
    assert back.num_vars == 3 and back.clauses == cnf.clauses


@pytest.mark.parametrize(
    "text, line",
    [
        ("1 2 0\n", 1),
        ("p cnf 2 1\n1 x 0\n", 2),
        ("p cnf 2 1\n1 5 0\n", 2),
        ("p cnf 2 2\n1 0\n", 0),
        ("p cnf two 1\n", 1),
    ],
)
def test_dimacs_errors(text, line):
    with pytest.raises(DimacsError) as ei:
        import_dimacs(text)
    assert ei.value.line == line
