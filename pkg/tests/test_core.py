import pytest

from cpd.core import (
    BoxDecl,
    BoxId,
    Configuration,
    CyclicModelError,
    FiringError,
    Guard,
    GuardKind,
    Model,
    Single,
    Sync,
    SyncGroup,
    Transition,
    all_normal_variant,
    apply_firing,
    enabled_firings,
    is_deadlocked,
    longest_run_bound,
    successors,
    validate_model,
)
from cpd.models import bench, load_builtin

B = BoxId.parse


def conf(*names):
    return Configuration(tuple(B(n) for n in names))


def test_boxid_parse_and_order():
    assert B("LCar.3") == BoxId("LCar", 3)
    assert str(BoxId("RCar", 0)) == "RCar.0"
    assert BoxId("A", 2) < BoxId("A", 10) < BoxId("B", 0)
    with pytest.raises(ValueError):
        B("LCar")


def test_fig2_firings(fig2):
    c0 = fig2.initial_configuration()
    assert c0 == conf("LCar.0", "RCar.0")
    assert len(enabled_firings(fig2, c0)) == 2
    end = conf("LCar.2", "RCar.2")
    assert is_deadlocked(fig2, end)
    assert successors(fig2, c0) == [conf("LCar.1", "RCar.0"), conf("LCar.0", "RCar.1")]


def test_apply_rejects_disabled(fig2):
    t = Transition(B("LCar.1"), B("LCar.2"))
    with pytest.raises(FiringError):
        apply_firing(fig2, fig2.initial_configuration(), Single(t))


@pytest.mark.parametrize(
    "name, rcar, enabled",
    [
        ("fig3_exists", "RCar.0", True),
        ("fig3_exists", "RCar.1", False),
        ("fig3_absent", "RCar.0", False),
        ("fig3_absent", "RCar.1", True),
    ],
)
def test_guard_truth_table(name, rcar, enabled):
    m = load_builtin(name)
    t = next(t for t in m.transitions if t.car == "LCar")
    fired = [f for f in enabled_firings(m, conf("LCar.0", rcar)) if f == Single(t)]
    assert bool(fired) is enabled


def test_sync_fires_atomically():
    m = load_builtin("fig3_sync")
    (f,) = enabled_firings(m, m.initial_configuration())
    assert isinstance(f, Sync)
    assert apply_firing(m, m.initial_configuration(), f) == conf("LCar.1", "RCar.1")
    # members are not individually enabled
    assert not m.single_transitions


def test_sync_needs_every_source():
    m = load_builtin("fig3_sync")
    assert enabled_firings(m, conf("LCar.0", "RCar.1")) == ()


def test_validation_errors():
    boxes = [BoxDecl(B("A.0"), "l", 0), BoxDecl(B("A.1"), "x", 1)]
    m = Model.create(boxes=boxes, initial=[B("A.0")], transitions=[Transition(B("A.0"), B("A.2"))],
                     lanes=["l"])
    errs = validate_model(m).errors
    assert any("undeclared lane" in e for e in errs)
    assert any("undeclared box A.2" in e for e in errs)


def test_sync_validation():
    boxes = [BoxDecl(B(f"A.{i}"), "l", i) for i in range(3)]
    t1, t2 = Transition(B("A.0"), B("A.1")), Transition(B("A.1"), B("A.2"))
    m = Model.create(boxes=boxes, initial=[B("A.0")], syncs=[SyncGroup((t1, t2))], lanes=["l"])
    assert any("same car" in e for e in validate_model(m).errors)


def test_cyclic_warns_and_bound_refuses():
    m = load_builtin("cyclic")
    rep = validate_model(m)
    assert rep.ok and rep.warnings
    assert m.is_cyclic()
    with pytest.raises(CyclicModelError):
        longest_run_bound(m)


def test_longest_run_bound():
    assert longest_run_bound(bench(5)) == 10
    assert longest_run_bound(load_builtin("fig2")) == 4


def test_all_normal_variant_drops_guards_and_syncs():
    m = load_builtin("lane_change3_nc")
    n = all_normal_variant(m)
    assert not n.syncs
    assert all(t.guard is None for t in n.transitions)
    assert {(t.src, t.dst) for t in n.transitions} == {(t.src, t.dst) for t in m.transitions}


def test_guard_holds():
    g = Guard(GuardKind.ABSENT, B("R.0"))
    assert g.holds(False) and not g.holds(True)
    assert str(Guard(GuardKind.EXISTS, B("R.0"))) == "when exists R.0"
