import pytest

from cpd.core import validate_model
from cpd.models import FAMILIES, bench, builtin_names, load, load_builtin, normal_variant_of


def test_builtin_names():
    names = builtin_names()
    assert {"fig2", "fig3_sync", "cyclic"} <= set(names)
    for fam in FAMILIES.values():
        assert set(fam) <= set(names)


@pytest.mark.parametrize("name", builtin_names())
def test_builtins_validate(name):
    assert validate_model(load_builtin(name)).ok


def test_bench_shape():
    m = bench(3)
    assert len(m.box_ids) == 8 and len(m.transitions) == 6
    assert bench(2, spacing=2).decl[bench(2).box_ids[2]].position == 4


def test_normal_variant():
    m = normal_variant_of("lane_change2_n")
    assert m.name == "lane_change2_n" and not m.syncs


def test_load_specs(tmp_path):
    assert load("bench:2") == bench(2)
    assert load("builtin:fig2").name == "fig2"
    with pytest.raises(KeyError):
        load("builtin:nope")
    with pytest.raises(ValueError):
        bench(-1)
