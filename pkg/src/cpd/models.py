"""Bundled example models and the two-chain benchmark family."""

from __future__ import annotations

import sys
from importlib import resources
from pathlib import Path

from .core import BoxDecl, BoxId, Model, Transition, all_normal_variant
from .dsl import parse

FAMILIES = {
    "lane_change2": ("lane_change2_nc", "lane_change2_c", "lane_change2_n"),
    "lane_change3": ("lane_change3_nc", "lane_change3_c", "lane_change3_n"),
}


def bench(n: int, spacing: int = 1) -> Model:
    """Two cars in separate lanes, each a chain of ``n`` transitions."""
    if n < 0:
        raise ValueError("n must be non-negative")
    boxes, trans = [], []
    for car, lane in (("LCar", "left"), ("RCar", "right")):
        for i in range(n + 1):
            boxes.append(BoxDecl(BoxId(car, i), lane, i * spacing))
            if i:
                trans.append(Transition(BoxId(car, i - 1), BoxId(car, i)))
    return Model.create(
        boxes=boxes,
        initial=[BoxId("LCar", 0), BoxId("RCar", 0)],
        transitions=trans,
        lanes=["left", "right"],
        name=f"bench{n}",
    )


def builtin_names() -> list[str]:
    files = resources.files(__package__) / "data"
    names = {p.name[:-4] for p in files.iterdir() if p.name.endswith(".cpd")}
    names |= {n[:-2] + "_n" for n in names if n.endswith("_c")}
    return sorted(names)


def load_builtin(name: str) -> Model:
    if name.startswith("bench"):
        return bench(int(name[len("bench"):].lstrip(":")))
    path = resources.files(__package__) / "data" / f"{name}.cpd"
    if not path.is_file():
        if name.endswith("_n") and (path.parent / f"{name[:-2]}_c.cpd").is_file():
            return normal_variant_of(name)
        raise KeyError(f"no bundled model named {name!r}")
    return parse(path.read_text(encoding="utf-8"))


def normal_variant_of(name: str) -> Model:
    """The all-normal member of a family, derived from its guarded member."""
    base = name[: -len("_n")] + "_c"
    return all_normal_variant(load_builtin(base), name=name)


def load(source: str) -> Model:
    """Load a model from a path, ``-`` (stdin), ``bench:N`` or ``builtin:NAME``."""
    if source == "-":
        return parse(sys.stdin.read())
    if source.startswith("bench:"):
        return bench(int(source[len("bench:"):]))
    if source.startswith("builtin:"):
        return load_builtin(source[len("builtin:"):])
    return parse(Path(source).read_text(encoding="utf-8"))
