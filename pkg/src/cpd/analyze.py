"""Scenario filters, collision analysis and summary statistics."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .core import BoxId, Configuration, Model, Scenario
from .positions import entailed_equal, resolve_positions


@dataclass(frozen=True)
class DistanceBound:
    """Every scene keeps boxes of distinct cars strictly closer than ``d``."""

    d: int

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("distance bound must be >= 1")


@dataclass(frozen=True)
class RequireCollision:
    """Some scene co-occupies a collision pair."""


@dataclass(frozen=True)
class ForbidCollision:
    """No scene co-occupies a collision pair."""


@dataclass(frozen=True)
class Occupancy:
    """Some scene has ``box`` occupied."""

    box: BoxId


@dataclass(frozen=True)
class AllOf:
    filters: tuple["SceneFilter", ...]

    def __post_init__(self) -> None:
        if not self.filters:
            raise ValueError("empty filter conjunction")


SceneFilter = DistanceBound | RequireCollision | ForbidCollision | Occupancy | AllOf


def parse_filter(text: str) -> SceneFilter:
    """Parse the command-line filter syntax.

    ``dist<INT``, ``collision``, ``no-collision`` and ``occupies(CAR.IDX)``;
    a comma joins several into a conjunction.
    """
    parts = [p.strip() for p in re.split(r",(?![^(]*\))", text) if p.strip()]
    if not parts:
        raise ValueError("empty filter")
    out: list[SceneFilter] = []
    for p in parts:
        if m := re.fullmatch(r"dist\s*<\s*(\d+)", p):
            out.append(DistanceBound(int(m.group(1))))
        elif p == "collision":
            out.append(RequireCollision())
        elif p == "no-collision":
            out.append(ForbidCollision())
        elif m := re.fullmatch(r"occupies\(\s*([A-Za-z_]\w*)\.(\d+)\s*\)", p):
            out.append(Occupancy(BoxId(m.group(1), int(m.group(2)))))
        else:
            raise ValueError(f"unknown filter {p!r}")
    return out[0] if len(out) == 1 else AllOf(tuple(out))


def format_filter(f: SceneFilter) -> str:
    if isinstance(f, DistanceBound):
        return f"dist<{f.d}"
    if isinstance(f, RequireCollision):
        return "collision"
    if isinstance(f, ForbidCollision):
        return "no-collision"
    if isinstance(f, Occupancy):
        return f"occupies({f.box})"
    return ",".join(format_filter(g) for g in f.filters)


def far_pairs(m: Model, d: int) -> list[tuple[BoxId, BoxId]]:
    """Box pairs of distinct cars whose resolved positions differ by ``d`` or more."""
    pos = resolve_positions(m)
    ids = m.box_ids
    return [
        (a, b)
        for a, b in combinations(ids, 2)
        if a.car != b.car and abs(pos[a] - pos[b]) >= d
    ]


def collision_pairs(m: Model) -> frozenset[tuple[BoxId, BoxId]]:
    """Unordered pairs (sorted) of boxes of distinct cars that are necessarily co-located."""
    out = set()
    for a, b in combinations(m.box_ids, 2):
        if a.car == b.car or m.decl[a].lane != m.decl[b].lane:
            continue
        if entailed_equal(m, a, b):
            out.add((a, b) if a < b else (b, a))
    return frozenset(out)


def _scene_collides(scene: Configuration, pairs) -> list[tuple[BoxId, BoxId]]:
    occ = scene.boxes
    return [
        (a, b) for i, a in enumerate(occ) for b in occ[i + 1:]
        if ((a, b) if a < b else (b, a)) in pairs
    ]


def accepts(m: Model, f: SceneFilter, s: Scenario) -> bool:
    """Reference semantics of a filter on a decoded scenario."""
    if isinstance(f, AllOf):
        return all(accepts(m, g, s) for g in f.filters)
    if isinstance(f, DistanceBound):
        far = set(far_pairs(m, f.d))
        return not any(
            (a, b) in far or (b, a) in far
            for scene in s.scenes
            for i, a in enumerate(scene.boxes)
            for b in scene.boxes[i + 1:]
        )
    if isinstance(f, Occupancy):
        return any(f.box in scene for scene in s.scenes)
    pairs = collision_pairs(m)
    hit = any(_scene_collides(scene, pairs) for scene in s.scenes)
    return hit if isinstance(f, RequireCollision) else not hit


@dataclass
class CollisionReport:
    hits: list[tuple[int, int, tuple[BoxId, BoxId]]]
    total: int
    colliding: int


def detect_collisions(
    scenarios: Sequence[Scenario], pairs: Iterable[tuple[BoxId, BoxId]]
) -> CollisionReport:
    pairs = {(a, b) if a < b else (b, a) for a, b in pairs}
    hits = []
    colliding = 0
    for si, s in enumerate(scenarios):
        before = len(hits)
        for sj, scene in enumerate(s.scenes):
            for p in _scene_collides(scene, pairs):
                hits.append((si, sj, p))
        colliding += len(hits) > before
    return CollisionReport(hits=hits, total=len(scenarios), colliding=colliding)


@dataclass
class Summary:
    total: int = 0
    complete: bool = True
    colliding: int = 0
    hits: int = 0
    lengths: dict[int, int] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)

    def to_text(self, with_timings: bool = True) -> str:
        lines = [
            f"total={self.total}",
            f"complete={'true' if self.complete else 'false'}",
            f"colliding={self.colliding}",
            f"collision_hits={self.hits}",
            "length_histogram=" + ",".join(f"{k}:{v}" for k, v in sorted(self.lengths.items())),
        ]
        if with_timings:
            lines += [f"time_{k}={v:.6f}" for k, v in sorted(self.timings.items())]
        return "\n".join(lines) + "\n"


def summarize(result=None, report: CollisionReport | None = None) -> Summary:
    """Fold an enumeration result and its collision report into a summary."""
    if result is None:
        return Summary()
    scenarios = list(result.scenarios)
    return Summary(
        total=result.count,
        complete=result.complete,
        colliding=report.colliding if report else 0,
        hits=len(report.hits) if report else 0,
        lengths=dict(Counter(len(s) for s in scenarios)),
        timings=dict(getattr(result.stats, "times", {}) or {}),
    )


def binomial_prediction(n: int) -> int:
    """Closed-form scenario count (2n)!/(n!)^2 for the two-chain benchmark."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return math.comb(2 * n, n)
