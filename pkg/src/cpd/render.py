"""Text renderings: DOT for model graphs and scenario trees, ASCII for scenes.

Scene grids have one row per lane and one column per position.  A cell is
``max(len(car name)) + 1`` characters wide; co-located cars share a cell as
``A+B``, prefixed with ``!`` when the two boxes are a collision pair.  Such
cells may overflow the column width.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .analyze import collision_pairs
from .core import BoxId, GuardKind, Model, Scenario
from .positions import resolve_positions

_SYNC_COLORS = ("blue", "red", "darkgreen", "purple", "orange", "brown")


@dataclass(frozen=True)
class RenderOptions:
    format: str = "ascii"
    max_scenarios: int = 64

    def __post_init__(self) -> None:
        if self.format not in ("dot", "ascii"):
            raise ValueError("format must be 'dot' or 'ascii'")
        if self.max_scenarios < 1:
            raise ValueError("max_scenarios must be at least 1")


def _q(text: object) -> str:
    return '"' + str(text).replace("\\", "\\\\").replace('"', '\\"') + '"'


def render_model_dot(m: Model) -> str:
    pos = resolve_positions(m)
    out = [f"digraph {_q(m.name)} {{", "  rankdir=LR;", "  node [shape=box];"]
    for i, lane in enumerate(m.lanes):
        members = sorted((b for b in m.box_ids if m.decl[b].lane == lane), key=lambda b: (pos[b], b))
        out.append(f"  subgraph cluster_{i} {{")
        out.append(f"    label={_q(lane)};")
        for b in members:
            shape = ", peripheries=2" if b in m.initial else ""
            out.append(f"    {_q(b)} [label={_q(f'{b} @{pos[b]}')}{shape}];")
        out.append("  }")
    for t in m.single_transitions:
        attrs = ""
        if t.guard is not None:
            attrs = f" [label={_q(str(t.guard))}]"
        out.append(f"  {_q(t.src)} -> {_q(t.dst)}{attrs};")
        if t.guard is not None:
            head = "dot" if t.guard.kind is GuardKind.EXISTS else "odot"
            out.append(
                f"  {_q(t.guard.box)} -> {_q(t.src)} "
                f"[style=dashed, arrowhead={head}, constraint=false];"
            )
    for i, g in enumerate(m.syncs):
        color = _SYNC_COLORS[i % len(_SYNC_COLORS)]
        for t in g.members:
            out.append(
                f"  {_q(t.src)} -> {_q(t.dst)} "
                f"[color={color}, penwidth=2, label={_q(f'sync{i + 1}')}];"
            )
    out.append("}")
    return "\n".join(out) + "\n"


def render_scenario_ascii(m: Model, s: Scenario) -> str:
    pos = resolve_positions(m)
    pairs = collision_pairs(m)
    width = max((len(c) for c in m.cars), default=0) + 1
    cols = sorted({pos[b] for b in m.box_ids})
    lane_w = max((len(l) for l in m.lanes), default=0)
    head = " " * lane_w + " |" + "".join(str(p).rjust(width) for p in cols)
    blocks = []
    for i, scene in enumerate(s.scenes):
        lines = [f"scene {i}: " + " ".join(str(b) for b in scene.boxes), head]
        for lane in m.lanes:
            cells: dict[int, list[BoxId]] = {}
            for b in scene.boxes:
                if m.decl[b].lane == lane:
                    cells.setdefault(pos[b], []).append(b)
            row = []
            for p in cols:
                here = cells.get(p, [])
                text = "+".join(b.car for b in here) if here else "."
                if any((a, b) in pairs for a in here for b in here):
                    text = "!" + text
                row.append(text.rjust(width))
            lines.append(lane.ljust(lane_w) + " |" + "".join(row))
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def render_scenario_tree(scenarios: Iterable[Scenario], options: RenderOptions | None = None) -> str:
    """Prefix tree of the scenarios' scene sequences as a DOT digraph."""
    cap = (options or RenderOptions()).max_scenarios
    runs = sorted(set(scenarios))
    shown, hidden = runs[:cap], len(runs) - min(cap, len(runs))
    if shown and any(r.scenes[0] != shown[0].scenes[0] for r in shown):
        raise ValueError("scenarios do not share an initial scene")
    ids: dict[tuple, str] = {}
    out = ["digraph scenarios {", "  node [shape=box];"]
    for run in shown:
        for j in range(len(run.scenes)):
            prefix = run.scenes[: j + 1]
            if prefix in ids:
                continue
            nid = f"n{len(ids)}"
            ids[prefix] = nid
            out.append(f"  {nid} [label={_q(run.scenes[j])}];")
            if j:
                out.append(f"  {ids[prefix[:-1]]} -> {nid};")
    if hidden:
        out.append(f"  elided [shape=plaintext, label={_q(f'... {hidden} more')}];")
        if shown:
            out.append(f"  {ids[shown[0].scenes[:1]]} -> elided [style=dotted];")
    out.append("}")
    return "\n".join(out) + "\n"


def tree_leaf_count(dot: str) -> int:
    """Number of scene nodes without outgoing edges (the elision node excluded)."""
    nodes, sources = set(), set()
    for line in dot.splitlines():
        line = line.strip()
        if " -> " in line:
            sources.add(line.split(" -> ")[0])
        elif line[:1] == "n" and line[1:2].isdigit():
            nodes.add(line.split(" ")[0])
    return len(nodes - sources)
