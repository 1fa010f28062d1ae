"""Line-oriented text format for CPD models (``.cpd`` files).

::

    model <name>
    lane <id> (, <id>)*
    box <Car>.<idx> in <lane> [at <int> | at ?]
    init <Car>.<idx>
    trans <Car>.<i> -> <Car>.<j> [when exists <Box> | when absent <Box>] [else -> <Car>.<k>]
    sync { <Box> -> <Box> (, <Box> -> <Box>)+ }
    constraint pos(<Box>) (< | <= | =) pos(<Box>)

``#`` starts a comment.  Declarations may appear in any order.  A box with no
``at`` clause is parametric when some constraint mentions it and otherwise
sits at its own index.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .core import (
    BoxDecl,
    BoxId,
    Guard,
    GuardKind,
    Model,
    PositionConstraint,
    Relation,
    SyncGroup,
    Transition,
    validate_model,
)


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 1


@dataclass(frozen=True)
class ParseError:
    span: SourceSpan
    message: str
    kind: str  # "lexical" | "syntactic" | "reference"

    def __str__(self) -> str:
        return f"{self.span.line}:{self.span.column}: {self.kind} error: {self.message}"


class ParseFailure(ValueError):
    def __init__(self, errors: list[ParseError]):
        self.errors = errors
        super().__init__("\n".join(str(e) for e in errors))


_TOKEN = re.compile(
    r"(?P<ws>[ \t]+)|(?P<comment>#.*)|(?P<int>-?\d+)|(?P<ident>[A-Za-z_]\w*)"
    r"|(?P<op>->|<=|[.,{}()<=?])"
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int

    @property
    def span(self) -> SourceSpan:
        return SourceSpan(self.line, self.col, max(1, len(self.text)))


class _Syntax(Exception):
    def __init__(self, tok: _Tok | None, message: str, fallback: SourceSpan):
        self.span = tok.span if tok else fallback
        self.message = message


def _lex(line: str, lineno: int, errors: list[ParseError]) -> list[_Tok] | None:
    toks = []
    pos = 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if not m:
            errors.append(ParseError(
                SourceSpan(lineno, pos + 1, 1), f"unexpected character {line[pos]!r}", "lexical"
            ))
            return None
        kind = m.lastgroup
        if kind == "comment":
            break
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), lineno, pos + 1))
        pos = m.end()
    return toks


class _Line:
    def __init__(self, toks: list[_Tok], lineno: int, width: int):
        self.toks = toks
        self.i = 0
        self.end = SourceSpan(lineno, width + 1, 1)

    def peek(self, text: str | None = None) -> bool:
        if self.i >= len(self.toks):
            return False
        return text is None or self.toks[self.i].text == text

    def take(self, kind: str | None = None, text: str | None = None, what: str = "") -> _Tok:
        tok = self.toks[self.i] if self.i < len(self.toks) else None
        if tok is None or (kind and tok.kind != kind) or (text and tok.text != text):
            want = what or repr(text) or kind
            got = f"{tok.text!r}" if tok else "end of line"
            raise _Syntax(tok, f"expected {want}, got {got}", self.end)
        self.i += 1
        return tok

    def box(self) -> tuple[BoxId, _Tok]:
        car = self.take("ident", what="car name")
        self.take(text=".")
        idx = self.take("int", what="box index")
        if idx.text.startswith("-"):
            raise _Syntax(idx, "box index must be non-negative", self.end)
        return BoxId(car.text, int(idx.text)), car

    def done(self) -> None:
        if self.i < len(self.toks):
            tok = self.toks[self.i]
            raise _Syntax(tok, f"unexpected {tok.text!r}", self.end)


@dataclass
class _Draft:
    name: str = "cpd"
    lanes: list[tuple[str, _Tok]] = field(default_factory=list)
    boxes: list[tuple[BoxId, str, int | None, bool, _Tok]] = field(default_factory=list)
    inits: list[tuple[BoxId, _Tok]] = field(default_factory=list)
    trans: list[tuple[Transition, _Tok]] = field(default_factory=list)
    syncs: list[tuple[list[Transition], _Tok]] = field(default_factory=list)
    constraints: list[tuple[PositionConstraint, _Tok]] = field(default_factory=list)


def _statement(ln: _Line, d: _Draft) -> None:
    head = ln.take("ident", what="statement keyword")
    kw = head.text
    if kw == "model":
        d.name = ln.take("ident", what="model name").text
    elif kw == "lane":
        d.lanes.append((ln.take("ident", what="lane name").text, head))
        while ln.peek(","):
            ln.take(text=",")
            tok = ln.take("ident", what="lane name")
            d.lanes.append((tok.text, tok))
    elif kw == "box":
        b, tok = ln.box()
        ln.take("ident", "in", what="'in'")
        lane = ln.take("ident", what="lane name").text
        pos, explicit = None, False
        if ln.peek("at"):
            ln.take(text="at")
            explicit = True
            if ln.peek("?"):
                ln.take(text="?")
            else:
                p = ln.take("int", what="position or '?'")
                pos = int(p.text)
                if pos < 0:
                    raise _Syntax(p, "positions must be non-negative", ln.end)
        d.boxes.append((b, lane, pos, explicit, tok))
    elif kw == "init":
        b, tok = ln.box()
        d.inits.append((b, tok))
    elif kw == "trans":
        src, tok = ln.box()
        ln.take(text="->")
        dst, _ = ln.box()
        guard = None
        if ln.peek("when"):
            ln.take(text="when")
            k = ln.take("ident", what="'exists' or 'absent'")
            if k.text not in ("exists", "absent"):
                raise _Syntax(k, "expected 'exists' or 'absent'", ln.end)
            cond, _ = ln.box()
            guard = Guard(GuardKind(k.text), cond)
        d.trans.append((Transition(src, dst, guard), tok))
        if ln.peek("else"):
            e = ln.take(text="else")
            if guard is None:
                raise _Syntax(e, "'else' needs a preceding 'when' guard", ln.end)
            ln.take(text="->")
            alt, alt_tok = ln.box()
            other = GuardKind.ABSENT if guard.kind is GuardKind.EXISTS else GuardKind.EXISTS
            d.trans.append((Transition(src, alt, Guard(other, guard.box)), alt_tok))
    elif kw == "sync":
        ln.take(text="{")
        members = []
        while True:
            src, _ = ln.box()
            ln.take(text="->")
            dst, _ = ln.box()
            members.append(Transition(src, dst))
            if ln.peek(","):
                ln.take(text=",")
                continue
            ln.take(text="}", what="',' or '}'")
            break
        d.syncs.append((members, head))
    elif kw == "constraint":
        sides = []
        rel = None
        for side in range(2):
            ln.take("ident", "pos", what="'pos'")
            ln.take(text="(")
            b, _ = ln.box()
            ln.take(text=")")
            sides.append(b)
            if side == 0:
                r = ln.take("op", what="'<', '<=' or '='")
                if r.text not in ("<", "<=", "="):
                    raise _Syntax(r, "expected '<', '<=' or '='", ln.end)
                rel = Relation(r.text)
        d.constraints.append((PositionConstraint(sides[0], rel, sides[1]), head))
    else:
        raise _Syntax(head, f"unknown statement {kw!r}", ln.end)
    ln.done()


def _resolve(d: _Draft, errors: list[ParseError]) -> Model | None:
    def ref(tok: _Tok, msg: str) -> None:
        errors.append(ParseError(tok.span, msg, "reference"))

    declared: dict[BoxId, _Tok] = {}
    lanes = [l for l, _ in d.lanes]
    seen_lanes = set()
    for lane, tok in d.lanes:
        if lane in seen_lanes:
            ref(tok, f"lane {lane!r} declared twice")
        seen_lanes.add(lane)
    mentioned = {c.lhs for c, _ in d.constraints} | {c.rhs for c, _ in d.constraints}
    decls = []
    for b, lane, pos, explicit, tok in d.boxes:
        if b in declared:
            ref(tok, f"box {b} declared twice")
            continue
        declared[b] = tok
        if lane not in seen_lanes:
            ref(tok, f"box {b} is in undeclared lane {lane!r}")
        if not explicit and b not in mentioned:
            pos = b.index
        decls.append(BoxDecl(b, lane, pos))

    def check(b: BoxId, tok: _Tok) -> bool:
        if b not in declared:
            ref(tok, f"undeclared box {b}")
            return False
        return True

    cars = sorted({b.car for b in declared})
    inits: dict[str, BoxId] = {}
    for b, tok in d.inits:
        if check(b, tok):
            if b.car in inits:
                ref(tok, f"car {b.car} has more than one initial box")
            inits[b.car] = b
    for car in cars:
        if car not in inits:
            first = min(b for b in declared if b.car == car)
            ref(declared[first], f"car {car} has no initial box")

    trans = []
    for t, tok in d.trans:
        ok = check(t.src, tok) & check(t.dst, tok)
        if t.guard is not None:
            ok &= check(t.guard.box, tok)
        if t.src.car != t.dst.car:
            ref(tok, f"transition {t.src} -> {t.dst} connects different cars")
            ok = False
        if ok:
            trans.append(t)
    syncs = []
    for members, tok in d.syncs:
        ok = True
        for t in members:
            ok &= check(t.src, tok) & check(t.dst, tok)
            if t.src.car != t.dst.car:
                ref(tok, f"transition {t.src} -> {t.dst} connects different cars")
                ok = False
        if ok:
            syncs.append((SyncGroup(tuple(members)), tok))
    constraints = []
    for c, tok in d.constraints:
        if check(c.lhs, tok) & check(c.rhs, tok):
            constraints.append(c)
    if errors:
        return None
    m = Model.create(
        boxes=decls,
        initial=inits,
        transitions=trans,
        syncs=[g for g, _ in syncs],
        lanes=lanes,
        constraints=constraints,
        cars=cars,
        name=d.name,
    )
    report = validate_model(m)
    for e in report.errors:
        toks = [tok for g, tok in syncs if str(g) in e or any(str(t) in e for t in g.members)]
        span = toks[0].span if toks else SourceSpan(1, 1, 1)
        errors.append(ParseError(span, e, "reference"))
    return None if errors else m


def parse(text: str) -> Model:
    """Parse a model, raising :class:`ParseFailure` with every error found."""
    errors: list[ParseError] = []
    draft = _Draft()
    for lineno, raw in enumerate(text.splitlines(), 1):
        raw = raw.rstrip("\r")
        toks = _lex(raw, lineno, errors)
        if not toks:
            continue
        try:
            _statement(_Line(toks, lineno, len(raw)), draft)
        except _Syntax as e:
            errors.append(ParseError(e.span, e.message, "syntactic"))
    # references are only resolved once the syntax is clean; otherwise a
    # broken declaration would cascade into spurious reference errors
    model = None if errors else _resolve(draft, errors)
    if model is None:
        raise ParseFailure(sorted(errors, key=lambda e: (e.span.line, e.span.column)))
    return model


def serialize(m: Model) -> str:
    out = [f"model {m.name}"]
    if m.lanes:
        out.append("lane " + ", ".join(m.lanes))
    for b in m.boxes:
        at = "?" if b.position is None else str(b.position)
        out.append(f"box {b.id} in {b.lane} at {at}")
    for b in m.initial:
        out.append(f"init {b}")
    for t in m.single_transitions:
        out.append(f"trans {t}")
    for g in m.syncs:
        out.append("sync { " + ", ".join(f"{t.src} -> {t.dst}" for t in g.members) + " }")
    for c in m.constraints:
        out.append(f"constraint {c}")
    return "\n".join(out) + "\n"
