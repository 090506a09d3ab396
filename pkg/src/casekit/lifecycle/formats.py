"""Text formats for nets (``.dpnl``) and event logs (``.evl``).

Net file::

    place <id> [view=<view>] [cond=<key><op><literal>[&...]]
    transition <id> stage="<label>" in=<place>[:<guard>][,...] out=<place>[:<transform>][,...] [view=<view>]
    input <place>

A transform is a ``;``-separated edit list: ``key=literal`` sets a field,
``key=$N`` copies ``key`` from the N-th bound input token (1-based) and
``-key`` drops a field. Outputs start as a copy of the first input token.

Event log::

    inject <place> <key>=<value>[,...]
    fire <transition>
"""

from __future__ import annotations

import re

from ..casl import ParseError, _LineError, split_lines, tokenize_line
from ..model import Diagnostic, Severity, is_valid_id
from .model import (
    ARTEFACT,
    AssurancePayload,
    Atom,
    CopyEdit,
    DropEdit,
    Guard,
    Marking,
    Net,
    NetError,
    Place,
    ProcessView,
    SetEdit,
    Transform,
    Transition,
)
from .engine import Event, Fire, Inject

ATOM_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_.-]*)(!=|>=|<=|=)(.*)\Z")
NUM_RE = re.compile(r"-?[0-9]+(\.[0-9]+)?\Z")
KEY_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.-]*\Z")


class _Bad(NetError):
    pass


def literal(text: str):
    if NUM_RE.match(text):
        return float(text) if "." in text else int(text)
    return text


def parse_guard(text: str) -> Guard:
    if not text:
        return Guard()
    atoms = []
    for part in text.split("&"):
        m = ATOM_RE.match(part)
        if not m or not m.group(3):
            raise _Bad(f"malformed condition atom {part!r}")
        try:
            atoms.append(Atom(m.group(1), m.group(2), literal(m.group(3))))
        except NetError as exc:
            raise _Bad(str(exc)) from None
    return Guard(tuple(atoms))


def parse_transform(text: str) -> Transform:
    edits = []
    for part in filter(None, text.split(";")):
        if part.startswith("-"):
            if not KEY_RE.match(part[1:]):
                raise _Bad(f"malformed drop edit {part!r}")
            edits.append(DropEdit(part[1:]))
            continue
        key, eq, value = part.partition("=")
        if not eq or not KEY_RE.match(key) or not value:
            raise _Bad(f"malformed edit {part!r}")
        if value.startswith("$"):
            if not value[1:].isdigit() or int(value[1:]) < 1:
                raise _Bad(f"malformed copy source {value!r}")
            edits.append(CopyEdit(key, int(value[1:]) - 1))
        else:
            edits.append(SetEdit(key, literal(value)))
    return Transform(tuple(edits))


def _arcs(text: str, parse_label):
    arcs = []
    for part in text.split(","):
        place, _, label = part.partition(":")
        if not is_valid_id(place):
            raise _Bad(f"invalid place id {place!r}")
        arcs.append((place, parse_label(label)))
    return tuple(arcs)


def _view(tok):
    if tok is None:
        return None
    try:
        return ProcessView(tok.value)
    except ValueError:
        raise _Bad(f"unknown process view {tok.value!r}") from None


def _fail(diags):
    diags.sort(key=lambda d: (d.line or 0, d.column or 0))
    raise ParseError(diags)


def parse_net(text: str) -> Net:
    places, transitions, inputs = {}, {}, []
    diags = []
    for lineno, raw in enumerate(split_lines(text), start=1):
        try:
            tokens = tokenize_line(raw)
            if not tokens:
                continue
            head, rest = tokens[0], tokens[1:]
            pos = [t for t in rest if t.key is None]
            attrs = {t.key: t for t in rest if t.key is not None}
            if len(attrs) != len(rest) - len(pos):
                raise _Bad("duplicate attribute")
            if head.value == "place":
                if len(pos) != 1 or not is_valid_id(pos[0].value) or set(attrs) - {"view", "cond"}:
                    raise _Bad("expected: place <id> [view=<view>] [cond=<guard>]")
                pid = pos[0].value
                if pid in places:
                    raise _Bad(f"duplicate place {pid!r}")
                cond = parse_guard(attrs["cond"].value) if "cond" in attrs else Guard()
                places[pid] = Place(pid, cond, _view(attrs.get("view")))
            elif head.value == "transition":
                if (len(pos) != 1 or not is_valid_id(pos[0].value)
                        or not {"stage", "in"} <= set(attrs) or set(attrs) - {"stage", "in", "out", "view"}):
                    raise _Bad('expected: transition <id> stage="<label>" in=... [out=...] [view=<view>]')
                tid = pos[0].value
                if tid in transitions:
                    raise _Bad(f"duplicate transition {tid!r}")
                outs = _arcs(attrs["out"].value, parse_transform) if "out" in attrs else ()
                transitions[tid] = Transition(tid, attrs["stage"].value,
                                              _arcs(attrs["in"].value, parse_guard), outs,
                                              _view(attrs.get("view")))
            elif head.value == "input":
                if len(pos) != 1 or attrs:
                    raise _Bad("expected: input <place>")
                inputs.append(pos[0].value)
            else:
                raise _Bad(f"unknown keyword {head.key or head.value!r}")
        except _LineError as exc:
            diags.append(Diagnostic(Severity.ERROR, "syntax", exc.message, line=lineno, column=exc.column))
        except _Bad as exc:
            diags.append(Diagnostic(Severity.ERROR, "syntax", str(exc), line=lineno, column=1))
    if diags:
        _fail(diags)
    try:
        return Net(places, transitions, tuple(inputs))
    except NetError as exc:
        raise ParseError([Diagnostic(Severity.ERROR, "net", str(exc))]) from None


def parse_payload(text: str, default_artefact: str) -> AssurancePayload:
    artefact = default_artefact
    fields = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        key, eq, value = part.partition("=")
        key = key.strip()
        if not eq or not KEY_RE.match(key):
            raise _Bad(f"malformed payload field {part!r}")
        value = value.strip()
        if key == ARTEFACT:
            artefact = value
        else:
            fields.append((key, literal(value)))
    try:
        return AssurancePayload(artefact, tuple(fields))
    except NetError as exc:
        raise _Bad(str(exc)) from None


def parse_events(text: str) -> list[Event]:
    events: list[Event] = []
    diags = []
    for lineno, raw in enumerate(split_lines(text), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 2)
        try:
            if parts[0] == "inject" and len(parts) >= 2 and is_valid_id(parts[1]):
                events.append(Inject(parts[1], parse_payload(parts[2] if len(parts) > 2 else "", parts[1])))
            elif parts[0] == "fire" and len(parts) == 2 and is_valid_id(parts[1]):
                events.append(Fire(parts[1]))
            else:
                raise _Bad(f"malformed event {line!r}")
        except _Bad as exc:
            diags.append(Diagnostic(Severity.ERROR, "syntax", str(exc), line=lineno, column=1))
    if diags:
        _fail(diags)
    return events


def format_marking(marking: Marking) -> str:
    lines = []
    for place, toks in marking.tokens.items():
        for tok in toks:
            lines.append(f"{place} #{tok.serial} {tok.payload.text()}")
    return "\n".join(lines) + ("\n" if lines else "")


def marking_dict(marking: Marking) -> dict:
    return {place: [{"serial": t.serial, "payload": t.payload.as_dict()} for t in toks]
            for place, toks in marking.tokens.items()}

