"""Firing, replay and bounded reachability for lifecycle nets.

Each input arc consumes one token (arc weight 1). Bindings are chosen
deterministically: the lexicographically smallest tuple of serials, in arc
order, whose tokens are distinct and pass the arc guards.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Union

from .model import (
    ARTEFACT,
    AssurancePayload,
    Atom,
    CopyEdit,
    DropEdit,
    Marking,
    Net,
    SetEdit,
    Token,
    Transition,
)


class FireError(Exception):
    pass


class NotEnabled(FireError):
    pass


class AssuranceCheckFailed(FireError):
    def __init__(self, transition: str, place: str, atom: Optional[Atom], detail: str = ""):
        self.transition = transition
        self.place = place
        self.atom = atom
        what = f"condition {atom} of place {place}" if atom is not None else detail
        super().__init__(f"assurance check failed: {transition} output violates {what}")


class ReplayError(Exception):
    def __init__(self, step: int, message: str):
        self.step = step
        super().__init__(f"step {step}: {message}")


@dataclass(frozen=True)
class FiringRecord:
    transition: str
    stage: str
    consumed: tuple[int, ...]
    produced: tuple[tuple[str, int], ...]
    outputs: tuple[AssurancePayload, ...] = ()


@dataclass(frozen=True)
class Inject:
    place: str
    payload: AssurancePayload


@dataclass(frozen=True)
class Fire:
    transition: str


Event = Union[Inject, Fire]


@dataclass(frozen=True)
class TraceEntry:
    step: int
    event: Event
    serials: tuple[int, ...]
    record: Optional[FiringRecord]
    fingerprint: str

    def to_dict(self) -> dict:
        if isinstance(self.event, Inject):
            d = {"step": self.step, "event": "inject", "place": self.event.place,
                 "serial": self.serials[0], "payload": self.event.payload.as_dict()}
        else:
            d = {"step": self.step, "event": "fire", "transition": self.event.transition,
                 "stage": self.record.stage, "consumed": list(self.record.consumed),
                 "produced": [[p, s] for p, s in self.record.produced]}
        d["fingerprint"] = self.fingerprint
        return d

    def text(self) -> str:
        fp = self.fingerprint[:12]
        if isinstance(self.event, Inject):
            return (f"{self.step} inject {self.event.place} #{self.serials[0]} "
                    f"{self.event.payload.text()} fp={fp}")
        rec = self.record
        consumed = ",".join(f"#{s}" for s in rec.consumed)
        produced = ",".join(f"{p}#{s}" for p, s in rec.produced) or "-"
        return f'{self.step} fire {rec.transition} stage="{rec.stage}" {consumed} -> {produced} fp={fp}'


def _bindings(transition: Transition, marking: Marking) -> Iterator[tuple[Token, ...]]:
    """All distinct-token bindings, smallest serial tuple first."""
    candidates = []
    for place, guard in transition.inputs:
        ok = [t for t in marking.at(place) if guard.holds(t.payload)]
        candidates.append(sorted(ok, key=lambda t: t.serial))

    chosen: list[Token] = []
    used: set[int] = set()

    def walk(i):
        if i == len(candidates):
            yield tuple(chosen)
            return
        for tok in candidates[i]:
            if tok.serial in used:
                continue
            chosen.append(tok)
            used.add(tok.serial)
            yield from walk(i + 1)
            chosen.pop()
            used.discard(tok.serial)

    yield from walk(0)


def binding(net: Net, marking: Marking, transition_id: str) -> Optional[tuple[int, ...]]:
    for bound in _bindings(net.transitions[transition_id], marking):
        return tuple(t.serial for t in bound)
    return None


def enabled(net: Net, marking: Marking) -> list[tuple[str, tuple[int, ...]]]:
    out = []
    for tid in sorted(net.transitions):
        serials = binding(net, marking, tid)
        if serials is not None:
            out.append((tid, serials))
    return out


def _apply(transition: Transition, bound: Sequence[Token], place: str, transform) -> AssurancePayload:
    base = bound[0].payload
    artefact = base.artefact
    fields = dict(base.fields)
    for edit in transform.edits:
        if isinstance(edit, SetEdit):
            if edit.key == ARTEFACT:
                artefact = str(edit.literal)
            else:
                fields[edit.key] = edit.literal
        elif isinstance(edit, CopyEdit):
            src = bound[edit.source].payload
            if not src.has(edit.key):
                raise AssuranceCheckFailed(transition.id, place, None,
                                           f"copy of missing key {edit.key!r} from input {edit.source + 1}")
            if edit.key == ARTEFACT:
                artefact = src.artefact
            else:
                fields[edit.key] = src.get(edit.key)
        elif isinstance(edit, DropEdit):
            if edit.key == ARTEFACT:
                raise AssuranceCheckFailed(transition.id, place, None, "the artefact label cannot be dropped")
            fields.pop(edit.key, None)
    return AssurancePayload(artefact, tuple(fields.items()))


def fire(net: Net, marking: Marking, transition_id: str,
         serials: Optional[Sequence[int]] = None) -> tuple[Marking, FiringRecord]:
    """Fire one transition; on any error the input marking is left as it was.

    ``serials`` selects an explicit binding; by default the deterministic one
    from :func:`enabled` is used.
    """
    if transition_id not in net.transitions:
        raise NotEnabled(f"unknown transition {transition_id!r}")
    t = net.transitions[transition_id]
    if serials is None:
        serials = binding(net, marking, transition_id)
        if serials is None:
            raise NotEnabled(f"transition {transition_id} is not enabled")
    serials = tuple(serials)
    bound = []
    for (place, guard), serial in zip(t.inputs, serials):
        tok = next((x for x in marking.at(place) if x.serial == serial), None)
        if tok is None or not guard.holds(tok.payload):
            raise NotEnabled(f"token #{serial} cannot bind input {place} of {transition_id}")
        bound.append(tok)
    if len(serials) != len(t.inputs) or len(set(serials)) != len(serials):
        raise NotEnabled(f"invalid binding {serials} for {transition_id}")

    outputs = []
    for place, transform in t.outputs:
        payload = _apply(t, bound, place, transform)
        atom = net.places[place].condition.failing_atom(payload)
        if atom is not None:
            raise AssuranceCheckFailed(transition_id, place, atom)
        outputs.append((place, payload))

    consumed = set(serials)
    tokens = {p: [x for x in ts if x.serial not in consumed] for p, ts in marking.tokens.items()}
    serial = marking.next_serial
    produced = []
    for place, payload in outputs:
        tokens.setdefault(place, []).append(Token(serial, payload))
        produced.append((place, serial))
        serial += 1
    record = FiringRecord(transition_id, t.stage, serials, tuple(produced),
                          tuple(p for _, p in outputs))
    return Marking(tokens, serial), record


def inject(net: Net, marking: Marking, place: str, payload: AssurancePayload) -> tuple[Marking, int]:
    if place not in net.input_places:
        raise FireError(f"{place} is not a designated input place")
    atom = net.places[place].condition.failing_atom(payload)
    if atom is not None:
        raise AssuranceCheckFailed("inject", place, atom)
    tokens = {p: list(ts) for p, ts in marking.tokens.items()}
    serial = marking.next_serial
    tokens.setdefault(place, []).append(Token(serial, payload))
    return Marking(tokens, serial + 1), serial


def replay(net: Net, initial: Marking, events: Sequence[Event]) -> tuple[Marking, list[TraceEntry]]:
    """Apply events in order; raises :class:`ReplayError` naming the failing step."""
    marking = initial
    trace = []
    for step, event in enumerate(events):
        try:
            if isinstance(event, Inject):
                if event.place not in net.places:
                    raise FireError(f"unknown place {event.place!r}")
                marking, serial = inject(net, marking, event.place, event.payload)
                trace.append(TraceEntry(step, event, (serial,), None, marking.fingerprint()))
            else:
                if event.transition not in net.transitions:
                    raise FireError(f"unknown transition {event.transition!r}")
                marking, record = fire(net, marking, event.transition)
                trace.append(TraceEntry(step, event, record.consumed, record, marking.fingerprint()))
        except FireError as exc:
            raise ReplayError(step, str(exc)) from exc
    return marking, trace


@dataclass(frozen=True)
class Reachability:
    fingerprints: frozenset
    truncated: bool
    markings: dict = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.fingerprints)


def successors(net: Net, marking: Marking) -> Iterator[Marking]:
    """Every marking reachable by one firing under any binding."""
    for tid in sorted(net.transitions):
        for bound in _bindings(net.transitions[tid], marking):
            try:
                new, _ = fire(net, marking, tid, [t.serial for t in bound])
            except AssuranceCheckFailed:
                continue
            yield new


def reachable(net: Net, initial: Marking, bound: int = 2, depth: int = 6) -> Reachability:
    """Breadth-first enumeration of markings within ``depth`` firings.

    Markings holding more than ``bound`` tokens in any place are not entered;
    hitting either limit sets ``truncated``.
    """
    if bound < 1 or depth < 1:
        raise ValueError("bound and depth must be positive")
    seen = {initial.fingerprint(): initial}
    frontier = deque([(initial, 0)])
    truncated = False
    while frontier:
        marking, d = frontier.popleft()
        for nxt in successors(net, marking):
            if any(len(ts) > bound for ts in nxt.tokens.values()):
                truncated = True
                continue
            fp = nxt.fingerprint()
            if fp in seen:
                continue
            if d == depth:
                truncated = True
                continue
            seen[fp] = nxt
            frontier.append((nxt, d + 1))
    return Reachability(frozenset(seen), truncated, seen)
