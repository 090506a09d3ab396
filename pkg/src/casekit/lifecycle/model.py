"""Net, token and guard types for the lifecycle workflow engine."""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Optional, Union

from ..model import is_valid_id

Value = Union[str, int, float]

ARTEFACT = "artefact"  # reserved key addressing the payload label


class NetError(ValueError):
    pass


class ProcessView(enum.Enum):
    CONSENSUS_BUILDING = "consensus-building"
    ACCOUNTABILITY_ACHIEVEMENT = "accountability-achievement"
    FAILURE_RESPONSE = "failure-response"
    CHANGE_ACCOMMODATION = "change-accommodation"


def is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


@dataclass(frozen=True)
class AssurancePayload:
    """An artefact label plus ordered key/value assurance fields."""

    artefact: str
    fields: tuple[tuple[str, Value], ...] = ()

    def __post_init__(self):
        if not self.artefact:
            raise NetError("artefact label must be non-empty")
        fields = tuple((k, v) for k, v in (self.fields.items() if isinstance(self.fields, Mapping)
                                           else self.fields))
        keys = [k for k, _ in fields]
        if len(set(keys)) != len(keys):
            raise NetError(f"duplicate payload keys in {keys}")
        if ARTEFACT in keys:
            raise NetError(f"{ARTEFACT!r} is reserved for the artefact label")
        object.__setattr__(self, "fields", fields)

    def get(self, key: str, default=None):
        if key == ARTEFACT:
            return self.artefact
        for k, v in self.fields:
            if k == key:
                return v
        return default

    def has(self, key: str) -> bool:
        return key == ARTEFACT or any(k == key for k, _ in self.fields)

    def as_dict(self) -> dict:
        return {ARTEFACT: self.artefact, **dict(self.fields)}

    def text(self) -> str:
        parts = [f"{ARTEFACT}={self.artefact}"] + [f"{k}={_fmt(v)}" for k, v in self.fields]
        return ",".join(parts)


def _fmt(value: Value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


OPS = ("=", "!=", ">=", "<=")


@dataclass(frozen=True)
class Atom:
    key: str
    op: str
    literal: Value

    def __post_init__(self):
        if self.op not in OPS:
            raise NetError(f"unknown operator {self.op!r}")
        if self.op in (">=", "<=") and not is_number(self.literal):
            raise NetError(f"{self.key}{self.op}{self.literal}: ordering needs a numeric literal")

    def holds(self, payload: AssurancePayload) -> bool:
        # every atom requires its key to be present
        if not payload.has(self.key):
            return False
        value = payload.get(self.key)
        if self.op in ("=", "!="):
            same = (value == self.literal) if is_number(value) == is_number(self.literal) else False
            return same if self.op == "=" else not same
        if not is_number(value):
            return False
        return value >= self.literal if self.op == ">=" else value <= self.literal

    def __str__(self) -> str:
        return f"{self.key}{self.op}{_fmt(self.literal)}"


@dataclass(frozen=True)
class Guard:
    """Conjunction of atoms; the empty guard accepts everything."""

    atoms: tuple[Atom, ...] = ()

    def failing_atom(self, payload: AssurancePayload) -> Optional[Atom]:
        for atom in self.atoms:
            if not atom.holds(payload):
                return atom
        return None

    def holds(self, payload: AssurancePayload) -> bool:
        return self.failing_atom(payload) is None

    def __str__(self) -> str:
        return "&".join(str(a) for a in self.atoms)


TRUE = Guard()


@dataclass(frozen=True)
class SetEdit:
    key: str
    literal: Value


@dataclass(frozen=True)
class CopyEdit:
    key: str
    source: int  # 0-based index into the bound input tokens


@dataclass(frozen=True)
class DropEdit:
    key: str


@dataclass(frozen=True)
class Transform:
    """Edits applied left to right to a copy of the first bound input token."""

    edits: tuple = ()


@dataclass(frozen=True)
class Place:
    id: str
    condition: Guard = TRUE
    view: Optional[ProcessView] = None


@dataclass(frozen=True)
class Transition:
    id: str
    stage: str
    inputs: tuple[tuple[str, Guard], ...]
    outputs: tuple[tuple[str, Transform], ...]
    view: Optional[ProcessView] = None


@dataclass(frozen=True, eq=False)
class Net:
    places: Mapping[str, Place]
    transitions: Mapping[str, Transition]
    input_places: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "places", MappingProxyType(dict(self.places)))
        object.__setattr__(self, "transitions", MappingProxyType(dict(self.transitions)))
        object.__setattr__(self, "input_places", tuple(self.input_places))
        for pid in self.places:
            if not is_valid_id(pid):
                raise NetError(f"invalid place id {pid!r}")
        for t in self.transitions.values():
            if not is_valid_id(t.id):
                raise NetError(f"invalid transition id {t.id!r}")
            if not t.inputs:
                raise NetError(f"transition {t.id} has no input arcs")
            for pid, _ in t.inputs + t.outputs:
                if pid not in self.places:
                    raise NetError(f"transition {t.id} refers to unknown place {pid!r}")
            for _, transform in t.outputs:
                for edit in transform.edits:
                    if isinstance(edit, CopyEdit) and not 0 <= edit.source < len(t.inputs):
                        raise NetError(f"transition {t.id} copies from missing input {edit.source + 1}")
        for pid in self.input_places:
            if pid not in self.places:
                raise NetError(f"input designation of unknown place {pid!r}")


@dataclass(frozen=True)
class Token:
    serial: int
    payload: AssurancePayload


@dataclass(frozen=True)
class Marking:
    """Tokens per place in arrival order, plus the next serial to assign."""

    tokens: Mapping[str, tuple[Token, ...]] = field(default_factory=dict)
    next_serial: int = 1

    def __post_init__(self):
        cleaned = {p: tuple(ts) for p, ts in sorted(self.tokens.items()) if ts}
        object.__setattr__(self, "tokens", MappingProxyType(cleaned))

    def __eq__(self, other):
        if not isinstance(other, Marking):
            return NotImplemented
        return dict(self.tokens) == dict(other.tokens) and self.next_serial == other.next_serial

    def __hash__(self):
        return hash((tuple(self.tokens.items()), self.next_serial))

    def at(self, place: str) -> tuple[Token, ...]:
        return self.tokens.get(place, ())

    def count(self, place: str) -> int:
        return len(self.at(place))

    def canonical(self) -> list:
        """Sorted (place, payload) pairs; serials and arrival order are ignored."""
        items = []
        for place, toks in self.tokens.items():
            for tok in toks:
                items.append([place, tok.payload.artefact,
                              [[k, _typed(v)] for k, v in tok.payload.fields]])
        return sorted(items, key=lambda it: json.dumps(it, sort_keys=True))

    def fingerprint(self) -> str:
        blob = json.dumps(self.canonical(), separators=(",", ":"), sort_keys=True)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _typed(value: Value):
    # keep "1" and 1 distinct in fingerprints
    return ["n", value] if is_number(value) else ["s", value]
