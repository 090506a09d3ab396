"""Assurance-case graph model and well-formedness rules.

A case is a set of claims, evidence, arguments and defeaters keyed by id.
Claims are supported only through arguments; an argument links one top claim
to one or more sub-claims or evidence items and may name a side claim that
justifies the inference. Evidence is terminal.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Optional

ID_RE = re.compile(r"[A-Za-z][A-Za-z0-9_.-]*\Z")


def is_valid_id(value: str) -> bool:
    return bool(ID_RE.match(value))


class Status(enum.Enum):
    """Node colours used for status roll-up.

    The ``rank`` is the roll-up order; ``EXPANDED`` has no rank because it is
    never an effective status (it is resolved through its expansion).
    """

    UNEVALUATED = "white"
    EXPANDED = "purple"
    SATISFIED = "green"
    PARTIAL = "orange"
    STANDARDS_ASSUMED = "yellow"
    DEFERRED = "red"

    @property
    def colour(self) -> str:
        return self.value

    @property
    def rank(self) -> int:
        if self not in _RANK:
            raise ValueError(f"{self.colour} is not part of the status lattice")
        return _RANK[self]

    @classmethod
    def from_colour(cls, colour: str) -> "Status":
        return cls(colour)


_RANK = {
    Status.UNEVALUATED: 0,
    Status.DEFERRED: 1,
    Status.PARTIAL: 2,
    Status.STANDARDS_ASSUMED: 3,
    Status.SATISFIED: 4,
}

# lattice order, bottom first
LATTICE = (
    Status.UNEVALUATED,
    Status.DEFERRED,
    Status.PARTIAL,
    Status.STANDARDS_ASSUMED,
    Status.SATISFIED,
)


class BlockType(enum.Enum):
    DECOMPOSITION = "decomposition"
    SUBSTITUTION = "substitution"
    EVIDENCE_INCORPORATION = "evidence"
    CONCRETION = "concretion"
    CALCULATION = "calculation"


class DefeaterKind(enum.Enum):
    UNDERCUT = "undercut"
    REBUTTAL = "rebut"


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    rule: str
    message: str
    node: Optional[str] = None
    line: Optional[int] = None
    column: Optional[int] = None

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def sort_key(self):
        return (self.line or 0, self.node or "", self.rule, self.message)

    def to_dict(self) -> dict:
        d = {"severity": self.severity.value, "rule": self.rule, "message": self.message}
        if self.node is not None:
            d["node"] = self.node
        if self.line is not None:
            d["line"] = self.line
            d["column"] = self.column
        return d

    def __str__(self) -> str:
        where = ""
        if self.line is not None:
            where = f"{self.line}:{self.column or 1}: "
        elif self.node is not None:
            where = f"{self.node}: "
        return f"{where}{self.severity.value}: {self.message} [{self.rule}]"


@dataclass(frozen=True)
class ClaimNode:
    id: str
    text: str
    declared_status: Optional[Status] = None
    expands: Optional[str] = None


@dataclass(frozen=True)
class EvidenceNode:
    id: str
    text: str
    declared_status: Optional[Status] = None


@dataclass(frozen=True)
class ArgumentNode:
    id: str
    block: BlockType
    top: str
    supports: tuple[str, ...]
    side: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "supports", tuple(self.supports))


@dataclass(frozen=True)
class Defeater:
    id: str
    kind: DefeaterKind
    target: str
    text: str
    resolved: bool = False


def _freeze(items) -> Mapping:
    if isinstance(items, Mapping):
        return MappingProxyType(dict(items))
    return MappingProxyType({item.id: item for item in items})


@dataclass(frozen=True, eq=False)
class CaseGraph:
    """Immutable container of case nodes keyed by id.

    Collections may be given as mappings or as iterables of nodes.
    """

    title: str = ""
    claims: Mapping[str, ClaimNode] = field(default_factory=dict)
    evidence: Mapping[str, EvidenceNode] = field(default_factory=dict)
    arguments: Mapping[str, ArgumentNode] = field(default_factory=dict)
    defeaters: Mapping[str, Defeater] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("claims", "evidence", "arguments", "defeaters"):
            object.__setattr__(self, name, _freeze(getattr(self, name)))

    def __eq__(self, other):
        if not isinstance(other, CaseGraph):
            return NotImplemented
        return (
            self.title == other.title
            and dict(self.claims) == dict(other.claims)
            and dict(self.evidence) == dict(other.evidence)
            and dict(self.arguments) == dict(other.arguments)
            and dict(self.defeaters) == dict(other.defeaters)
        )

    __hash__ = None

    def __repr__(self):
        return (
            f"CaseGraph(title={self.title!r}, claims={len(self.claims)}, "
            f"evidence={len(self.evidence)}, arguments={len(self.arguments)}, "
            f"defeaters={len(self.defeaters)})"
        )

    def node_kind(self, node_id: str) -> Optional[str]:
        for kind in ("claims", "evidence", "arguments", "defeaters"):
            if node_id in getattr(self, kind):
                return kind
        return None

    def arguments_for(self, claim_id: str) -> list[ArgumentNode]:
        """Arguments whose top claim is ``claim_id``, ordered by id."""
        return sorted(
            (a for a in self.arguments.values() if a.top == claim_id),
            key=lambda a: a.id,
        )

    def support_edges(self) -> Iterable[tuple[str, str]]:
        """Edges parent -> child of the support relation, side claims included."""
        for arg in self.arguments.values():
            for child in arg.supports:
                yield arg.top, child
            if arg.side is not None:
                yield arg.top, arg.side

    def descendants(self, node_id: str) -> set[str]:
        children: dict[str, list[str]] = {}
        for parent, child in self.support_edges():
            children.setdefault(parent, []).append(child)
        seen: set[str] = set()
        stack = [node_id]
        while stack:
            for child in children.get(stack.pop(), ()):
                if child not in seen:
                    seen.add(child)
                    stack.append(child)
        return seen

    def roots(self) -> list[str]:
        """Claims that are not supported by (nor side claims of) anything."""
        children = {child for _, child in self.support_edges()}
        return sorted(c for c in self.claims if c not in children)


def find_cycles(nodes: Iterable[str], edges: Iterable[tuple[str, str]]) -> list[list[str]]:
    """Return the cyclic strongly connected components, each sorted.

    Iterative Tarjan; a single node is reported only if it has a self-loop.
    """
    succ: dict[str, list[str]] = {n: [] for n in nodes}
    loops = set()
    for a, b in edges:
        succ.setdefault(a, []).append(b)
        succ.setdefault(b, [])
        if a == b:
            loops.add(a)

    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    result: list[list[str]] = []
    counter = 0

    for start in sorted(succ):
        if start in index:
            continue
        work = [(start, iter(succ[start]))]
        index[start] = low[start] = counter
        counter += 1
        stack.append(start)
        on_stack.add(start)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(succ[nxt])))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    comp.append(member)
                    if member == node:
                        break
                if len(comp) > 1 or node in loops:
                    result.append(sorted(comp))
    return sorted(result)


def _diag(severity, rule, node, message):
    return Diagnostic(severity, rule, message, node=node)


E, W, I = Severity.ERROR, Severity.WARNING, Severity.INFO


def check_wellformed(graph: CaseGraph) -> list[Diagnostic]:
    """Return every well-formedness violation, sorted by node id then rule id.

    Errors make the graph unusable for status propagation and serialization;
    warnings and infos (e.g. assumptions) do not.
    """
    out: list[Diagnostic] = []
    seen_kind: dict[str, str] = {}
    for kind in ("claims", "evidence", "arguments", "defeaters"):
        for key, node in getattr(graph, kind).items():
            if key != node.id:
                out.append(_diag(E, "key-mismatch", node.id, f"node {node.id!r} stored under key {key!r}"))
            if not is_valid_id(node.id):
                out.append(_diag(E, "bad-id", node.id, f"invalid node id {node.id!r}"))
            if node.id in seen_kind:
                out.append(_diag(E, "duplicate-id", node.id,
                                 f"id {node.id!r} used by both {seen_kind[node.id]} and {kind}"))
            else:
                seen_kind[node.id] = kind

    supported = {a.top for a in graph.arguments.values()}

    for c in graph.claims.values():
        if not c.text:
            out.append(_diag(E, "empty-text", c.id, f"claim {c.id} has empty text"))
        if c.declared_status is not None and c.id in supported:
            out.append(_diag(W, "declared-on-supported", c.id,
                             f"declared status of supported claim {c.id} is ignored"))
        if c.declared_status is Status.EXPANDED and c.expands is None:
            out.append(_diag(W, "expanded-without-target", c.id,
                             f"claim {c.id} is purple but names no expansion"))
        if c.expands is not None and c.id in supported:
            out.append(_diag(W, "expands-with-support", c.id,
                             f"claim {c.id} has an expansion; its arguments are ignored"))
        if c.id not in supported and c.expands is None:
            out.append(_diag(I, "assumption", c.id,
                             f"claim {c.id} has no supporting argument and is an assumption"))

    for e in graph.evidence.values():
        if not e.text:
            out.append(_diag(E, "empty-text", e.id, f"evidence {e.id} has empty text"))
        if e.declared_status is Status.EXPANDED:
            out.append(_diag(W, "expanded-without-target", e.id,
                             f"evidence {e.id} cannot be expanded"))

    for a in graph.arguments.values():
        if a.top not in graph.claims:
            if a.top in graph.evidence:
                out.append(_diag(E, "evidence-has-children", a.id,
                                 f"argument {a.id} uses evidence {a.top} as its top claim"))
            else:
                out.append(_diag(E, "dangling-ref", a.id, f"argument {a.id} top {a.top!r} is not a claim"))
        if not a.supports:
            out.append(_diag(E, "empty-supports", a.id, f"argument {a.id} has no supports"))
        for s in a.supports:
            if s not in graph.claims and s not in graph.evidence:
                out.append(_diag(E, "dangling-ref", a.id,
                                 f"argument {a.id} support {s!r} is not a claim or evidence"))
        if a.side is not None and a.side not in graph.claims:
            out.append(_diag(E, "dangling-ref", a.id, f"argument {a.id} side {a.side!r} is not a claim"))

    for d in graph.defeaters.values():
        if not d.text:
            out.append(_diag(E, "empty-text", d.id, f"defeater {d.id} has empty text"))
        if graph.node_kind(d.target) in (None, "defeaters"):
            out.append(_diag(E, "dangling-ref", d.id, f"defeater {d.id} target {d.target!r} does not exist"))

    nodes = list(graph.claims) + list(graph.evidence)
    for comp in find_cycles(nodes, graph.support_edges()):
        out.append(_diag(E, "cycle", comp[0], "support cycle through " + ", ".join(comp)))

    out.sort(key=lambda d: (d.node or "", d.rule, d.message))
    return out


def errors(diagnostics: Iterable[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diagnostics if d.is_error]
