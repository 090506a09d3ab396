"""Effective status computation over a case graph.

Roll-up rules:

* a leaf claim or evidence item takes its declared status (default white);
* an argument takes the lattice minimum of its children and side claim;
* a supported claim takes the lattice maximum over its arguments;
* a claim with ``expands`` takes the effective status of the expansion's
  top claim(s);
* an unresolved undercut caps its target at orange, a rebuttal at red.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

from .model import LATTICE, CaseGraph, DefeaterKind, Status

Loader = Callable[[str], CaseGraph]

DECLARED = "declared"
ROLLED_UP = "rolled-up"
EXPANDED = "expanded"
CAPPED = "capped-by-defeater"

CAPS = {DefeaterKind.UNDERCUT: Status.PARTIAL, DefeaterKind.REBUTTAL: Status.DEFERRED}


class StatusError(Exception):
    pass


class MissingExpansion(StatusError):
    pass


class ExpansionCycle(StatusError):
    pass


def lattice_min(statuses) -> Status:
    return min(statuses, key=lambda s: s.rank)


def lattice_max(statuses) -> Status:
    return max(statuses, key=lambda s: s.rank)


@dataclass(frozen=True)
class StatusMap:
    statuses: Mapping[str, Status]
    provenance: Mapping[str, str]
    arguments: Mapping[str, Status] = field(default_factory=dict)

    def __getitem__(self, node_id: str) -> Status:
        return self.statuses[node_id]

    def __contains__(self, node_id) -> bool:
        return node_id in self.statuses

    def __len__(self) -> int:
        return len(self.statuses)


def _effective(declared: Optional[Status]) -> Status:
    if declared is None or declared is Status.EXPANDED:
        return Status.UNEVALUATED
    return declared


def propagate(graph: CaseGraph, loader: Optional[Loader] = None, *, _stack=()) -> StatusMap:
    """Compute the effective status of every claim and evidence item.

    ``loader`` maps an ``expands`` path to the graph it names. Raises
    :class:`MissingExpansion` if a path cannot be loaded and
    :class:`ExpansionCycle` if expansions refer back to themselves.
    """
    caps: dict[str, list[Status]] = {}
    for d in graph.defeaters.values():
        if not d.resolved:
            caps.setdefault(d.target, []).append(CAPS[d.kind])

    values: dict[str, Status] = {}
    provenance: dict[str, str] = {}
    arg_values: dict[str, Status] = {}
    args_by_top: dict[str, list[str]] = {}
    for a in graph.arguments.values():
        args_by_top.setdefault(a.top, []).append(a.id)

    def apply_caps(node_id, value, prov):
        limit = caps.get(node_id)
        if limit:
            capped = lattice_min([value, *limit])
            if capped is not value:
                return capped, CAPPED
        return value, prov

    def deps(node_id):
        if node_id in graph.arguments:
            a = graph.arguments[node_id]
            return list(a.supports) + ([a.side] if a.side is not None else [])
        c = graph.claims.get(node_id)
        if c is not None and c.expands is None:
            return args_by_top.get(node_id, [])
        return []

    def evaluate(node_id):
        if node_id in graph.evidence:
            e = graph.evidence[node_id]
            values[node_id], provenance[node_id] = apply_caps(node_id, _effective(e.declared_status), DECLARED)
        elif node_id in graph.arguments:
            a = graph.arguments[node_id]
            children = [values[s] for s in deps(node_id)]
            arg_values[node_id], _ = apply_caps(node_id, lattice_min(children), ROLLED_UP)
        else:
            c = graph.claims[node_id]
            if c.expands is not None:
                value, prov = _expand(c.expands, loader, _stack), EXPANDED
            elif node_id in args_by_top:
                value = lattice_max(arg_values[a] for a in args_by_top[node_id])
                prov = ROLLED_UP
            else:
                value, prov = _effective(c.declared_status), DECLARED
            values[node_id], provenance[node_id] = apply_caps(node_id, value, prov)

    # iterative post-order so deep chains do not hit the recursion limit
    done: set[str] = set()
    active: set[str] = set()
    for start in sorted(graph.claims) + sorted(graph.evidence) + sorted(graph.arguments):
        if start in done:
            continue
        stack = [(start, False)]
        while stack:
            node_id, ready = stack.pop()
            if node_id in done:
                continue
            if ready:
                evaluate(node_id)
                done.add(node_id)
                active.discard(node_id)
                continue
            if node_id in active:
                raise StatusError(f"support cycle through {node_id}")
            active.add(node_id)
            stack.append((node_id, True))
            for dep in deps(node_id):
                if dep not in done:
                    stack.append((dep, False))

    return StatusMap(values, provenance, arg_values)


def _expand(path: str, loader: Optional[Loader], stack) -> Status:
    key = os.path.normpath(path)
    if key in stack:
        raise ExpansionCycle(" -> ".join([*stack, key]))
    if loader is None:
        raise MissingExpansion(f"no loader available for expansion {path!r}")
    try:
        sub = loader(path)
    except (OSError, KeyError) as exc:
        raise MissingExpansion(f"cannot load expansion {path!r}: {exc}") from exc
    sub_map = propagate(sub, loader, _stack=(*stack, key))
    roots = sub.roots()
    if not roots:
        return Status.UNEVALUATED
    return lattice_min(sub_map[r] for r in roots)


class FileLoader:
    """Resolve expansion paths relative to a base directory, with caching."""

    def __init__(self, base_dir: str, parse):
        self.base_dir = base_dir
        self.parse = parse
        self._cache: dict[str, CaseGraph] = {}

    def __call__(self, path: str) -> CaseGraph:
        full = os.path.normpath(os.path.join(self.base_dir, path))
        if full not in self._cache:
            with open(full, encoding="utf-8") as fh:
                self._cache[full] = self.parse(fh.read())[0]
        return self._cache[full]


@dataclass(frozen=True)
class ReportRow:
    id: str
    text: str
    status: Status
    provenance: str

    @property
    def colour(self) -> str:
        return self.status.colour

    def to_dict(self) -> dict:
        return {"id": self.id, "text": self.text, "status": self.colour, "provenance": self.provenance}


@dataclass(frozen=True)
class Report:
    rows: tuple[ReportRow, ...]
    counts: Mapping[str, int]

    def text(self) -> str:
        lines = []
        width = max([len(r.id) for r in self.rows] + [2])
        for r in self.rows:
            lines.append(f"{r.id:<{width}}  {r.colour:<6}  {r.provenance:<18}  {r.text}")
        lines.append("counts: " + " ".join(f"{c}={n}" for c, n in self.counts.items()))
        return "\n".join(lines) + "\n"


def report(status_map: StatusMap, graph: CaseGraph) -> Report:
    rows = []
    for node_id in sorted(list(graph.claims) + list(graph.evidence)):
        node = graph.claims.get(node_id) or graph.evidence[node_id]
        rows.append(ReportRow(node_id, node.text, status_map[node_id], status_map.provenance[node_id]))
    counts = {s.colour: 0 for s in Status}
    for r in rows:
        counts[r.colour] += 1
    return Report(tuple(rows), counts)


def _dot_str(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def emit_dot(graph: CaseGraph, status_map: StatusMap) -> str:
    """Render a Graphviz digraph; output is byte-stable for equal inputs."""
    out = [f"digraph {_dot_str(graph.title or 'case')} {{",
           "  rankdir=TB;",
           '  node [style=filled, fontname="Helvetica"];']
    for cid in sorted(graph.claims):
        c = graph.claims[cid]
        extra = ", peripheries=2" if c.expands is not None else ""
        out.append(f"  {_dot_str(cid)} [shape=box, fillcolor={status_map[cid].colour}, "
                   f"label={_dot_str(cid + chr(10) + c.text)}{extra}];")
    for eid in sorted(graph.evidence):
        e = graph.evidence[eid]
        out.append(f"  {_dot_str(eid)} [shape=folder, fillcolor={status_map[eid].colour}, "
                   f"label={_dot_str(eid + chr(10) + e.text)}];")
    for aid in sorted(graph.arguments):
        a = graph.arguments[aid]
        out.append(f"  {_dot_str(aid)} [shape=ellipse, fillcolor=white, "
                   f"label={_dot_str(aid + chr(10) + a.block.value)}];")
    for did in sorted(graph.defeaters):
        d = graph.defeaters[did]
        out.append(f"  {_dot_str(did)} [shape=octagon, fillcolor=lightgrey, "
                   f"label={_dot_str(did + chr(10) + d.text)}];")
    for aid in sorted(graph.arguments):
        a = graph.arguments[aid]
        out.append(f"  {_dot_str(a.top)} -> {_dot_str(aid)};")
        for s in a.supports:
            out.append(f"  {_dot_str(aid)} -> {_dot_str(s)};")
        if a.side is not None:
            out.append(f'  {_dot_str(aid)} -> {_dot_str(a.side)} [style=dotted, label="side"];')
    for did in sorted(graph.defeaters):
        d = graph.defeaters[did]
        label = d.kind.value + (" (resolved)" if d.resolved else "")
        out.append(f"  {_dot_str(did)} -> {_dot_str(d.target)} [style=dashed, label={_dot_str(label)}];")
    out.append("}")
    return "\n".join(out) + "\n"


__all__ = [
    "LATTICE", "Status", "StatusMap", "StatusError", "MissingExpansion", "ExpansionCycle",
    "propagate", "report", "emit_dot", "Report", "ReportRow", "FileLoader",
    "lattice_min", "lattice_max",
]
