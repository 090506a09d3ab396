"""FRAM service models: functions with six aspects and their couplings.

File format::

    function <id> "<name>" owner=<label>
    port <function> <I|O|P|R|C|T> <name>
    couple <fn>.<output> -> <fn>.<aspect>.<port>
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..casl import ParseError, _LineError, split_lines, tokenize_line
from ..model import Diagnostic, Severity, is_valid_id

PORT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_-]*\Z")


class Aspect(enum.Enum):
    INPUT = "I"
    OUTPUT = "O"
    PRECONDITION = "P"
    RESOURCE = "R"
    CONTROL = "C"
    TIME = "T"


@dataclass(frozen=True)
class FramFunction:
    id: str
    name: str
    owner: str
    ports: tuple[tuple[Aspect, str], ...] = ()

    def aspect_of(self, port: str) -> Optional[Aspect]:
        for aspect, name in self.ports:
            if name == port:
                return aspect
        return None

    def ports_of(self, aspect: Aspect) -> list[str]:
        return [name for a, name in self.ports if a is aspect]


@dataclass(frozen=True)
class FramCoupling:
    source: str
    output: str
    target: str
    aspect: Aspect
    port: str
    line: Optional[int] = field(default=None, compare=False)

    def __str__(self) -> str:
        return f"{self.source}.{self.output} -> {self.target}.{self.aspect.value}.{self.port}"


def _d(severity, rule, node, message):
    return Diagnostic(severity, rule, message, node=node)


def validate_fram(functions: Iterable[FramFunction], couplings: Iterable[FramCoupling]) -> list[Diagnostic]:
    """Structural checks: dangling endpoints are errors, unused ports warnings."""
    out = []
    fns: dict[str, FramFunction] = {}
    for fn in functions:
        if fn.id in fns:
            out.append(_d(Severity.ERROR, "duplicate-function", fn.id, f"function {fn.id} defined twice"))
            continue
        fns[fn.id] = fn
        names = [n for _, n in fn.ports]
        for dup in sorted({n for n in names if names.count(n) > 1}):
            out.append(_d(Severity.ERROR, "duplicate-port", fn.id, f"function {fn.id} has port {dup!r} twice"))

    fed: set[tuple[str, str]] = set()
    used: set[tuple[str, str]] = set()
    couplings = list(couplings)
    for c in couplings:
        src, dst = fns.get(c.source), fns.get(c.target)
        problems = []
        if src is None:
            problems.append(f"unknown function {c.source!r}")
        elif src.aspect_of(c.output) is None:
            problems.append(f"{c.source} has no port {c.output!r}")
        elif src.aspect_of(c.output) is not Aspect.OUTPUT:
            problems.append(f"{c.source}.{c.output} is not an output")
        if c.aspect is Aspect.OUTPUT:
            problems.append("target aspect cannot be an output")
        if dst is None:
            problems.append(f"unknown function {c.target!r}")
        elif dst.aspect_of(c.port) is None:
            problems.append(f"{c.target} has no port {c.port!r}")
        elif dst.aspect_of(c.port) is not c.aspect:
            problems.append(f"{c.target}.{c.port} is a {dst.aspect_of(c.port).name.lower()} port, "
                            f"not {c.aspect.name.lower()}")
        if problems:
            out.append(_d(Severity.ERROR, "dangling-coupling", c.source,
                          f"coupling {c}: " + "; ".join(problems)))
            continue
        used.add((c.source, c.output))
        fed.add((c.target, c.port))
        if c.source == c.target:
            out.append(_d(Severity.WARNING, "self-loop", c.source, f"coupling {c} feeds its own function"))

    for fn in fns.values():
        for port in fn.ports_of(Aspect.OUTPUT):
            if (fn.id, port) not in used:
                out.append(_d(Severity.WARNING, "dangling-output", fn.id,
                              f"output {fn.id}.{port} is not coupled to any function"))
        for aspect in (Aspect.PRECONDITION, Aspect.RESOURCE, Aspect.CONTROL, Aspect.TIME):
            for port in fn.ports_of(aspect):
                if (fn.id, port) not in fed:
                    out.append(_d(Severity.WARNING, "unfed-aspect", fn.id,
                                  f"{aspect.name.lower()} {fn.id}.{port} is never fed"))
    out.sort(key=lambda d: (d.node or "", d.rule, d.message))
    return out


def parse_fram(text: str) -> tuple[list[FramFunction], list[FramCoupling]]:
    order: list[str] = []
    heads: dict[str, tuple[str, str]] = {}
    ports: dict[str, list[tuple[Aspect, str]]] = {}
    port_lines: list[tuple[int, str]] = []
    couplings: list[FramCoupling] = []
    diags = []

    def err(line, message, column=1):
        diags.append(Diagnostic(Severity.ERROR, "syntax", message, line=line, column=column))

    for lineno, raw in enumerate(split_lines(text), start=1):
        try:
            toks = tokenize_line(raw)
        except _LineError as exc:
            err(lineno, exc.message, exc.column)
            continue
        if not toks:
            continue
        kind, rest = toks[0].value, toks[1:]
        if kind == "function":
            if (len(rest) != 3 or rest[0].key or not is_valid_id(rest[0].value)
                    or not rest[1].quoted or rest[1].key or rest[2].key != "owner" or not rest[2].value):
                err(lineno, 'expected: function <id> "<name>" owner=<label>')
            elif rest[0].value in heads:
                err(lineno, f"duplicate function {rest[0].value!r}")
            else:
                fid = rest[0].value
                order.append(fid)
                heads[fid] = (rest[1].value, rest[2].value)
                ports.setdefault(fid, [])
        elif kind == "port":
            vals = [t.value for t in rest if t.key is None and not t.quoted]
            if len(vals) != 3 or len(rest) != 3 or vals[1] not in {a.value for a in Aspect} \
                    or not PORT_RE.match(vals[2]):
                err(lineno, "expected: port <function> <I|O|P|R|C|T> <name>")
            else:
                ports.setdefault(vals[0], []).append((Aspect(vals[1]), vals[2]))
                port_lines.append((lineno, vals[0]))
        elif kind == "couple":
            vals = [t.value for t in rest]
            if len(vals) != 3 or vals[1] != "->" or any(t.key or t.quoted for t in rest):
                err(lineno, "expected: couple <fn>.<output> -> <fn>.<aspect>.<port>")
                continue
            src = vals[0].rsplit(".", 1)
            dst = vals[2].rsplit(".", 2)
            if len(src) != 2 or len(dst) != 3 or dst[1] not in {a.value for a in Aspect}:
                err(lineno, f"malformed coupling endpoints {vals[0]!r} -> {vals[2]!r}")
                continue
            couplings.append(FramCoupling(src[0], src[1], dst[0], Aspect(dst[1]), dst[2], line=lineno))
        else:
            err(lineno, f"unknown keyword {kind!r}")
    for lineno, fid in port_lines:
        if fid not in heads:
            err(lineno, f"port declared for unknown function {fid!r}")
    if diags:
        diags.sort(key=lambda d: (d.line or 0, d.column or 0))
        raise ParseError(diags)
    functions = [FramFunction(fid, heads[fid][0], heads[fid][1], tuple(ports[fid])) for fid in order]
    return functions, couplings
