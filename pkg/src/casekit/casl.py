"""Reader and writer for ``.casl``, the line-oriented assurance case format.

One statement per line, ``#`` starts a comment, blank lines are ignored::

    case "<title>"
    claim <id> "<text>" [status=<colour>] [expands=<path>]
    evidence <id> "<text>" [status=<colour>]
    argument <id> block=<block> claim=<id> from=<id>[,<id>...] [side=<id>]
    defeater <id> kind=<undercut|rebut> target=<id> "<text>" [resolved=<true|false>]
    prob <evidence-id> given=<claim-id> p_e_h=<float> p_e_nh=<float>

The parser collects every error of a document in one pass and raises
:class:`ParseError` carrying all of them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Optional, Union

from .model import (
    ArgumentNode,
    BlockType,
    CaseGraph,
    ClaimNode,
    Defeater,
    DefeaterKind,
    Diagnostic,
    EvidenceNode,
    Severity,
    Status,
    check_wellformed,
    errors,
    is_valid_id,
)

KEYWORDS = ("case", "claim", "evidence", "argument", "defeater", "prob")
FLOAT_RE = re.compile(r"(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)\Z")
BARE_RE = re.compile(r"[^\s\"#][^\s\"]*\Z")

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "r": "\r", "t": "\t"}
_UNESCAPES = {v: "\\" + k for k, v in _ESCAPES.items()}


class ParseError(ValueError):
    """Raised when a document has syntax errors; ``diagnostics`` lists them all."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        first = diagnostics[0] if diagnostics else None
        super().__init__(f"{len(diagnostics)} syntax error(s); first: {first}")


class SerializeError(ValueError):
    pass


@dataclass(frozen=True)
class ProbRecord:
    """Likelihoods of one evidence item with respect to one claim."""

    evidence: str
    given: str
    p_e_h: float
    p_e_nh: float
    line: Optional[int] = field(default=None, compare=False)


@dataclass
class Token:
    value: str
    column: int
    key: Optional[str] = None  # set for key=value attributes
    quoted: bool = False


@dataclass
class Statement:
    line: int
    kind: str
    positional: list[Token]
    attrs: dict[str, Token]
    column: int = 1


class _LineError(Exception):
    def __init__(self, column, message):
        self.column = column
        self.message = message


def _read_string(line: str, pos: int) -> tuple[str, int]:
    """Read a quoted string starting at ``line[pos] == '"'``; return (text, end)."""
    out = []
    i = pos + 1
    while i < len(line):
        ch = line[i]
        if ch == '"':
            return "".join(out), i + 1
        if ch == "\\":
            if i + 1 >= len(line) or line[i + 1] not in _ESCAPES:
                raise _LineError(i + 1, "invalid escape sequence in string")
            out.append(_ESCAPES[line[i + 1]])
            i += 2
            continue
        out.append(ch)
        i += 1
    raise _LineError(pos + 1, "unterminated string")


def _read_bare(line: str, pos: int, stop_at_eq: bool) -> tuple[str, int]:
    i = pos
    while i < len(line) and not line[i].isspace() and line[i] != '"':
        if stop_at_eq and line[i] == "=":
            break
        i += 1
    return line[pos:i], i


def tokenize_line(line: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    n = len(line)
    while i < n:
        ch = line[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "#":
            break
        col = i + 1
        if ch == '"':
            text, i = _read_string(line, i)
            tokens.append(Token(text, col, quoted=True))
        else:
            word, i = _read_bare(line, i, stop_at_eq=True)
            if i < n and line[i] == "=":
                if not word:
                    raise _LineError(col, "attribute with empty name")
                i += 1
                if i < n and line[i] == '"':
                    value, i = _read_string(line, i)
                    tokens.append(Token(value, col, key=word, quoted=True))
                else:
                    value, i = _read_bare(line, i, stop_at_eq=False)
                    tokens.append(Token(value, col, key=word))
            else:
                tokens.append(Token(word, col))
        if i < n and not line[i].isspace() and line[i] != "#":
            raise _LineError(i + 1, f"unexpected character {line[i]!r}")
    return tokens


def split_lines(text: str) -> list[str]:
    """Split on LF, dropping one trailing CR per line."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [ln[:-1] if ln.endswith("\r") else ln for ln in lines]


def _decode(data: Union[str, bytes]) -> str:
    if isinstance(data, str):
        return data
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = data[: exc.start].count(b"\n") + 1
        raise ParseError([Diagnostic(Severity.ERROR, "encoding", "input is not valid UTF-8",
                                     line=line, column=1)]) from None
    return text[1:] if text.startswith("\ufeff") else text


def iter_statements(text: str) -> tuple[list[Statement], list[Diagnostic]]:
    statements: list[Statement] = []
    diags: list[Diagnostic] = []
    for lineno, raw in enumerate(split_lines(text), start=1):
        try:
            tokens = tokenize_line(raw)
        except _LineError as exc:
            diags.append(Diagnostic(Severity.ERROR, "syntax", exc.message, line=lineno, column=exc.column))
            continue
        if not tokens:
            continue
        head = tokens[0]
        if head.key is not None or head.quoted or head.value not in KEYWORDS:
            diags.append(Diagnostic(Severity.ERROR, "unknown-keyword",
                                    f"unknown keyword {head.key or head.value!r}",
                                    line=lineno, column=head.column))
            continue
        positional: list[Token] = []
        attrs: dict[str, Token] = {}
        bad = False
        for tok in tokens[1:]:
            if tok.key is None:
                positional.append(tok)
            elif tok.key in attrs:
                diags.append(Diagnostic(Severity.ERROR, "malformed-attribute",
                                        f"duplicate attribute {tok.key!r}", line=lineno, column=tok.column))
                bad = True
            else:
                attrs[tok.key] = tok
        if not bad:
            statements.append(Statement(lineno, head.value, positional, attrs, head.column))
    return statements, diags


# shape of each statement: positional slots ("id" or "text") and attributes
_SHAPES = {
    "case": (("text",), (), ()),
    "claim": (("id", "text"), (), ("status", "expands")),
    "evidence": (("id", "text"), (), ("status",)),
    "argument": (("id",), ("block", "claim", "from"), ("side",)),
    "defeater": (("id", "text"), ("kind", "target"), ("resolved",)),
    "prob": (("id",), ("given", "p_e_h", "p_e_nh"), ()),
}


class _Builder:
    def __init__(self):
        self.diags: list[Diagnostic] = []
        self.title: Optional[str] = None
        self.claims: dict[str, ClaimNode] = {}
        self.evidence: dict[str, EvidenceNode] = {}
        self.arguments: dict[str, ArgumentNode] = {}
        self.defeaters: dict[str, Defeater] = {}
        self.probs: list[ProbRecord] = []
        self.prob_keys: dict[tuple[str, str], int] = {}
        self.id_lines: dict[str, int] = {}

    def error(self, st, tok, rule, message):
        col = tok.column if tok is not None else st.column
        self.diags.append(Diagnostic(Severity.ERROR, rule, message, line=st.line, column=col))

    def ident(self, st, tok, what):
        if tok.quoted or not is_valid_id(tok.value):
            self.error(st, tok, "bad-id", f"invalid {what} id {tok.value!r}")
            return None
        return tok.value

    def check_shape(self, st) -> bool:
        slots, required, optional = _SHAPES[st.kind]
        ok = True
        kinds = []
        for tok in st.positional:
            kinds.append("text" if tok.quoted else "id")
        if kinds != list(slots):
            expected = " ".join(f"<{s}>" for s in slots)
            self.error(st, st.positional[0] if st.positional else None, "syntax",
                       f"{st.kind} expects {expected}")
            ok = False
        for key, tok in st.attrs.items():
            if key not in required and key not in optional:
                self.error(st, tok, "malformed-attribute", f"unknown attribute {key!r} for {st.kind}")
                ok = False
        for key in required:
            if key not in st.attrs:
                self.error(st, None, "malformed-attribute", f"{st.kind} requires {key}=")
                ok = False
        return ok

    def claim_id(self, st, tok):
        node_id = self.ident(st, tok, st.kind)
        if node_id is None:
            return None
        if node_id in self.id_lines:
            self.error(st, tok, "duplicate-id",
                       f"duplicate id {node_id!r} (first defined on line {self.id_lines[node_id]})")
            return None
        self.id_lines[node_id] = st.line
        return node_id

    def status(self, st):
        tok = st.attrs.get("status")
        if tok is None:
            return True, None
        try:
            return True, Status.from_colour(tok.value)
        except ValueError:
            self.error(st, tok, "malformed-attribute", f"unknown status {tok.value!r}")
            return False, None

    def probability(self, st, key):
        tok = st.attrs[key]
        if tok.quoted or not FLOAT_RE.match(tok.value):
            self.error(st, tok, "bad-probability", f"{key} must be a decimal literal, got {tok.value!r}")
            return None
        value = float(tok.value)
        if not 0.0 <= value <= 1.0:
            self.error(st, tok, "bad-probability", f"{key}={tok.value} is outside [0, 1]")
            return None
        return value

    def add(self, st: Statement):
        if not self.check_shape(st):
            return
        getattr(self, "_" + st.kind)(st)

    def _case(self, st):
        if self.title is not None:
            self.error(st, None, "duplicate-header", "more than one case header")
            return
        self.title = st.positional[0].value

    def _claim(self, st):
        node_id = self.claim_id(st, st.positional[0])
        ok, status = self.status(st)
        expands = st.attrs.get("expands")
        if expands is not None and not expands.value:
            self.error(st, expands, "malformed-attribute", "empty expands path")
            ok = False
        if node_id is not None and ok:
            self.claims[node_id] = ClaimNode(node_id, st.positional[1].value, status,
                                             expands.value if expands is not None else None)

    def _evidence(self, st):
        node_id = self.claim_id(st, st.positional[0])
        ok, status = self.status(st)
        if node_id is not None and ok:
            self.evidence[node_id] = EvidenceNode(node_id, st.positional[1].value, status)

    def _argument(self, st):
        node_id = self.claim_id(st, st.positional[0])
        ok = True
        block_tok = st.attrs["block"]
        try:
            block = BlockType(block_tok.value)
        except ValueError:
            self.error(st, block_tok, "malformed-attribute", f"unknown block {block_tok.value!r}")
            ok = False
        top = self.ident(st, st.attrs["claim"], "claim")
        from_tok = st.attrs["from"]
        supports = []
        for part in from_tok.value.split(","):
            if from_tok.quoted or not is_valid_id(part):
                self.error(st, from_tok, "bad-id", f"invalid support id {part!r}")
                ok = False
            supports.append(part)
        side = None
        if "side" in st.attrs:
            side = self.ident(st, st.attrs["side"], "side claim")
            ok = ok and side is not None
        if node_id is not None and top is not None and ok:
            self.arguments[node_id] = ArgumentNode(node_id, block, top, tuple(supports), side)

    def _defeater(self, st):
        node_id = self.claim_id(st, st.positional[0])
        ok = True
        kind_tok = st.attrs["kind"]
        try:
            kind = DefeaterKind(kind_tok.value)
        except ValueError:
            self.error(st, kind_tok, "malformed-attribute", f"unknown defeater kind {kind_tok.value!r}")
            ok = False
        target = self.ident(st, st.attrs["target"], "target")
        resolved = False
        if "resolved" in st.attrs:
            tok = st.attrs["resolved"]
            if tok.value not in ("true", "false"):
                self.error(st, tok, "malformed-attribute", f"resolved must be true or false, got {tok.value!r}")
                ok = False
            resolved = tok.value == "true"
        if node_id is not None and target is not None and ok:
            self.defeaters[node_id] = Defeater(node_id, kind, target, st.positional[1].value, resolved)

    def _prob(self, st):
        evidence = self.ident(st, st.positional[0], "evidence")
        given = self.ident(st, st.attrs["given"], "claim")
        p_e_h = self.probability(st, "p_e_h")
        p_e_nh = self.probability(st, "p_e_nh")
        if None in (evidence, given, p_e_h, p_e_nh):
            return
        key = (evidence, given)
        if key in self.prob_keys:
            self.error(st, st.positional[0], "duplicate-id",
                       f"duplicate prob for {evidence} given {given} (first on line {self.prob_keys[key]})")
            return
        self.prob_keys[key] = st.line
        self.probs.append(ProbRecord(evidence, given, p_e_h, p_e_nh, line=st.line))


def parse(data: Union[str, bytes]) -> tuple[CaseGraph, list[ProbRecord]]:
    """Parse a ``.casl`` document into a graph and its prob records.

    Raises :class:`ParseError` listing every syntax error in the document.
    Referential problems (dangling ids, cycles) are not syntax errors; they
    are reported by :func:`casekit.model.check_wellformed`.
    """
    text = _decode(data)
    statements, diags = iter_statements(text)
    builder = _Builder()
    for st in statements:
        builder.add(st)
    diags.extend(builder.diags)
    if diags:
        diags.sort(key=lambda d: (d.line or 0, d.column or 0, d.rule))
        raise ParseError(diags)
    graph = CaseGraph(builder.title or "", builder.claims, builder.evidence,
                      builder.arguments, builder.defeaters)
    return graph, builder.probs


def quote(text: str) -> str:
    return '"' + "".join(_UNESCAPES.get(ch, ch) for ch in text) + '"'


def _value(text: str) -> str:
    return text if BARE_RE.match(text) else quote(text)


def format_float(value: float) -> str:
    """Shortest decimal (never exponent) form that reads back to ``value``."""
    text = repr(float(value))
    if "e" in text or "E" in text:
        text = format(Decimal(text), "f")
    if "." not in text:
        text += ".0"
    return text


def serialize(graph: CaseGraph, probs=()) -> str:
    """Write the canonical form of ``graph`` (and optional prob records).

    Raises :class:`SerializeError` when the graph has error diagnostics.
    """
    bad = errors(check_wellformed(graph))
    if bad:
        raise SerializeError(f"cannot serialize a malformed case: {bad[0]}")
    lines = [f"case {quote(graph.title)}"]
    for cid in sorted(graph.claims):
        c = graph.claims[cid]
        line = f"claim {c.id} {quote(c.text)}"
        if c.declared_status is not None:
            line += f" status={c.declared_status.colour}"
        if c.expands is not None:
            line += f" expands={_value(c.expands)}"
        lines.append(line)
    for eid in sorted(graph.evidence):
        e = graph.evidence[eid]
        line = f"evidence {e.id} {quote(e.text)}"
        if e.declared_status is not None:
            line += f" status={e.declared_status.colour}"
        lines.append(line)
    for aid in sorted(graph.arguments):
        a = graph.arguments[aid]
        line = f"argument {a.id} block={a.block.value} claim={a.top} from={','.join(a.supports)}"
        if a.side is not None:
            line += f" side={a.side}"
        lines.append(line)
    for did in sorted(graph.defeaters):
        d = graph.defeaters[did]
        line = f"defeater {d.id} kind={d.kind.value} target={d.target} {quote(d.text)}"
        if d.resolved:
            line += " resolved=true"
        lines.append(line)
    seen = set()
    for p in sorted(probs, key=lambda p: (p.evidence, p.given)):
        if not (is_valid_id(p.evidence) and is_valid_id(p.given)):
            raise SerializeError(f"invalid id in prob record {p}")
        if (p.evidence, p.given) in seen:
            raise SerializeError(f"duplicate prob record for {p.evidence} given {p.given}")
        seen.add((p.evidence, p.given))
        for v in (p.p_e_h, p.p_e_nh):
            if not 0.0 <= v <= 1.0:
                raise SerializeError(f"probability {v} outside [0, 1]")
        lines.append(f"prob {p.evidence} given={p.given} "
                     f"p_e_h={format_float(p.p_e_h)} p_e_nh={format_float(p.p_e_nh)}")
    return "\n".join(lines) + "\n"
