"""Outcome catalogues, service specifications, verification records.

Catalogue::

    outcome <id> "<outcome_text>" template="<requirement_template>" [source=table|appendix]

Service specifications::

    spec <SS-id> "<text>" [parent=<SS-id>]

Verification records::

    record <req-id> status=<colour> [revise=requirements|specs] [specs=SS-..,SS-..] "<justification>"
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from ..casl import ParseError, _LineError, split_lines, tokenize_line
from ..model import Diagnostic, Severity, Status, is_valid_id

SERVICE = "{service}"
SPEC_RE = re.compile(r"SS-[0-9]+\Z")
SENTENCE_RE = re.compile(r"(?<=[.!?])\s+")
RECORD_STATUSES = (Status.SATISFIED, Status.PARTIAL, Status.STANDARDS_ASSUMED, Status.DEFERRED)
REVISE = ("requirements", "specs")


class VerificationError(ValueError):
    pass


@dataclass(frozen=True)
class CatalogueEntry:
    id: str
    outcome_text: str
    template: str
    source: str = "table"
    line: Optional[int] = field(default=None, compare=False)


@dataclass(frozen=True)
class OutcomeRequirement:
    id: str
    outcome_text: str
    requirement_template: str
    derived_text: str
    source: str = "table"


@dataclass(frozen=True)
class ServiceSpec:
    id: str
    text: str
    parent: Optional[str] = None


@dataclass(frozen=True)
class VerificationRecord:
    requirement: str
    status: Status
    justification: str = ""
    specs: tuple[str, ...] = ()
    revise: Optional[str] = None
    line: Optional[int] = field(default=None, compare=False)


def _lines(text: str, keyword: str):
    """Yield (lineno, positional tokens, attrs) for each statement; collect errors."""
    diags = []
    rows = []
    for lineno, raw in enumerate(split_lines(text), start=1):
        try:
            toks = tokenize_line(raw)
        except _LineError as exc:
            diags.append(Diagnostic(Severity.ERROR, "syntax", exc.message, line=lineno, column=exc.column))
            continue
        if not toks:
            continue
        if toks[0].value != keyword or toks[0].key or toks[0].quoted:
            diags.append(Diagnostic(Severity.ERROR, "unknown-keyword", f"expected {keyword!r}",
                                    line=lineno, column=toks[0].column))
            continue
        pos = [t for t in toks[1:] if t.key is None]
        attrs = {}
        for t in toks[1:]:
            if t.key is not None:
                if t.key in attrs:
                    diags.append(Diagnostic(Severity.ERROR, "malformed-attribute",
                                            f"duplicate attribute {t.key!r}", line=lineno, column=t.column))
                attrs[t.key] = t
        rows.append((lineno, pos, attrs))
    return rows, diags


def _raise(diags):
    if diags:
        diags.sort(key=lambda d: (d.line or 0, d.column or 0))
        raise ParseError(diags)


def _err(diags, line, message):
    diags.append(Diagnostic(Severity.ERROR, "syntax", message, line=line, column=1))


def check_template(template: str) -> Optional[str]:
    for sentence in SENTENCE_RE.split(template):
        if sentence.count(SERVICE) > 1:
            return f"sentence {sentence!r} uses {SERVICE} more than once"
    return None


def parse_catalogue(text: str) -> list[CatalogueEntry]:
    rows, diags = _lines(text, "outcome")
    entries, seen = [], set()
    for lineno, pos, attrs in rows:
        if (len(pos) != 2 or pos[0].quoted or not is_valid_id(pos[0].value) or not pos[1].quoted
                or "template" not in attrs or set(attrs) - {"template", "source"}):
            _err(diags, lineno, 'expected: outcome <id> "<outcome>" template="<template>" [source=...]')
            continue
        oid = pos[0].value
        source = attrs["source"].value if "source" in attrs else "table"
        problem = check_template(attrs["template"].value)
        if oid in seen:
            _err(diags, lineno, f"duplicate outcome id {oid!r}")
        elif source not in ("table", "appendix"):
            _err(diags, lineno, f"unknown source {source!r}")
        elif problem:
            _err(diags, lineno, problem)
        else:
            seen.add(oid)
            entries.append(CatalogueEntry(oid, pos[1].value, attrs["template"].value, source, line=lineno))
    _raise(diags)
    return entries


def derive_requirements(catalogue: Union[str, Sequence[CatalogueEntry]], service: str) -> list[OutcomeRequirement]:
    """Instantiate each template for ``service``, in catalogue order."""
    if not service or not service.strip():
        raise ValueError("service name must be non-empty")
    entries = parse_catalogue(catalogue) if isinstance(catalogue, str) else catalogue
    return [OutcomeRequirement(e.id, e.outcome_text, e.template, e.template.replace(SERVICE, service), e.source)
            for e in entries]


def parse_specs(text: str) -> list[ServiceSpec]:
    rows, diags = _lines(text, "spec")
    specs: list[ServiceSpec] = []
    seen = set()
    parents = []
    for lineno, pos, attrs in rows:
        if len(pos) != 2 or pos[0].quoted or not pos[1].quoted or set(attrs) - {"parent"}:
            _err(diags, lineno, 'expected: spec <SS-id> "<text>" [parent=<SS-id>]')
            continue
        sid = pos[0].value
        parent = attrs["parent"].value if "parent" in attrs else None
        if not SPEC_RE.match(sid) or (parent is not None and not SPEC_RE.match(parent)):
            _err(diags, lineno, "service specification ids look like SS-<digits>")
        elif sid in seen:
            _err(diags, lineno, f"duplicate specification {sid!r}")
        else:
            seen.add(sid)
            specs.append(ServiceSpec(sid, pos[1].value, parent))
            if parent is not None:
                parents.append((lineno, parent))
    for lineno, parent in parents:
        if parent not in seen:
            _err(diags, lineno, f"unknown parent specification {parent!r}")
    _raise(diags)
    return specs


def parse_records(text: str) -> list[VerificationRecord]:
    rows, diags = _lines(text, "record")
    out = []
    for lineno, pos, attrs in rows:
        if (len(pos) != 2 or pos[0].quoted or not is_valid_id(pos[0].value) or not pos[1].quoted
                or "status" not in attrs or set(attrs) - {"status", "revise", "specs"}):
            _err(diags, lineno, 'expected: record <req-id> status=<colour> [revise=..] [specs=..] "<text>"')
            continue
        try:
            status = Status.from_colour(attrs["status"].value)
        except ValueError:
            status = None
        if status not in RECORD_STATUSES:
            _err(diags, lineno, f"record status must be green, orange, yellow or red, got {attrs['status'].value!r}")
            continue
        revise = attrs["revise"].value if "revise" in attrs else None
        if revise is not None and revise not in REVISE:
            _err(diags, lineno, f"revise must be requirements or specs, got {revise!r}")
            continue
        specs = tuple(attrs["specs"].value.split(",")) if "specs" in attrs else ()
        if any(not SPEC_RE.match(s) for s in specs):
            _err(diags, lineno, f"malformed specification list {attrs['specs'].value!r}")
            continue
        out.append(VerificationRecord(pos[0].value, status, pos[1].value, specs, revise, line=lineno))
    _raise(diags)
    return out


@dataclass(frozen=True)
class VerificationRow:
    requirement: OutcomeRequirement
    record: Optional[VerificationRecord]

    @property
    def status(self) -> Status:
        return self.record.status if self.record is not None else Status.UNEVALUATED

    def to_dict(self) -> dict:
        rec = self.record
        return {"id": self.requirement.id, "status": self.status.colour,
                "specs": list(rec.specs) if rec else [],
                "revise": rec.revise if rec else None,
                "justification": rec.justification if rec else "",
                "requirement": self.requirement.derived_text}


@dataclass(frozen=True)
class VerificationReport:
    rows: tuple[VerificationRow, ...]
    diagnostics: tuple[Diagnostic, ...] = ()

    def counts(self) -> dict[str, int]:
        counts = {s.colour: 0 for s in Status}
        for row in self.rows:
            counts[row.status.colour] += 1
        return counts

    def text(self) -> str:
        width = max([len(r.requirement.id) for r in self.rows] + [2])
        lines = []
        for r in self.rows:
            specs = ",".join(r.record.specs) if r.record and r.record.specs else "-"
            lines.append(f"{r.requirement.id:<{width}}  {r.status.colour:<6}  {specs}")
        lines.append("counts: " + " ".join(f"{c}={n}" for c, n in self.counts().items()))
        return "\n".join(lines) + "\n"


def verify(requirements: Sequence[OutcomeRequirement], records: Iterable[VerificationRecord],
           specs: Optional[Iterable[ServiceSpec]] = None) -> VerificationReport:
    """Pair each requirement with its record; unrecorded requirements stay white.

    Raises :class:`VerificationError` for records naming unknown requirements,
    duplicate records, or (when ``specs`` is given) unknown specification ids.
    """
    known = {r.id for r in requirements}
    spec_ids = None if specs is None else {s.id for s in specs}
    by_id: dict[str, VerificationRecord] = {}
    diags = []
    for rec in records:
        where = f" (line {rec.line})" if rec.line else ""
        if rec.requirement not in known:
            raise VerificationError(f"record for unknown requirement {rec.requirement!r}{where}")
        if rec.requirement in by_id:
            raise VerificationError(f"second record for requirement {rec.requirement!r}{where}")
        if rec.status not in RECORD_STATUSES:
            raise VerificationError(f"record for {rec.requirement} has status {rec.status.colour}")
        if spec_ids is not None:
            missing = [s for s in rec.specs if s not in spec_ids]
            if missing:
                raise VerificationError(f"record for {rec.requirement} cites unknown {', '.join(missing)}{where}")
        if rec.status is Status.SATISFIED and not rec.specs:
            diags.append(Diagnostic(Severity.WARNING, "unsupported-satisfaction",
                                    f"{rec.requirement} is green but cites no service specification",
                                    node=rec.requirement, line=rec.line))
        by_id[rec.requirement] = rec
    rows = tuple(VerificationRow(r, by_id.get(r.id)) for r in requirements)
    return VerificationReport(rows, tuple(sorted(diags, key=lambda d: (d.node or "", d.rule))))
