"""Build a failure-response assurance case from a verification report.

G0 is decomposed into G1-G3. Numbered outcomes (a1, b3, ...) hang under a
claim for their outcome group (a-d). Which of G1-G3 each group refines is not
known, so the groups join G0's decomposition directly and are marked
``unmapped`` in :data:`PLACEMENT`. Each verification record becomes an evidence node carrying
the record's colour.
"""

from __future__ import annotations

import re

from ..model import ArgumentNode, BlockType, CaseGraph, ClaimNode, EvidenceNode
from .requirements import VerificationReport

TOP = "G0"
TOP_TEXT = "The failure response process view of the target service is achieved."
TITLE = "Failure response process view"
SUBGOALS = ("G1", "G2", "G3")

GROUPS = {
    "a": "Outcome a: failure response is prepared.",
    "b": "Outcome b: failure response is performed when necessary.",
    "c": "Outcome c: failure response is accounted for through the accountability achievement view.",
    "d": "Outcome d: the system life cycle is improved through the change accommodation view.",
}
GROUP_RE = re.compile(r"([a-d])[0-9]+\Z")

# where each group or requirement sits: "placed" when its parent is known,
# "unmapped" when it is attached to G0 for lack of a known parent
PLACEMENT = {
    **{g: "placed" for g in SUBGOALS},
    **{f"outcome-{k}": "unmapped" for k in GROUPS},
}


def group_claim(key: str) -> str:
    return f"outcome-{key}"


def evidence_id(req_id: str) -> str:
    return f"Sn-{req_id}"


def _evidence_text(row) -> str:
    rec = row.record
    text = rec.justification.strip() or f"Verification record for {row.requirement.id}."
    if rec.specs:
        text += " [" + ", ".join(rec.specs) + "]"
    return text


def emit_case(report: VerificationReport, title: str = TITLE) -> CaseGraph:
    claims: dict[str, ClaimNode] = {}
    evidence: dict[str, EvidenceNode] = {}
    arguments: dict[str, ArgumentNode] = {}
    children: dict[str, list[str]] = {}
    records = {}

    for row in report.rows:
        req = row.requirement
        claims[req.id] = ClaimNode(req.id, req.derived_text or req.outcome_text)
        if row.record is not None:
            records[req.id] = row
    if TOP not in claims:
        claims[TOP] = ClaimNode(TOP, TOP_TEXT)

    def attach(parent, child):
        children.setdefault(parent, []).append(child)

    for row in report.rows:
        rid = row.requirement.id
        if rid == TOP:
            continue
        if rid in SUBGOALS:
            attach(TOP, rid)
            continue
        m = GROUP_RE.match(rid)
        if m is None:
            attach(TOP, rid)
            continue
        gid = group_claim(m.group(1))
        if gid not in claims:
            claims[gid] = ClaimNode(gid, GROUPS[m.group(1)])
            attach(TOP, gid)
        attach(gid, rid)

    for rid, row in records.items():
        eid = evidence_id(rid)
        evidence[eid] = EvidenceNode(eid, _evidence_text(row), row.record.status)
        if rid in children:
            # a supported claim's own record joins its decomposition through a sub-claim
            vid = f"{rid}-verified"
            claims[vid] = ClaimNode(vid, f"Verification of {rid} against the service specifications holds.")
            arguments[f"A-{vid}"] = ArgumentNode(f"A-{vid}", BlockType.EVIDENCE_INCORPORATION, vid, (eid,))
            attach(rid, vid)
        else:
            arguments[f"A-{rid}"] = ArgumentNode(f"A-{rid}", BlockType.EVIDENCE_INCORPORATION, rid, (eid,))

    for parent, kids in children.items():
        block = BlockType.DECOMPOSITION if len(kids) > 1 else BlockType.CONCRETION
        arguments[f"A-{parent}"] = ArgumentNode(f"A-{parent}", block, parent, tuple(kids))

    return CaseGraph(title, claims, evidence, arguments)
