"""Structural rules for the five CAE argument blocks.

Each block gets arity and support-kind rules that make its intent checkable.
A missing side claim is only ever a warning: outline cases routinely leave
side claims out.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import ArgumentNode, BlockType, CaseGraph, Severity

# closed rule catalogue: rule id -> (severity, description)
RULES = {
    "DEC-ARITY": (Severity.ERROR, "decomposition requires ≥2 children"),
    "DEC-KIND": (Severity.ERROR, "decomposition children must be claims"),
    "DEC-SIDE": (Severity.WARNING, "decomposition should state a completeness side claim"),
    "SUB-ARITY": (Severity.ERROR, "substitution requires exactly one child"),
    "SUB-KIND": (Severity.ERROR, "substitution child must be a claim about an equivalent object"),
    "SUB-SIDE": (Severity.WARNING, "substitution should state an equivalence side claim"),
    "EVI-ARITY": (Severity.ERROR, "evidence incorporation requires ≥1 child"),
    "EVI-KIND": (Severity.ERROR, "evidence incorporation children must be evidence"),
    "EVI-SIDE": (Severity.WARNING, "evidence incorporation should state a side claim"),
    "CON-ARITY": (Severity.ERROR, "concretion requires exactly one child"),
    "CON-KIND": (Severity.ERROR, "concretion child must be a claim"),
    "CON-SIDE": (Severity.WARNING, "concretion should state a side claim"),
    "CAL-ARITY": (Severity.ERROR, "calculation requires ≥1 claim or evidence child"),
    "CAL-SIDE": (Severity.WARNING, "calculation should state a side claim"),
    "DUP-SUPPORT": (Severity.ERROR, "the same node is listed twice as a child"),
    "SIDE-IN-SUPPORTS": (Severity.ERROR, "side claim is also listed as a child"),
}

_PREFIX = {
    BlockType.DECOMPOSITION: "DEC",
    BlockType.SUBSTITUTION: "SUB",
    BlockType.EVIDENCE_INCORPORATION: "EVI",
    BlockType.CONCRETION: "CON",
    BlockType.CALCULATION: "CAL",
}


@dataclass(frozen=True)
class BlockRuleDiagnostic:
    argument: str
    rule: str
    severity: Severity
    message: str

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def to_dict(self) -> dict:
        return {"severity": self.severity.value, "rule": self.rule,
                "node": self.argument, "message": self.message}

    def __str__(self) -> str:
        return f"{self.argument}: {self.severity.value}: {self.message} [{self.rule}]"


def _mk(arg: ArgumentNode, rule: str, detail: str = "") -> BlockRuleDiagnostic:
    severity, text = RULES[rule]
    message = f"argument {arg.id}: {text}" + (f" ({detail})" if detail else "")
    return BlockRuleDiagnostic(arg.id, rule, severity, message)


def _check(graph: CaseGraph, arg: ArgumentNode) -> list[BlockRuleDiagnostic]:
    out = []
    prefix = _PREFIX[arg.block]
    n = len(arg.supports)
    claims = [s for s in arg.supports if s in graph.claims]
    evidence = [s for s in arg.supports if s in graph.evidence]
    non_claims = [s for s in arg.supports if s not in graph.claims]
    non_evidence = [s for s in arg.supports if s not in graph.evidence]

    if arg.block is BlockType.DECOMPOSITION:
        if n < 2:
            out.append(_mk(arg, "DEC-ARITY", f"has {n}"))
        if non_claims:
            out.append(_mk(arg, "DEC-KIND", ", ".join(non_claims)))
    elif arg.block in (BlockType.SUBSTITUTION, BlockType.CONCRETION):
        if n != 1:
            out.append(_mk(arg, f"{prefix}-ARITY", f"has {n}"))
        if non_claims:
            out.append(_mk(arg, f"{prefix}-KIND", ", ".join(non_claims)))
    elif arg.block is BlockType.EVIDENCE_INCORPORATION:
        if n < 1:
            out.append(_mk(arg, "EVI-ARITY"))
        if non_evidence:
            out.append(_mk(arg, "EVI-KIND", ", ".join(non_evidence)))
    elif arg.block is BlockType.CALCULATION:
        if not claims and not evidence:
            out.append(_mk(arg, "CAL-ARITY"))

    if len(set(arg.supports)) != n:
        dups = sorted({s for s in arg.supports if arg.supports.count(s) > 1})
        out.append(_mk(arg, "DUP-SUPPORT", ", ".join(dups)))
    if arg.side is None:
        out.append(_mk(arg, f"{prefix}-SIDE"))
    elif arg.side in arg.supports:
        out.append(_mk(arg, "SIDE-IN-SUPPORTS", arg.side))
    return out


def validate_blocks(graph: CaseGraph) -> list[BlockRuleDiagnostic]:
    """Apply the block rules to every argument, ordered by argument then rule id."""
    out = []
    for arg_id in sorted(graph.arguments):
        out.extend(sorted(_check(graph, graph.arguments[arg_id]), key=lambda d: d.rule))
    return out
