"""The seven-step resilience analysis loop as a state machine."""

from __future__ import annotations

import enum
from typing import Optional

from ..model import Status
from .requirements import VerificationReport, VerificationRow


class WorkflowError(Exception):
    pass


class WorkflowState(enum.Enum):
    S1_UNDERSTAND_OUTCOMES = 1
    S2_DERIVE_REQUIREMENTS = 2
    S3_VERIFY = 3
    S4_EVALUATE = 4
    S5_DEVELOP_AND_OPERATE = 5
    S6_REVISE_REQUIREMENTS = 6
    S7_REVISE_SPECS = 7

    @property
    def label(self) -> str:
        return f"S{self.value}"


S = WorkflowState

EDGES = frozenset({
    (S.S1_UNDERSTAND_OUTCOMES, S.S2_DERIVE_REQUIREMENTS),
    (S.S2_DERIVE_REQUIREMENTS, S.S3_VERIFY),
    (S.S3_VERIFY, S.S4_EVALUATE),
    (S.S4_EVALUATE, S.S5_DEVELOP_AND_OPERATE),
    (S.S4_EVALUATE, S.S6_REVISE_REQUIREMENTS),
    (S.S4_EVALUATE, S.S7_REVISE_SPECS),
    (S.S6_REVISE_REQUIREMENTS, S.S3_VERIFY),
    (S.S7_REVISE_SPECS, S.S3_VERIFY),
})

_LINEAR = {
    S.S1_UNDERSTAND_OUTCOMES: S.S2_DERIVE_REQUIREMENTS,
    S.S2_DERIVE_REQUIREMENTS: S.S3_VERIFY,
    S.S3_VERIFY: S.S4_EVALUATE,
    S.S6_REVISE_REQUIREMENTS: S.S3_VERIFY,
    S.S7_REVISE_SPECS: S.S3_VERIFY,
}


def settled(row: VerificationRow) -> bool:
    """Met, or unmet with a justification that nobody has asked to revise."""
    rec = row.record
    if rec is None or rec.revise is not None:
        return False
    return rec.status is Status.SATISFIED or bool(rec.justification.strip())


def advance(state: WorkflowState, report: Optional[VerificationReport] = None) -> WorkflowState:
    if state is S.S5_DEVELOP_AND_OPERATE:
        raise WorkflowError("S5 (development and operation) is terminal")
    if state is not S.S4_EVALUATE:
        return _LINEAR[state]
    if report is None:
        raise WorkflowError("evaluating (S4) needs a verification report")
    if all(settled(row) for row in report.rows):
        return S.S5_DEVELOP_AND_OPERATE
    if any(row.record is not None and row.record.revise == "requirements" for row in report.rows):
        return S.S6_REVISE_REQUIREMENTS
    return S.S7_REVISE_SPECS
