"""Assurance case toolkit: a CAE/GSN case language with validation and
status roll-up, confirmation scoring, a lifecycle Petri net engine and the
resilience analysis loop."""

from .blocks import BlockRuleDiagnostic, validate_blocks
from .casl import ParseError, ProbRecord, SerializeError, parse, serialize
from .confirmation import (
    ConfirmationResult,
    Grade,
    JointDistribution,
    Likelihoods,
    case_confirmation,
    classify,
    ko_measure,
    likelihoods_from_joint,
)
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
)
from .status import FileLoader, StatusMap, emit_dot, propagate, report

__version__ = "0.1.0"
