"""Resilience analysis loop: FRAM checks, outcome-derived requirements,
verification against service specifications and case emission."""

from .casegen import PLACEMENT, emit_case
from .fram import Aspect, FramCoupling, FramFunction, parse_fram, validate_fram
from .requirements import (
    CatalogueEntry,
    OutcomeRequirement,
    ServiceSpec,
    VerificationError,
    VerificationRecord,
    VerificationReport,
    VerificationRow,
    derive_requirements,
    parse_catalogue,
    parse_records,
    parse_specs,
    verify,
)
from .workflow import EDGES, WorkflowError, WorkflowState, advance, settled
