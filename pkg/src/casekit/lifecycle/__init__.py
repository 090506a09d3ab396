"""Dependent-Petri-Net workflow engine for lifecycle models.

Places carry conditions over token payloads, tokens are artefacts together
with their assurance fields, and transitions are lifecycle stages that check
and transform them.
"""

from .engine import (
    AssuranceCheckFailed,
    Fire,
    FireError,
    FiringRecord,
    Inject,
    NotEnabled,
    Reachability,
    ReplayError,
    TraceEntry,
    enabled,
    fire,
    inject,
    reachable,
    replay,
    successors,
)
from .formats import format_marking, marking_dict, parse_events, parse_net
from .model import (
    AssurancePayload,
    Atom,
    CopyEdit,
    DropEdit,
    Guard,
    Marking,
    Net,
    NetError,
    Place,
    ProcessView,
    SetEdit,
    Token,
    Transform,
    Transition,
)
