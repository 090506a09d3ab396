"""Kemeny-Oppenheim degree of factual support for evidence/claim pairs.

    F(h, e) = (P(e|h) - P(e|~h)) / (P(e|h) + P(e|~h))

F lies in [-1, 1], is 0 for irrelevant evidence, 1 when the evidence is
impossible under the negated claim, and swaps sign when the claim and its
negation are exchanged.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable

from .casl import ProbRecord
from .model import CaseGraph, Diagnostic, Severity

DEFAULT_THRESHOLD = 0.9
SUM_TOL = 1e-12


class ConfirmationError(ValueError):
    pass


class Grade(enum.Enum):
    DEDUCTIVE = "deductive"
    SUPPORTING = "supporting"
    NEUTRAL = "neutral"
    DISCONFIRMING = "disconfirming"


def _check_prob(name: str, value: float) -> None:
    if not (0.0 <= value <= 1.0):  # also rejects NaN
        raise ConfirmationError(f"{name}={value!r} is not a probability")


@dataclass(frozen=True)
class JointDistribution:
    """Probabilities of the four (claim, evidence) outcomes."""

    p_h_e: float
    p_h_ne: float
    p_nh_e: float
    p_nh_ne: float

    def __post_init__(self):
        for name in ("p_h_e", "p_h_ne", "p_nh_e", "p_nh_ne"):
            _check_prob(name, getattr(self, name))
        total = math.fsum((self.p_h_e, self.p_h_ne, self.p_nh_e, self.p_nh_ne))
        if abs(total - 1.0) > SUM_TOL:
            raise ConfirmationError(f"joint distribution sums to {total!r}, not 1")


@dataclass(frozen=True)
class Likelihoods:
    p_e_h: float
    p_e_nh: float

    def __post_init__(self):
        _check_prob("p_e_h", self.p_e_h)
        _check_prob("p_e_nh", self.p_e_nh)

    def negated(self) -> "Likelihoods":
        """Likelihoods with respect to the counter-claim."""
        return Likelihoods(self.p_e_nh, self.p_e_h)


@dataclass(frozen=True)
class ConfirmationResult:
    evidence: str
    claim: str
    value: float
    grade: Grade

    def to_dict(self) -> dict:
        return {"evidence": self.evidence, "claim": self.claim,
                "value": self.value, "grade": self.grade.value}


def likelihoods_from_joint(d: JointDistribution) -> Likelihoods:
    mass_h = d.p_h_e + d.p_h_ne
    mass_nh = d.p_nh_e + d.p_nh_ne
    if mass_h <= 0.0:
        raise ConfirmationError("cannot condition on a claim with zero probability")
    if mass_nh <= 0.0:
        raise ConfirmationError("cannot condition on a negated claim with zero probability")
    return Likelihoods(d.p_h_e / mass_h, d.p_nh_e / mass_nh)


def ko_measure(lk: Likelihoods) -> float:
    total = lk.p_e_h + lk.p_e_nh
    if total <= 0.0:
        raise ConfirmationError("measure undefined when both likelihoods are zero")
    return (lk.p_e_h - lk.p_e_nh) / total


def classify(value: float, threshold: float = DEFAULT_THRESHOLD) -> Grade:
    if not (0.0 < threshold <= 1.0):
        raise ConfirmationError(f"threshold {threshold!r} outside (0, 1]")
    if not (-1.0 <= value <= 1.0):
        raise ConfirmationError(f"value {value!r} outside [-1, 1]")
    if value >= threshold:
        return Grade.DEDUCTIVE
    if value > 0.0:
        return Grade.SUPPORTING
    if value == 0.0:
        return Grade.NEUTRAL
    return Grade.DISCONFIRMING


def case_confirmation(graph: CaseGraph, probs: Iterable[ProbRecord], claim: str,
                      threshold: float = DEFAULT_THRESHOLD
                      ) -> tuple[list[ConfirmationResult], list[Diagnostic]]:
    """Score every prob record naming ``claim``.

    Records whose evidence is not (transitively) under the claim are not
    scored; each yields a ``dangling-prob`` warning instead. Scores are per
    evidence item and are not aggregated.
    """
    if claim not in graph.claims:
        raise ConfirmationError(f"unknown claim {claim!r}")
    classify(0.0, threshold)  # validates threshold even with no records
    below = graph.descendants(claim)
    results, diags = [], []
    for p in sorted(probs, key=lambda p: (p.evidence, p.given)):
        if p.given != claim:
            continue
        if p.evidence not in graph.evidence or p.evidence not in below:
            diags.append(Diagnostic(Severity.WARNING, "dangling-prob",
                                    f"prob for {p.evidence} is not attached under claim {claim}",
                                    node=p.evidence, line=p.line, column=1 if p.line else None))
            continue
        value = ko_measure(Likelihoods(p.p_e_h, p.p_e_nh))
        results.append(ConfirmationResult(p.evidence, claim, value, classify(value, threshold)))
    return results, diags
