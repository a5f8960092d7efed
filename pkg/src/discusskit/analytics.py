"""Teacher-facing analytics derived from coded discussions.

Everything here is a pure projection of labels that already exist on the
discussion: code distributions for the overview pies, the collaboration
map, threshold-based strengths/weaknesses, and the cross-discussion
history series.  Predicted-label analytics use the argmax of the stored
distributions, ties broken by canonical class order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from typing import Optional, Sequence

from .metrics import MissingLabels
from .model import (
    CLASSES_BY_DIMENSION,
    DIMENSIONS,
    Discussion,
    SpeakerRole,
    Turn,
    argmax_label,
    student_adu_sequence,
)

EXCERPT_CHARS = 80


class UnknownDimension(Exception):
    pass


class DanglingReference(Exception):
    pass


@dataclass(frozen=True)
class DistributionSummary:
    dimension: str
    counts: dict[str, int]
    total: int

    @property
    def percentages(self) -> dict[str, float]:
        if self.total == 0:
            return {label: 0.0 for label in self.counts}
        return {label: 100.0 * c / self.total for label, c in self.counts.items()}

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "total": self.total,
            "counts": dict(self.counts),
            "percentages": self.percentages,
        }


@dataclass(frozen=True)
class MapNode:
    turn_index: int
    speaker_id: str
    excerpt: str


@dataclass(frozen=True)
class MapEdge:
    target_turn_index: int
    reference_turn_index: int
    collaboration: str


@dataclass(frozen=True)
class CollaborationMap:
    nodes: tuple[MapNode, ...]
    edges: tuple[MapEdge, ...]

    def to_dict(self) -> dict:
        return {
            "nodes": [{"turn_index": n.turn_index, "speaker_id": n.speaker_id,
                       "excerpt": n.excerpt} for n in self.nodes],
            "edges": [{"target_turn_index": e.target_turn_index,
                       "reference_turn_index": e.reference_turn_index,
                       "collaboration": e.collaboration} for e in self.edges],
        }


@dataclass(frozen=True)
class AssessmentRule:
    dimension: str
    label: str
    weakness_below: float
    strength_at_or_above: float

    def __post_init__(self):
        if self.dimension not in DIMENSIONS:
            raise UnknownDimension(f"unknown dimension {self.dimension!r}")
        if self.label not in CLASSES_BY_DIMENSION[self.dimension]:
            raise ValueError(
                f"label {self.label!r} not valid for dimension {self.dimension!r}")
        if self.weakness_below > self.strength_at_or_above:
            raise ValueError("weakness_below must not exceed strength_at_or_above")

    def to_dict(self) -> dict:
        return {"dimension": self.dimension, "label": self.label,
                "weakness_below": self.weakness_below,
                "strength_at_or_above": self.strength_at_or_above}


#: Shipped defaults; pedagogy stays in configuration, not code.
DEFAULT_RULES = (
    AssessmentRule("collaboration", "challenge_probe", 10.0, 25.0),
    AssessmentRule("argument", "evidence", 15.0, 30.0),
    AssessmentRule("argument", "explanation", 10.0, 25.0),
    AssessmentRule("specificity", "high", 20.0, 40.0),
)


@dataclass(frozen=True)
class AssessmentItem:
    rule: AssessmentRule
    observed_percentage: float
    verdict: str  # "strength" | "weakness" | "neutral"

    def to_dict(self) -> dict:
        return {**self.rule.to_dict(),
                "observed_percentage": self.observed_percentage,
                "verdict": self.verdict}


@dataclass(frozen=True)
class GoalRecord:
    goal_id: str
    discussion_id: str
    dimension: str
    label: str
    target_percentage: float
    created_at: str
    note: str = ""

    def __post_init__(self):
        if self.dimension not in DIMENSIONS:
            raise UnknownDimension(f"unknown dimension {self.dimension!r}")
        if self.label not in CLASSES_BY_DIMENSION[self.dimension]:
            raise ValueError(f"label {self.label!r} not valid for {self.dimension!r}")
        if not (0.0 <= self.target_percentage <= 100.0):
            raise ValueError("target_percentage must be in [0, 100]")

    def to_dict(self) -> dict:
        return {"goal_id": self.goal_id, "discussion_id": self.discussion_id,
                "dimension": self.dimension, "label": self.label,
                "target_percentage": self.target_percentage,
                "created_at": self.created_at, "note": self.note}


@dataclass(frozen=True)
class HistoryEntry:
    discussion_id: str
    title: str
    recorded_at: Optional[date]
    distributions: dict[str, DistributionSummary]


@dataclass(frozen=True)
class HistorySeries:
    entries: tuple[HistoryEntry, ...]
    skipped: tuple[tuple[str, str], ...] = ()  # (discussion_id, reason)

    def to_dict(self) -> dict:
        return {
            "entries": [{
                "discussion_id": e.discussion_id,
                "title": e.title,
                "recorded_at": e.recorded_at.isoformat() if e.recorded_at else None,
                "distributions": {k: v.to_dict() for k, v in e.distributions.items()},
            } for e in self.entries],
            "skipped": [{"discussion_id": i, "reason": r} for i, r in self.skipped],
        }


def _unit_label(dimension: str, source: str, adu_or_turn) -> Optional[str]:
    classes = CLASSES_BY_DIMENSION[dimension]
    if dimension == "argument":
        gold, pred = adu_or_turn.gold_argument, adu_or_turn.predicted_argument
    elif dimension == "specificity":
        gold, pred = adu_or_turn.gold_specificity, adu_or_turn.predicted_specificity
    else:
        gold, pred = adu_or_turn.gold_collaboration, adu_or_turn.predicted_collaboration
    if source == "gold":
        return gold.value if gold is not None else None
    return argmax_label(pred, classes) if pred is not None else None


def compute_distribution(d: Discussion, dimension: str, source: str) -> DistributionSummary:
    """Label counts and percentages over student ADUs (argument/specificity)
    or student turns (collaboration); zero-count labels stay present."""
    if dimension not in DIMENSIONS:
        raise UnknownDimension(f"unknown dimension {dimension!r}")
    if source not in ("gold", "predicted"):
        raise ValueError(f"source must be 'gold' or 'predicted', got {source!r}")
    classes = CLASSES_BY_DIMENSION[dimension]

    if dimension in ("argument", "specificity"):
        units = [(f"adu {adu.adu_id}", adu) for _, adu in student_adu_sequence(d)]
    else:
        units = [(f"turn {t.turn_index}", t)
                 for t in d.turns if t.role is SpeakerRole.STUDENT]
    if not units:
        raise MissingLabels(f"{dimension}: no student units to summarize")

    counts = {label: 0 for label in classes}
    missing = []
    for name, unit in units:
        label = _unit_label(dimension, source, unit)
        if label is None:
            missing.append(name)
            continue
        counts[label] += 1
    if missing:
        raise MissingLabels(
            f"{dimension}: {len(missing)} unit(s) lack {source} labels "
            f"(first: {missing[0]})", missing)
    return DistributionSummary(dimension=dimension, counts=counts, total=len(units))


def build_collaboration_map(d: Discussion, source: str) -> CollaborationMap:
    """One node per student turn; one edge per non-new student turn with a
    reference, pointing back at the referenced turn."""
    nodes = []
    node_indices = set()
    for turn in d.turns:
        if turn.role is not SpeakerRole.STUDENT:
            continue
        nodes.append(MapNode(turn.turn_index, turn.speaker_id, turn.text[:EXCERPT_CHARS]))
        node_indices.add(turn.turn_index)

    edges = []
    missing = []
    for turn in d.turns:
        if turn.role is not SpeakerRole.STUDENT:
            continue
        label = _unit_label("collaboration", source, turn)
        if label is None:
            missing.append(f"turn {turn.turn_index}")
            continue
        if label == "new" or turn.reference_turn_index is None:
            continue
        if turn.reference_turn_index not in node_indices:
            raise DanglingReference(
                f"turn {turn.turn_index} references non-student turn "
                f"{turn.reference_turn_index}")
        edges.append(MapEdge(turn.turn_index, turn.reference_turn_index, label))
    if missing:
        raise MissingLabels(
            f"collaboration: {len(missing)} turn(s) lack {source} labels "
            f"(first: {missing[0]})", missing)
    return CollaborationMap(tuple(nodes), tuple(edges))


def assess_strengths_weaknesses(
    summaries: dict[str, DistributionSummary],
    rules: Sequence[AssessmentRule],
) -> list[AssessmentItem]:
    """Apply each threshold rule to the observed label percentage."""
    items = []
    for rule in rules:
        if rule.dimension not in summaries:
            raise UnknownDimension(
                f"no distribution supplied for dimension {rule.dimension!r}")
        observed = summaries[rule.dimension].percentages[rule.label]
        if observed >= rule.strength_at_or_above:
            verdict = "strength"
        elif observed < rule.weakness_below:
            verdict = "weakness"
        else:
            verdict = "neutral"
        items.append(AssessmentItem(rule, observed, verdict))
    return items


def compare_history(discussions: Sequence[Discussion], source: str) -> HistorySeries:
    """Per-discussion distributions ordered by recording date (undated first,
    ties by discussion id); discussions lacking the source labels are
    excluded and reported in `skipped`."""
    entries = []
    skipped = []
    for d in discussions:
        try:
            dists = {dim: compute_distribution(d, dim, source) for dim in DIMENSIONS}
        except MissingLabels as exc:
            skipped.append((d.discussion_id, str(exc)))
            continue
        entries.append(HistoryEntry(d.discussion_id, d.title, d.recorded_at, dists))
    entries.sort(key=lambda e: (e.recorded_at or date.min, e.discussion_id))
    return HistorySeries(tuple(entries), tuple(skipped))


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
