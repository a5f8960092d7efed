"""Domain types for classroom discussions and the three-dimension coding scheme.

A discussion is an ordered list of turns; student turns are split into
argumentative discourse units (ADUs).  ADUs carry argument-move and
specificity labels, whole student turns carry collaboration labels that
relate them to an earlier reference turn.  Teacher turns are kept for
transcript display and numbering only and are never coded.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import date
from enum import Enum
from typing import Optional

PROB_SUM_TOL = 1e-6


class SpeakerRole(Enum):
    TEACHER = "teacher"
    STUDENT = "student"


class ArgumentMove(Enum):
    CLAIM = "claim"
    EVIDENCE = "evidence"
    EXPLANATION = "explanation"


class SpecificityLevel(Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"

    @property
    def rank(self) -> int:
        return ("low", "medium", "high").index(self.value)


class CollaborationType(Enum):
    NEW = "new"
    AGREE = "agree"
    EXTENSION = "extension"
    CHALLENGE_PROBE = "challenge_probe"


class Provenance(Enum):
    GOLD_CODED = "gold_coded"
    AUTO_CODED = "auto_coded"
    UNCODED = "uncoded"
    MIXED = "mixed"


ARGUMENT_CLASSES = tuple(m.value for m in ArgumentMove)
SPECIFICITY_CLASSES = tuple(s.value for s in SpecificityLevel)
COLLABORATION_CLASSES = tuple(c.value for c in CollaborationType)

#: Canonical dimension names used in wire formats and reports.
DIMENSIONS = ("argument", "specificity", "collaboration")

CLASSES_BY_DIMENSION = {
    "argument": ARGUMENT_CLASSES,
    "specificity": SPECIFICITY_CLASSES,
    "collaboration": COLLABORATION_CLASSES,
}

# Label distributions are plain dicts keyed by the canonical label strings.
LabelDistribution = dict


def argmax_label(dist: LabelDistribution, classes: tuple[str, ...]) -> str:
    """Most probable label; ties broken by canonical class order."""
    best = classes[0]
    for label in classes[1:]:
        if dist[label] > dist[best]:
            best = label
    return best


@dataclass(frozen=True)
class Adu:
    adu_id: str
    text: str
    gold_argument: Optional[ArgumentMove] = None
    gold_specificity: Optional[SpecificityLevel] = None
    predicted_argument: Optional[LabelDistribution] = None
    predicted_specificity: Optional[LabelDistribution] = None


@dataclass(frozen=True)
class Turn:
    turn_index: int
    speaker_id: str
    role: SpeakerRole
    adus: tuple[Adu, ...]
    reference_turn_index: Optional[int] = None
    gold_collaboration: Optional[CollaborationType] = None
    predicted_collaboration: Optional[LabelDistribution] = None

    @property
    def text(self) -> str:
        """Full turn text: ADU texts joined by a single space, in order."""
        return " ".join(a.text for a in self.adus)


@dataclass(frozen=True)
class Discussion:
    discussion_id: str
    title: str
    turns: tuple[Turn, ...]
    provenance: Provenance
    recorded_at: Optional[date] = None


@dataclass(frozen=True)
class ValidationIssue:
    rule: str
    message: str
    turn_index: Optional[int] = None
    adu_id: Optional[str] = None

    def __str__(self) -> str:
        where = ""
        if self.turn_index is not None:
            where = f" (turn {self.turn_index}"
            where += f", adu {self.adu_id})" if self.adu_id else ")"
        return f"{self.rule}: {self.message}{where}"


def _check_distribution(
    issues: list[ValidationIssue],
    dist: Optional[LabelDistribution],
    classes: tuple[str, ...],
    rule: str,
    turn_index: int,
    adu_id: Optional[str] = None,
) -> None:
    if dist is None:
        return
    if set(dist.keys()) != set(classes):
        issues.append(ValidationIssue(
            rule, f"distribution must have one probability per class {classes}",
            turn_index, adu_id))
        return
    for label, p in dist.items():
        if not (0.0 <= p <= 1.0 + PROB_SUM_TOL):
            issues.append(ValidationIssue(
                rule, f"probability for '{label}' outside [0, 1]", turn_index, adu_id))
            return
    total = sum(dist.values())
    if abs(total - 1.0) > PROB_SUM_TOL:
        issues.append(ValidationIssue(
            rule, f"probabilities sum to {total!r}, expected 1", turn_index, adu_id))


def validate_discussion(d: Discussion) -> list[ValidationIssue]:
    """Check every structural invariant; an empty list means the discussion is valid.

    Issues are returned, never raised, and the input is not mutated.
    """
    issues: list[ValidationIssue] = []

    for position, turn in enumerate(d.turns):
        if turn.turn_index != position:
            issues.append(ValidationIssue(
                "turn indices contiguous",
                f"expected turn_index {position}, found {turn.turn_index}",
                turn.turn_index))

    seen_adu_ids: set[str] = set()
    student_indices = {t.turn_index for t in d.turns if t.role is SpeakerRole.STUDENT}

    for turn in d.turns:
        for adu in turn.adus:
            if adu.adu_id in seen_adu_ids:
                issues.append(ValidationIssue(
                    "adu ids unique", f"duplicate adu_id '{adu.adu_id}'",
                    turn.turn_index, adu.adu_id))
            seen_adu_ids.add(adu.adu_id)
            if not adu.text.strip():
                issues.append(ValidationIssue(
                    "adu text non-empty", "text is empty after trimming",
                    turn.turn_index, adu.adu_id))

        if turn.role is SpeakerRole.TEACHER:
            if len(turn.adus) != 1:
                issues.append(ValidationIssue(
                    "teacher turn has one adu",
                    f"teacher turn has {len(turn.adus)} ADUs", turn.turn_index))
            for adu in turn.adus:
                if (adu.gold_argument is not None or adu.gold_specificity is not None
                        or adu.predicted_argument is not None
                        or adu.predicted_specificity is not None):
                    issues.append(ValidationIssue(
                        "teacher turns are never coded",
                        "argument/specificity labels on a teacher ADU",
                        turn.turn_index, adu.adu_id))
            if turn.gold_collaboration is not None or turn.predicted_collaboration is not None:
                issues.append(ValidationIssue(
                    "collaboration on non-student turn",
                    "collaboration label/prediction on a teacher turn", turn.turn_index))
            if turn.reference_turn_index is not None:
                issues.append(ValidationIssue(
                    "reference on non-student turn",
                    "reference_turn_index on a teacher turn", turn.turn_index))
        else:
            if len(turn.adus) < 1:
                issues.append(ValidationIssue(
                    "student turn has adus", "student turn with no ADUs",
                    turn.turn_index))

        ref = turn.reference_turn_index
        if ref is not None:
            if ref >= turn.turn_index:
                issues.append(ValidationIssue(
                    "reference must precede target",
                    f"reference_turn_index {ref} >= turn_index {turn.turn_index}",
                    turn.turn_index))
            elif not (0 <= ref < len(d.turns)):
                issues.append(ValidationIssue(
                    "reference must exist",
                    f"reference_turn_index {ref} is not a turn", turn.turn_index))
            elif ref not in student_indices:
                # Collaboration relates student contributions; edges in the
                # collaboration map can only point at student-turn nodes.
                issues.append(ValidationIssue(
                    "reference must be a student turn",
                    f"reference_turn_index {ref} points at a teacher turn",
                    turn.turn_index))

        if turn.gold_collaboration is not None and turn.gold_collaboration is not CollaborationType.NEW:
            if ref is None:
                issues.append(ValidationIssue(
                    "non-new collaboration needs a reference",
                    f"'{turn.gold_collaboration.value}' label without reference_turn_index",
                    turn.turn_index))

        for adu in turn.adus:
            _check_distribution(issues, adu.predicted_argument, ARGUMENT_CLASSES,
                                "argument distribution well-formed", turn.turn_index, adu.adu_id)
            _check_distribution(issues, adu.predicted_specificity, SPECIFICITY_CLASSES,
                                "specificity distribution well-formed", turn.turn_index, adu.adu_id)
        _check_distribution(issues, turn.predicted_collaboration, COLLABORATION_CLASSES,
                            "collaboration distribution well-formed", turn.turn_index)

    return issues


def student_adu_sequence(d: Discussion) -> list[tuple[int, Adu]]:
    """All student ADUs in discussion order, flattened across turns.

    This is the sequence that argument-move context windows slide over;
    teacher turns contribute nothing.
    """
    out: list[tuple[int, Adu]] = []
    for turn in d.turns:
        if turn.role is SpeakerRole.STUDENT:
            out.extend((turn.turn_index, adu) for adu in turn.adus)
    return out


def derive_provenance(turns: tuple[Turn, ...]) -> Provenance:
    """Classify labelling state from the labels actually present.

    GoldCoded: every student unit gold-labelled, no predictions.
    AutoCoded: every student unit predicted, no gold labels.
    Uncoded: no labels of either kind.  Anything else is Mixed.
    """
    gold_flags: list[bool] = []
    pred_flags: list[bool] = []
    for turn in turns:
        if turn.role is not SpeakerRole.STUDENT:
            continue
        for adu in turn.adus:
            gold_flags.append(adu.gold_argument is not None)
            gold_flags.append(adu.gold_specificity is not None)
            pred_flags.append(adu.predicted_argument is not None)
            pred_flags.append(adu.predicted_specificity is not None)
        gold_flags.append(turn.gold_collaboration is not None)
        pred_flags.append(turn.predicted_collaboration is not None)

    if not gold_flags:
        return Provenance.UNCODED
    all_gold, any_gold = all(gold_flags), any(gold_flags)
    all_pred, any_pred = all(pred_flags), any(pred_flags)
    if all_gold and not any_pred:
        return Provenance.GOLD_CODED
    if all_pred and not any_gold:
        return Provenance.AUTO_CODED
    if not any_gold and not any_pred:
        return Provenance.UNCODED
    return Provenance.MIXED


# --- JSON codecs (used by the file store and the API) ---------------------

def adu_to_dict(adu: Adu) -> dict:
    return {
        "adu_id": adu.adu_id,
        "text": adu.text,
        "gold_argument": adu.gold_argument.value if adu.gold_argument else None,
        "gold_specificity": adu.gold_specificity.value if adu.gold_specificity else None,
        "predicted_argument": dict(adu.predicted_argument) if adu.predicted_argument else None,
        "predicted_specificity": dict(adu.predicted_specificity) if adu.predicted_specificity else None,
    }


def turn_to_dict(turn: Turn) -> dict:
    return {
        "turn_index": turn.turn_index,
        "speaker_id": turn.speaker_id,
        "role": turn.role.value,
        "adus": [adu_to_dict(a) for a in turn.adus],
        "reference_turn_index": turn.reference_turn_index,
        "gold_collaboration": turn.gold_collaboration.value if turn.gold_collaboration else None,
        "predicted_collaboration": dict(turn.predicted_collaboration) if turn.predicted_collaboration else None,
    }


def discussion_to_dict(d: Discussion) -> dict:
    return {
        "discussion_id": d.discussion_id,
        "title": d.title,
        "recorded_at": d.recorded_at.isoformat() if d.recorded_at else None,
        "provenance": d.provenance.value,
        "turns": [turn_to_dict(t) for t in d.turns],
    }


def adu_from_dict(data: dict) -> Adu:
    return Adu(
        adu_id=data["adu_id"],
        text=data["text"],
        gold_argument=ArgumentMove(data["gold_argument"]) if data.get("gold_argument") else None,
        gold_specificity=SpecificityLevel(data["gold_specificity"]) if data.get("gold_specificity") else None,
        predicted_argument=data.get("predicted_argument"),
        predicted_specificity=data.get("predicted_specificity"),
    )


def turn_from_dict(data: dict) -> Turn:
    return Turn(
        turn_index=data["turn_index"],
        speaker_id=data["speaker_id"],
        role=SpeakerRole(data["role"]),
        adus=tuple(adu_from_dict(a) for a in data["adus"]),
        reference_turn_index=data.get("reference_turn_index"),
        gold_collaboration=CollaborationType(data["gold_collaboration"]) if data.get("gold_collaboration") else None,
        predicted_collaboration=data.get("predicted_collaboration"),
    )


def discussion_from_dict(data: dict) -> Discussion:
    return Discussion(
        discussion_id=data["discussion_id"],
        title=data["title"],
        recorded_at=date.fromisoformat(data["recorded_at"]) if data.get("recorded_at") else None,
        provenance=Provenance(data["provenance"]),
        turns=tuple(turn_from_dict(t) for t in data["turns"]),
    )
