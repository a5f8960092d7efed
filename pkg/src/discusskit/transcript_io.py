"""Transcript parsing and serialization.

The interchange format is RFC-4180 CSV (UTF-8, CRLF rows) with the header

    turn_index,speaker_id,role,adu_index,text,reference_turn_index,
    gold_argument,gold_specificity,gold_collaboration

one row per ADU.  Collaboration fields (reference_turn_index,
gold_collaboration) live on the adu_index-0 row of a student turn and must
be empty everywhere else.  ``serialize_transcript(include_predictions=True)``
appends predicted-label columns plus per-class probability columns rounded
to 6 decimal places; the parser accepts either header.

Discussion metadata (id, title, recording date) is not part of the row
format; it travels as parameters / API fields.  Serialization is
deterministic: identical discussions yield byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import io
from datetime import date
from typing import Optional

from .model import (
    ARGUMENT_CLASSES,
    COLLABORATION_CLASSES,
    SPECIFICITY_CLASSES,
    Adu,
    ArgumentMove,
    CollaborationType,
    Discussion,
    SpeakerRole,
    SpecificityLevel,
    Turn,
    argmax_label,
    derive_provenance,
    validate_discussion,
)

BASE_HEADER = (
    "turn_index", "speaker_id", "role", "adu_index", "text",
    "reference_turn_index", "gold_argument", "gold_specificity", "gold_collaboration",
)

PREDICTION_HEADER = (
    "predicted_argument", "predicted_specificity", "predicted_collaboration",
    *(f"p_argument_{c}" for c in ARGUMENT_CLASSES),
    *(f"p_specificity_{c}" for c in SPECIFICITY_CLASSES),
    *(f"p_collaboration_{c}" for c in COLLABORATION_CLASSES),
)

EXTENDED_HEADER = BASE_HEADER + PREDICTION_HEADER

_ROLES = ("teacher", "student")

# Parsed probability columns are rounded to 6 decimals, so a K-class
# distribution can be off by a few 1e-6; reject anything worse than this
# and renormalize the rest so downstream validation (1e-6) always holds.
_PARSE_PROB_TOL = 1e-4


class ParseError(Exception):
    """Malformed transcript; carries the offending line number."""

    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


def _parse_int(value: str, line: int, column: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ParseError(line, f"column '{column}' must be an integer, got {value!r}") from None


def _parse_label(value: str, vocab: tuple[str, ...], line: int, column: str):
    if value not in vocab:
        raise ParseError(
            line, f"column '{column}' has unknown label {value!r}; legal values: {', '.join(vocab)}")
    return value


def _parse_distribution(row: dict, prefix: str, classes: tuple[str, ...], line: int) -> Optional[dict]:
    cells = {c: row.get(f"p_{prefix}_{c}", "") for c in classes}
    filled = [c for c, v in cells.items() if v != ""]
    if not filled:
        return None
    if len(filled) != len(classes):
        raise ParseError(line, f"partial {prefix} probability columns; fill all or none")
    dist = {}
    for c in classes:
        try:
            dist[c] = float(cells[c])
        except ValueError:
            raise ParseError(line, f"column 'p_{prefix}_{c}' must be a number, got {cells[c]!r}") from None
        if not (-_PARSE_PROB_TOL <= dist[c] <= 1.0 + _PARSE_PROB_TOL):
            raise ParseError(line, f"column 'p_{prefix}_{c}' outside [0, 1]")
    total = sum(dist.values())
    if abs(total - 1.0) > _PARSE_PROB_TOL:
        raise ParseError(line, f"{prefix} probabilities sum to {total:.6f}, expected 1")
    return {c: p / total for c, p in dist.items()}


def default_discussion_id(content: str) -> str:
    return hashlib.sha256(content.encode("utf-8")).hexdigest()[:12]


def parse_transcript(
    content: str,
    *,
    discussion_id: Optional[str] = None,
    title: Optional[str] = None,
    recorded_at: Optional[date] = None,
) -> Discussion:
    """Parse canonical CSV into a validated Discussion.

    Raises ParseError (with a line number) for malformed CSV, unknown labels,
    non-contiguous indices, duplicate (turn_index, adu_index), empty text, or
    references that do not strictly precede their turn.
    """
    content = content.lstrip("﻿")
    reader = csv.reader(io.StringIO(content, newline=""))
    try:
        rows = list(reader)
    except csv.Error as exc:
        raise ParseError(reader.line_num, f"malformed CSV: {exc}") from None

    rows = [r for r in rows if r]  # tolerate trailing blank lines
    if len(rows) < 2:
        raise ParseError(1, "expected a header row plus at least one data row")

    header = tuple(rows[0])
    if header == BASE_HEADER:
        columns = BASE_HEADER
    elif header == EXTENDED_HEADER:
        columns = EXTENDED_HEADER
    else:
        raise ParseError(1, f"unexpected header; expected {','.join(BASE_HEADER)}")

    # line = 1-based row position in the file (header is line 1)
    records = []
    for ordinal, raw in enumerate(rows[1:], start=2):
        if len(raw) != len(columns):
            raise ParseError(ordinal, f"expected {len(columns)} fields, found {len(raw)}")
        records.append((ordinal, dict(zip(columns, raw))))

    seen: set[tuple[int, int]] = set()
    turns_acc: dict[int, dict] = {}
    for line, row in records:
        t_idx = _parse_int(row["turn_index"], line, "turn_index")
        a_idx = _parse_int(row["adu_index"], line, "adu_index")
        if (t_idx, a_idx) in seen:
            raise ParseError(line, f"duplicate (turn_index, adu_index) = ({t_idx}, {a_idx})")
        seen.add((t_idx, a_idx))

        role = row["role"]
        if role not in _ROLES:
            raise ParseError(line, f"column 'role' must be one of {', '.join(_ROLES)}, got {role!r}")

        text = row["text"]
        if not text.strip():
            raise ParseError(line, "empty text")

        acc = turns_acc.setdefault(t_idx, {
            "speaker_id": row["speaker_id"], "role": role, "adus": {},
            "reference": None, "gold_collab": None, "pred_collab": None,
            "first_line": line,
        })
        if acc["role"] != role:
            raise ParseError(line, f"conflicting role for turn {t_idx}")
        if acc["speaker_id"] != row["speaker_id"]:
            raise ParseError(line, f"conflicting speaker_id for turn {t_idx}")

        ref_raw = row["reference_turn_index"]
        collab_raw = row["gold_collaboration"]
        pred_collab_label = row.get("predicted_collaboration", "")
        pred_collab = _parse_distribution(row, "collaboration", COLLABORATION_CLASSES, line)
        if a_idx != 0 or role != "student":
            if ref_raw or collab_raw or pred_collab_label or pred_collab is not None:
                raise ParseError(
                    line, "collaboration fields allowed only on adu_index 0 of a student turn")
        else:
            if ref_raw:
                ref = _parse_int(ref_raw, line, "reference_turn_index")
                if ref >= t_idx:
                    raise ParseError(
                        line, f"reference_turn_index {ref} must be less than turn_index {t_idx}")
                acc["reference"] = ref
            if collab_raw:
                acc["gold_collab"] = CollaborationType(
                    _parse_label(collab_raw, COLLABORATION_CLASSES, line, "gold_collaboration"))
            if pred_collab_label:
                _parse_label(pred_collab_label, COLLABORATION_CLASSES, line, "predicted_collaboration")
            acc["pred_collab"] = pred_collab

        gold_arg = row["gold_argument"]
        gold_spec = row["gold_specificity"]
        pred_arg_label = row.get("predicted_argument", "")
        pred_spec_label = row.get("predicted_specificity", "")
        pred_arg = _parse_distribution(row, "argument", ARGUMENT_CLASSES, line)
        pred_spec = _parse_distribution(row, "specificity", SPECIFICITY_CLASSES, line)
        if role == "teacher":
            if gold_arg or gold_spec or pred_arg_label or pred_spec_label \
                    or pred_arg is not None or pred_spec is not None:
                raise ParseError(line, "teacher rows must not carry labels or predictions")
            adu = Adu(adu_id=f"t{t_idx}a{a_idx}", text=text)
        else:
            if pred_arg_label:
                _parse_label(pred_arg_label, ARGUMENT_CLASSES, line, "predicted_argument")
            if pred_spec_label:
                _parse_label(pred_spec_label, SPECIFICITY_CLASSES, line, "predicted_specificity")
            adu = Adu(
                adu_id=f"t{t_idx}a{a_idx}",
                text=text,
                gold_argument=ArgumentMove(_parse_label(gold_arg, ARGUMENT_CLASSES, line, "gold_argument"))
                if gold_arg else None,
                gold_specificity=SpecificityLevel(
                    _parse_label(gold_spec, SPECIFICITY_CLASSES, line, "gold_specificity"))
                if gold_spec else None,
                predicted_argument=pred_arg,
                predicted_specificity=pred_spec,
            )
        acc["adus"][a_idx] = (line, adu)

    turn_indices = sorted(turns_acc)
    if turn_indices != list(range(len(turn_indices))):
        raise ParseError(
            turns_acc[turn_indices[-1]]["first_line"],
            f"turn_index values must be contiguous from 0; found {turn_indices}")

    turns: list[Turn] = []
    for t_idx in turn_indices:
        acc = turns_acc[t_idx]
        adu_indices = sorted(acc["adus"])
        if adu_indices != list(range(len(adu_indices))):
            raise ParseError(
                acc["first_line"],
                f"adu_index values in turn {t_idx} must be contiguous from 0; found {adu_indices}")
        if acc["role"] == "teacher" and len(adu_indices) != 1:
            raise ParseError(acc["first_line"], f"teacher turn {t_idx} must have exactly one ADU")
        turns.append(Turn(
            turn_index=t_idx,
            speaker_id=acc["speaker_id"],
            role=SpeakerRole(acc["role"]),
            adus=tuple(acc["adus"][i][1] for i in adu_indices),
            reference_turn_index=acc["reference"],
            gold_collaboration=acc["gold_collab"],
            predicted_collaboration=acc["pred_collab"],
        ))

    discussion = Discussion(
        discussion_id=discussion_id or default_discussion_id(content),
        title=title or "Untitled discussion",
        recorded_at=recorded_at,
        provenance=derive_provenance(tuple(turns)),
        turns=tuple(turns),
    )
    issues = validate_discussion(discussion)
    if issues:
        first = issues[0]
        line = turns_acc[first.turn_index]["first_line"] if first.turn_index in turns_acc else 1
        raise ParseError(line, str(first))
    return discussion


def _fmt_dist(dist: Optional[dict], classes: tuple[str, ...]) -> list[str]:
    if dist is None:
        return [""] * len(classes)
    return [f"{dist[c]:.6f}" for c in classes]


def serialize_transcript(d: Discussion, include_predictions: bool = False) -> str:
    """Emit the canonical CSV; byte-identical output for identical inputs."""
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(EXTENDED_HEADER if include_predictions else BASE_HEADER)

    for turn in d.turns:
        for a_idx, adu in enumerate(turn.adus):
            first = a_idx == 0
            student = turn.role is SpeakerRole.STUDENT
            row = [
                str(turn.turn_index),
                turn.speaker_id,
                turn.role.value,
                str(a_idx),
                adu.text,
                str(turn.reference_turn_index)
                if first and student and turn.reference_turn_index is not None else "",
                adu.gold_argument.value if adu.gold_argument else "",
                adu.gold_specificity.value if adu.gold_specificity else "",
                turn.gold_collaboration.value if first and student and turn.gold_collaboration else "",
            ]
            if include_predictions:
                pred_collab = turn.predicted_collaboration if first and student else None
                row += [
                    argmax_label(adu.predicted_argument, ARGUMENT_CLASSES)
                    if adu.predicted_argument else "",
                    argmax_label(adu.predicted_specificity, SPECIFICITY_CLASSES)
                    if adu.predicted_specificity else "",
                    argmax_label(pred_collab, COLLABORATION_CLASSES) if pred_collab else "",
                ]
                row += _fmt_dist(adu.predicted_argument, ARGUMENT_CLASSES)
                row += _fmt_dist(adu.predicted_specificity, SPECIFICITY_CLASSES)
                row += _fmt_dist(pred_collab, COLLABORATION_CLASSES)
            writer.writerow(row)
    return buf.getvalue()
