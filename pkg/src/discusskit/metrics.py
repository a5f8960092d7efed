"""Agreement and classification metrics over gold/predicted label pairs.

Cohen's kappa for argument moves and collaboration, quadratic weighted
kappa for the ordinal specificity scale, macro/micro F1 throughout.  The
macro average runs over the full class list, scoring absent classes 0, so
rare classes drag the mean the way they should.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .model import (
    ARGUMENT_CLASSES,
    COLLABORATION_CLASSES,
    SPECIFICITY_CLASSES,
    Discussion,
    SpeakerRole,
    argmax_label,
    student_adu_sequence,
)


class LengthMismatch(Exception):
    pass


class UnknownLabel(Exception):
    pass


class EmptyMatrix(Exception):
    pass


class NonOrdinalClasses(Exception):
    pass


class MissingLabels(Exception):
    def __init__(self, message: str, units: Optional[list[str]] = None):
        self.units = units or []
        super().__init__(message)


@dataclass(frozen=True)
class ConfusionMatrix:
    classes: tuple[str, ...]
    cells: np.ndarray  # rows = gold, columns = predicted

    @property
    def n(self) -> int:
        return int(self.cells.sum())

    def __eq__(self, other):
        if not isinstance(other, ConfusionMatrix):
            return NotImplemented
        return self.classes == other.classes and np.array_equal(self.cells, other.cells)


def confusion_matrix(gold: Sequence[str], pred: Sequence[str],
                     classes: tuple[str, ...]) -> ConfusionMatrix:
    if len(gold) != len(pred):
        raise LengthMismatch(f"{len(gold)} gold labels vs {len(pred)} predictions")
    if len(gold) == 0:
        raise LengthMismatch("need at least one unit")
    index = {c: i for i, c in enumerate(classes)}
    cells = np.zeros((len(classes), len(classes)), dtype=int)
    for g, p in zip(gold, pred):
        if g not in index:
            raise UnknownLabel(f"gold label {g!r} not in {classes}")
        if p not in index:
            raise UnknownLabel(f"predicted label {p!r} not in {classes}")
        cells[index[g], index[p]] += 1
    return ConfusionMatrix(tuple(classes), cells)


def cohen_kappa(m: ConfusionMatrix) -> float:
    """(p_o - p_e) / (1 - p_e); degenerate p_e = 1 maps to 1 or 0 (documented)."""
    n = m.n
    if n == 0:
        raise EmptyMatrix("empty confusion matrix")
    p_o = float(np.trace(m.cells)) / n
    rows = m.cells.sum(axis=1) / n
    cols = m.cells.sum(axis=0) / n
    p_e = float(np.dot(rows, cols))
    if p_e >= 1.0 - 1e-15:
        # Single-class marginals: perfect agreement scores 1, anything else 0.
        return 1.0 if p_o >= 1.0 - 1e-15 else 0.0
    return (p_o - p_e) / (1.0 - p_e)


def quadratic_weighted_kappa(m: ConfusionMatrix) -> float:
    """1 - sum(w * O) / sum(w * E) with w_ij = (i - j)^2 / (K - 1)^2.

    Classes must carry ordinal ranks 0..K-1 in their listed order (K >= 2).
    """
    k = len(m.classes)
    if k < 2:
        raise NonOrdinalClasses("need at least 2 ordinal classes")
    n = m.n
    if n == 0:
        raise EmptyMatrix("empty confusion matrix")
    idx = np.arange(k)
    weights = (idx[:, None] - idx[None, :]) ** 2 / (k - 1) ** 2
    observed = m.cells.astype(float)
    expected = np.outer(m.cells.sum(axis=1), m.cells.sum(axis=0)) / n
    numerator = float((weights * observed).sum())
    denominator = float((weights * expected).sum())
    if denominator == 0.0:
        # All expected mass on the diagonal (single shared class); mirror
        # the Cohen degenerate convention.
        return 1.0 if numerator == 0.0 else 0.0
    return 1.0 - numerator / denominator


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class F1Scores:
    macro_f1: float
    micro_f1: float
    per_class: dict[str, ClassScores]


def _safe_div(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def f1_scores(m: ConfusionMatrix) -> F1Scores:
    """Per-class P/R/F1 plus macro (over all classes, absent scored 0) and micro."""
    if m.n == 0:
        raise EmptyMatrix("empty confusion matrix")
    per_class: dict[str, ClassScores] = {}
    tp_total = fp_total = fn_total = 0
    for i, label in enumerate(m.classes):
        tp = int(m.cells[i, i])
        fp = int(m.cells[:, i].sum()) - tp
        fn = int(m.cells[i, :].sum()) - tp
        precision = _safe_div(tp, tp + fp)
        recall = _safe_div(tp, tp + fn)
        f1 = _safe_div(2 * precision * recall, precision + recall)
        per_class[label] = ClassScores(precision, recall, f1, tp + fn)
        tp_total += tp
        fp_total += fp
        fn_total += fn
    macro = sum(s.f1 for s in per_class.values()) / len(m.classes)
    micro_p = _safe_div(tp_total, tp_total + fp_total)
    micro_r = _safe_div(tp_total, tp_total + fn_total)
    micro = _safe_div(2 * micro_p * micro_r, micro_p + micro_r)
    return F1Scores(macro_f1=macro, micro_f1=micro, per_class=per_class)


@dataclass(frozen=True)
class DimensionEvaluation:
    dimension: str
    unit_kind: str  # "ADUs" or "Turns"
    n_units: int
    kappa: float
    qwk: Optional[float]
    macro_f1: float
    micro_f1: float
    per_class: dict[str, ClassScores]


@dataclass(frozen=True)
class EvaluationReport:
    dimensions: dict[str, DimensionEvaluation]

    def to_dict(self) -> dict:
        out = {}
        for name, ev in self.dimensions.items():
            out[name] = {
                "unit_kind": ev.unit_kind,
                "n_units": ev.n_units,
                "kappa": ev.kappa,
                "qwk": ev.qwk,
                "macro_f1": ev.macro_f1,
                "micro_f1": ev.micro_f1,
                "per_class": {
                    label: {"precision": s.precision, "recall": s.recall,
                            "f1": s.f1, "support": s.support}
                    for label, s in ev.per_class.items()
                },
            }
        return out


def _gather_labels(discussions: Sequence[Discussion], dimension: str,
                   exclude_fallback: bool) -> tuple[list[str], list[str]]:
    gold: list[str] = []
    pred: list[str] = []
    missing: list[str] = []
    for d in discussions:
        if dimension in ("argument", "specificity"):
            classes = ARGUMENT_CLASSES if dimension == "argument" else SPECIFICITY_CLASSES
            for _, adu in student_adu_sequence(d):
                g = adu.gold_argument if dimension == "argument" else adu.gold_specificity
                p = adu.predicted_argument if dimension == "argument" else adu.predicted_specificity
                if g is None or p is None:
                    missing.append(f"{d.discussion_id}/{adu.adu_id}")
                    continue
                gold.append(g.value)
                pred.append(argmax_label(p, classes))
        else:
            for turn in d.turns:
                if turn.role is not SpeakerRole.STUDENT:
                    continue
                if exclude_fallback and turn.reference_turn_index is None:
                    continue
                if turn.gold_collaboration is None or turn.predicted_collaboration is None:
                    missing.append(f"{d.discussion_id}/turn{turn.turn_index}")
                    continue
                gold.append(turn.gold_collaboration.value)
                pred.append(argmax_label(turn.predicted_collaboration, COLLABORATION_CLASSES))
    if missing:
        raise MissingLabels(
            f"{dimension}: {len(missing)} unit(s) lack gold or predicted labels "
            f"(first: {missing[0]})", missing)
    return gold, pred


def evaluate_discussions(discussions: Sequence[Discussion],
                         exclude_fallback: bool = False) -> EvaluationReport:
    """Pool units across discussions and score each dimension.

    Every student unit must carry both gold and predicted labels for the
    evaluated dimensions; `exclude_fallback` drops collaboration turns that
    had no reference turn (their prediction is the deterministic fallback,
    not trained-head output).
    """
    specs = [
        ("argument", ARGUMENT_CLASSES, "ADUs", False),
        ("specificity", SPECIFICITY_CLASSES, "ADUs", True),
        ("collaboration", COLLABORATION_CLASSES, "Turns", False),
    ]
    dims: dict[str, DimensionEvaluation] = {}
    for dimension, classes, unit_kind, ordinal in specs:
        gold, pred = _gather_labels(discussions, dimension, exclude_fallback)
        if not gold:
            raise MissingLabels(f"{dimension}: no units to evaluate")
        m = confusion_matrix(gold, pred, classes)
        scores = f1_scores(m)
        dims[dimension] = DimensionEvaluation(
            dimension=dimension,
            unit_kind=unit_kind,
            n_units=m.n,
            kappa=cohen_kappa(m),
            qwk=quadratic_weighted_kappa(m) if ordinal else None,
            macro_f1=scores.macro_f1,
            micro_f1=scores.micro_f1,
            per_class=scores.per_class,
        )
    return EvaluationReport(dims)


def format_report_table(report: EvaluationReport) -> str:
    """Aligned-column text table: Code, N, Kappa, Macro F, Micro F."""
    headers = ("Code", "N", "Kappa", "Macro F", "Micro F")
    rows = [headers]
    qwk_line = None
    for name, ev in report.dimensions.items():
        rows.append((
            name.capitalize(),
            f"{ev.n_units} {ev.unit_kind}",
            f"{ev.kappa:.3f}",
            f"{ev.macro_f1:.3f}",
            f"{ev.micro_f1:.3f}",
        ))
        if ev.qwk is not None:
            qwk_line = f"Quadratic weighted kappa ({name}): {ev.qwk:.3f}"
    widths = [max(len(r[i]) for r in rows) for i in range(len(headers))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
             for row in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    if qwk_line:
        lines.append(qwk_line)
    return "\n".join(lines)
