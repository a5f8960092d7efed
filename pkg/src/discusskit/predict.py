"""Run the three trained heads over an uncoded (or gold-coded) discussion."""

from __future__ import annotations

from dataclasses import replace

from .embedding import CachingBackend, DimensionMismatch, EmbeddingBackend, embed_tokens, pool_average
from .features import (
    WindowConfig,
    build_argument_features,
    build_collaboration_features,
    build_specificity_features,
)
from .head import SoftmaxHead, Task, softmax_forward
from .model import (
    COLLABORATION_CLASSES,
    Discussion,
    SpeakerRole,
    derive_provenance,
    student_adu_sequence,
    validate_discussion,
)

#: Distribution assigned to student turns with no reference turn: a turn
#: that responds to nothing can only introduce a new idea.
NEW_FALLBACK = {c: (1.0 if c == "new" else 0.0) for c in COLLABORATION_CLASSES}


def _check_heads(heads: dict[Task, SoftmaxHead], backend: EmbeddingBackend,
                 window: WindowConfig) -> None:
    for task in (Task.ARGUMENT, Task.SPECIFICITY, Task.COLLABORATION):
        if task not in heads:
            raise ValueError(f"missing head for task '{task.value}'")
        head = heads[task]
        if head.embedding_dim != backend.dimension:
            raise DimensionMismatch(
                f"{task.value} head expects embedding dimension {head.embedding_dim}, "
                f"backend '{backend.name}' provides {backend.dimension}")
    argument = heads[Task.ARGUMENT]
    if argument.feature_dim != window.span * backend.dimension:
        raise DimensionMismatch(
            f"argument head feature dim {argument.feature_dim} incompatible with "
            f"window ({window.before}, {window.after}) at dimension {backend.dimension}")


def classify_discussion(
    d: Discussion,
    heads: dict[Task, SoftmaxHead],
    backend: EmbeddingBackend,
    window: WindowConfig = WindowConfig(),
) -> Discussion:
    """Return a copy carrying predictions on every student unit.

    Argument and specificity distributions land on every student ADU,
    a collaboration distribution on every student turn; student turns
    without a reference get the deterministic NEW_FALLBACK.  Gold labels
    are preserved, provenance is recomputed, and the input is untouched.
    """
    issues = validate_discussion(d)
    if issues:
        raise ValueError(f"discussion does not validate: {issues[0]}")
    _check_heads(heads, backend, window)

    cached = CachingBackend(backend)
    seq = student_adu_sequence(d)
    adu_embeddings = [pool_average(embed_tokens(cached, adu.text)) for _, adu in seq]

    adu_predictions: dict[str, tuple[dict, dict]] = {}
    for i, (_, adu) in enumerate(seq):
        arg_dist = softmax_forward(
            heads[Task.ARGUMENT], build_argument_features(adu_embeddings, i, window))
        spec_dist = softmax_forward(
            heads[Task.SPECIFICITY], build_specificity_features(adu_embeddings[i]))
        adu_predictions[adu.adu_id] = (arg_dist, spec_dist)

    turn_embeddings: dict[int, object] = {}

    def turn_vec(idx: int):
        if idx not in turn_embeddings:
            turn_embeddings[idx] = pool_average(embed_tokens(cached, d.turns[idx].text))
        return turn_embeddings[idx]

    new_turns = []
    for turn in d.turns:
        if turn.role is not SpeakerRole.STUDENT:
            new_turns.append(turn)
            continue
        if turn.reference_turn_index is None:
            collab = dict(NEW_FALLBACK)
        else:
            x = build_collaboration_features(
                turn_vec(turn.turn_index), turn_vec(turn.reference_turn_index))
            collab = softmax_forward(heads[Task.COLLABORATION], x)
        new_adus = tuple(
            replace(adu,
                    predicted_argument=adu_predictions[adu.adu_id][0],
                    predicted_specificity=adu_predictions[adu.adu_id][1])
            for adu in turn.adus)
        new_turns.append(replace(turn, adus=new_adus, predicted_collaboration=collab))

    turns = tuple(new_turns)
    return replace(d, turns=turns, provenance=derive_provenance(turns))
