"""Feature vectors for the three classification tasks.

Argument moves see the target ADU embedding concatenated with a context
window of surrounding ADU embeddings (zero vectors past the sequence
edges); the window slides over the flattened student-ADU sequence of the
whole discussion and crosses turn boundaries.  Specificity uses the target
ADU embedding as-is.  Collaboration multiplies the target and reference
turn embeddings element-wise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .embedding import DimensionMismatch

MAX_WINDOW = 8


class IndexOutOfRange(Exception):
    pass


@dataclass(frozen=True)
class WindowConfig:
    before: int = 2
    after: int = 2

    def __post_init__(self):
        if not (0 <= self.before <= MAX_WINDOW and 0 <= self.after <= MAX_WINDOW):
            raise ValueError(f"window sizes must be in 0..{MAX_WINDOW}")

    @property
    def span(self) -> int:
        """Number of concatenated embeddings: before + target + after."""
        return self.before + 1 + self.after


def build_argument_features(
    embeddings: Sequence[np.ndarray], index: int, window: WindowConfig
) -> np.ndarray:
    """Concatenate [e(i-b), ..., e(i), ..., e(i+a)] over the student-ADU sequence.

    Positions outside the sequence contribute zero vectors, so the feature
    dimension is always (before + 1 + after) * d.
    """
    n = len(embeddings)
    if not (0 <= index < n):
        raise IndexOutOfRange(f"index {index} outside sequence of length {n}")
    dim = embeddings[index].shape[0]
    zero = np.zeros(dim)
    parts = []
    for offset in range(-window.before, window.after + 1):
        j = index + offset
        if 0 <= j < n:
            if embeddings[j].shape[0] != dim:
                raise DimensionMismatch(
                    f"embedding {j} has dimension {embeddings[j].shape[0]}, expected {dim}")
            parts.append(embeddings[j])
        else:
            parts.append(zero)
    return np.concatenate(parts)


def build_specificity_features(adu_embedding: np.ndarray) -> np.ndarray:
    """Specificity is classified straight off the pooled ADU embedding."""
    return adu_embedding


def build_collaboration_features(
    target_turn_embedding: np.ndarray, reference_turn_embedding: np.ndarray
) -> np.ndarray:
    """Element-wise product of the two turn embeddings (symmetric)."""
    if target_turn_embedding.shape != reference_turn_embedding.shape:
        raise DimensionMismatch(
            f"turn embeddings differ: {target_turn_embedding.shape} vs "
            f"{reference_turn_embedding.shape}")
    return target_turn_embedding * reference_turn_embedding
