"""Linear softmax classification heads over frozen embedding features.

A head is a K x D weight matrix plus bias.  Heads are trained with Adam on
mean cross-entropy (see training.py) and persisted as a versioned JSON
container with magic string ``DTHEAD``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .embedding import DimensionMismatch
from .features import WindowConfig
from .model import ARGUMENT_CLASSES, COLLABORATION_CLASSES, SPECIFICITY_CLASSES

MODEL_MAGIC = "DTHEAD"
MODEL_VERSION = 1


class Task(Enum):
    ARGUMENT = "argument"
    SPECIFICITY = "specificity"
    COLLABORATION = "collaboration"


CLASSES_BY_TASK = {
    Task.ARGUMENT: ARGUMENT_CLASSES,
    Task.SPECIFICITY: SPECIFICITY_CLASSES,
    Task.COLLABORATION: COLLABORATION_CLASSES,
}


class CorruptModel(Exception):
    pass


class VersionMismatch(Exception):
    pass


@dataclass(eq=False)
class SoftmaxHead:
    task: Task
    classes: tuple[str, ...]
    weights: np.ndarray  # K x D
    bias: np.ndarray  # K
    embedding_dim: int
    window: Optional[WindowConfig] = None  # argument heads only
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        k, d = self.weights.shape
        if k != len(self.classes):
            raise ValueError(f"{k} weight rows for {len(self.classes)} classes")
        if self.bias.shape != (k,):
            raise ValueError(f"bias shape {self.bias.shape}, expected ({k},)")
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.bias))):
            raise ValueError("non-finite parameters")
        if d != self.expected_feature_dim():
            raise ValueError(
                f"feature dim {d} inconsistent with embedding_dim {self.embedding_dim} "
                f"for task {self.task.value}")

    @property
    def feature_dim(self) -> int:
        return self.weights.shape[1]

    def expected_feature_dim(self) -> int:
        if self.task is Task.ARGUMENT:
            window = self.window or WindowConfig()
            return window.span * self.embedding_dim
        return self.embedding_dim

    def __eq__(self, other) -> bool:
        if not isinstance(other, SoftmaxHead):
            return NotImplemented
        return (self.task is other.task
                and self.classes == other.classes
                and self.embedding_dim == other.embedding_dim
                and self.window == other.window
                and np.array_equal(self.weights, other.weights)
                and np.array_equal(self.bias, other.bias)
                and self.metadata == other.metadata)


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax with the mandatory max-shift stabilization."""
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / np.sum(exp, axis=-1, keepdims=True)


def softmax_forward(head: SoftmaxHead, x: np.ndarray) -> dict:
    """Class probability distribution for one feature vector."""
    if x.shape != (head.feature_dim,):
        raise DimensionMismatch(
            f"feature vector has shape {x.shape}, head expects ({head.feature_dim},)")
    probs = softmax(head.weights @ x + head.bias)
    return {label: float(p) for label, p in zip(head.classes, probs)}


def cross_entropy_loss_and_grads(
    weights: np.ndarray, bias: np.ndarray, features: np.ndarray, labels: np.ndarray
) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean cross-entropy over a batch plus analytic gradients w.r.t. W and b."""
    n = features.shape[0]
    probs = softmax(features @ weights.T + bias)
    loss = float(-np.mean(np.log(probs[np.arange(n), labels] + 1e-300)))
    grad_logits = probs.copy()
    grad_logits[np.arange(n), labels] -= 1.0
    grad_logits /= n
    return loss, grad_logits.T @ features, grad_logits.sum(axis=0)


def predict_classes(head: SoftmaxHead, features: np.ndarray) -> np.ndarray:
    """Argmax class indices for a batch of feature vectors."""
    logits = features @ head.weights.T + head.bias
    return np.argmax(logits, axis=1)


def save_head(head: SoftmaxHead) -> bytes:
    """Versioned JSON container; lossless for float64 parameters."""
    doc = {
        "magic": MODEL_MAGIC,
        "version": MODEL_VERSION,
        "task": head.task.value,
        "classes": list(head.classes),
        "embedding_dim": head.embedding_dim,
        "feature_dim": head.feature_dim,
        "window": {"before": head.window.before, "after": head.window.after}
        if head.window else None,
        "weights": [[float(v) for v in row] for row in head.weights],
        "bias": [float(v) for v in head.bias],
        "metadata": head.metadata,
    }
    return json.dumps(doc).encode("utf-8")


def load_head(data: bytes, *, backend_dimension: Optional[int] = None) -> SoftmaxHead:
    """Inverse of save_head.

    Raises CorruptModel for anything that does not decode to a well-formed
    container, VersionMismatch for unsupported versions, and
    DimensionMismatch when the head does not fit the configured backend.
    """
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptModel(f"not a model file: {exc}") from None
    if not isinstance(doc, dict) or doc.get("magic") != MODEL_MAGIC:
        raise CorruptModel("missing DTHEAD magic")
    if doc.get("version") != MODEL_VERSION:
        raise VersionMismatch(f"unsupported model version {doc.get('version')!r}")
    try:
        window = WindowConfig(**doc["window"]) if doc.get("window") else None
        head = SoftmaxHead(
            task=Task(doc["task"]),
            classes=tuple(doc["classes"]),
            weights=np.array(doc["weights"], dtype=float),
            bias=np.array(doc["bias"], dtype=float),
            embedding_dim=int(doc["embedding_dim"]),
            window=window,
            metadata=doc.get("metadata", {}),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModel(f"malformed model file: {exc}") from None
    if doc.get("feature_dim") != head.feature_dim:
        raise CorruptModel(
            f"declared feature_dim {doc.get('feature_dim')} != actual {head.feature_dim}")
    if backend_dimension is not None and head.embedding_dim != backend_dimension:
        raise DimensionMismatch(
            f"head built for embedding dimension {head.embedding_dim}, "
            f"backend provides {backend_dimension}")
    return head
