"""Softmax-head training: Adam over mini-batches with early stopping.

A seeded fraction of the examples is held out as a validation set; training
stops once validation loss has not improved for `patience` consecutive
epochs (or at max_epochs), and the parameters from the best-validation
epoch are returned.  Everything is deterministic given the inputs and the
config seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .embedding import CachingBackend, EmbeddingBackend, embed_tokens, pool_average
from .features import (
    WindowConfig,
    build_argument_features,
    build_collaboration_features,
    build_specificity_features,
)
from .head import CLASSES_BY_TASK, SoftmaxHead, Task, cross_entropy_loss_and_grads, softmax
from .model import Discussion, SpeakerRole, student_adu_sequence


class InsufficientData(Exception):
    pass


class DegenerateLabels(Exception):
    pass


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    batch_size: int = 32
    max_epochs: int = 500
    patience: int = 5
    validation_fraction: float = 0.1
    seed: int = 7

    def __post_init__(self):
        if not (0.0 < self.validation_fraction < 0.5):
            raise ValueError("validation_fraction must be in (0, 0.5)")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")


@dataclass
class TrainingReport:
    epochs_run: int
    best_epoch: int
    train_loss_per_epoch: list[float]
    val_loss_per_epoch: list[float]
    final_train_accuracy: float
    initial_train_loss: float


class Adam:
    """Standard Adam recurrences with bias correction."""

    def __init__(self, shapes: Sequence[tuple], lr: float, beta1: float,
                 beta2: float, epsilon: float):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.t = 0
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        self.t += 1
        for i, (p, g) in enumerate(zip(params, grads)):
            self.m[i] = self.beta1 * self.m[i] + (1 - self.beta1) * g
            self.v[i] = self.beta2 * self.v[i] + (1 - self.beta2) * g * g
            m_hat = self.m[i] / (1 - self.beta1 ** self.t)
            v_hat = self.v[i] / (1 - self.beta2 ** self.t)
            p -= self.lr * m_hat / (np.sqrt(v_hat) + self.epsilon)


class EarlyStopping:
    """Stop once validation loss has not strictly improved for `patience` epochs."""

    def __init__(self, patience: int):
        self.patience = patience
        self.counter = 0
        self.best_loss: Optional[float] = None
        self.best_epoch = 0

    def update(self, val_loss: float, epoch: int) -> bool:
        """Record one epoch's validation loss; True means stop now."""
        if self.best_loss is None or val_loss < self.best_loss:
            self.best_loss = val_loss
            self.best_epoch = epoch
            self.counter = 0
            return False
        self.counter += 1
        return self.counter >= self.patience


def _mean_loss(weights, bias, features, labels) -> float:
    loss, _, _ = cross_entropy_loss_and_grads(weights, bias, features, labels)
    return loss


def train_head(
    examples: Sequence[tuple[np.ndarray, int]],
    cfg: TrainConfig,
    classes: tuple[str, ...],
    task: Task,
    window: Optional[WindowConfig] = None,
    metadata: Optional[dict] = None,
) -> tuple[SoftmaxHead, TrainingReport]:
    """Fit a softmax head on (feature vector, gold class index) pairs.

    Requires at least 10 examples spanning at least 2 classes; raises
    InsufficientData / DegenerateLabels otherwise.  Argument heads need the
    window their features were built with so the head records its geometry.
    """
    n = len(examples)
    if n < 10:
        raise InsufficientData(f"need >= 10 examples, got {n}")
    features = np.stack([np.asarray(x, dtype=float) for x, _ in examples])
    labels = np.array([y for _, y in examples], dtype=int)
    k = len(classes)
    if labels.min(initial=0) < 0 or labels.max(initial=0) >= k:
        raise ValueError(f"class index outside 0..{k - 1}")
    if len(np.unique(labels)) < 2:
        raise DegenerateLabels("all examples carry the same class")

    dim = features.shape[1]
    if task is Task.ARGUMENT:
        if window is None:
            raise ValueError("argument heads need the window their features used")
        if dim % window.span != 0:
            raise ValueError(f"feature dim {dim} not divisible by window span {window.span}")
        embedding_dim = dim // window.span
    else:
        window = None
        embedding_dim = dim

    rng = np.random.default_rng(cfg.seed)
    n_val = max(1, math.floor(cfg.validation_fraction * n))
    order = rng.permutation(n)
    val_idx, train_idx = order[:n_val], order[n_val:]
    x_train, y_train = features[train_idx], labels[train_idx]
    x_val, y_val = features[val_idx], labels[val_idx]

    weights = rng.uniform(-0.05, 0.05, (k, dim))
    bias = np.zeros(k)
    initial_loss = _mean_loss(weights, bias, x_train, y_train)

    optimizer = Adam([(k, dim), (k,)], cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon)
    stopper = EarlyStopping(cfg.patience)
    best_params = (weights.copy(), bias.copy())
    train_losses: list[float] = []
    val_losses: list[float] = []

    n_train = len(train_idx)
    for epoch in range(1, cfg.max_epochs + 1):
        shuffle = rng.permutation(n_train)
        for start in range(0, n_train, cfg.batch_size):
            batch = shuffle[start:start + cfg.batch_size]
            _, grad_w, grad_b = cross_entropy_loss_and_grads(
                weights, bias, x_train[batch], y_train[batch])
            optimizer.step([weights, bias], [grad_w, grad_b])

        train_losses.append(_mean_loss(weights, bias, x_train, y_train))
        val_loss = _mean_loss(weights, bias, x_val, y_val)
        val_losses.append(val_loss)
        if stopper.best_loss is None or val_loss < stopper.best_loss:
            best_params = (weights.copy(), bias.copy())
        if stopper.update(val_loss, epoch):
            break

    head = SoftmaxHead(
        task=task,
        classes=tuple(classes),
        weights=best_params[0],
        bias=best_params[1],
        embedding_dim=embedding_dim,
        window=window,
        metadata=dict(metadata or {}),
    )
    probs = softmax(features @ head.weights.T + head.bias)
    accuracy = float(np.mean(np.argmax(probs, axis=1) == labels))
    report = TrainingReport(
        epochs_run=len(train_losses),
        best_epoch=stopper.best_epoch,
        train_loss_per_epoch=train_losses,
        val_loss_per_epoch=val_losses,
        final_train_accuracy=accuracy,
        initial_train_loss=initial_loss,
    )
    head.metadata.setdefault("training", {
        "epochs_run": report.epochs_run,
        "best_epoch": report.best_epoch,
        "final_train_accuracy": report.final_train_accuracy,
    })
    return head, report


def collect_examples(
    discussions: Sequence[Discussion],
    task: Task,
    backend: EmbeddingBackend,
    window: WindowConfig,
) -> list[tuple[np.ndarray, int]]:
    """Build gold-labelled training pairs for one task from coded discussions.

    Unlabelled units are skipped.  Collaboration examples come only from
    student turns that have both a gold label and a reference turn (a 'new'
    turn with no reference has no pair to featurize).
    """
    cached = CachingBackend(backend)
    classes = CLASSES_BY_TASK[task]
    out: list[tuple[np.ndarray, int]] = []

    for d in discussions:
        if task in (Task.ARGUMENT, Task.SPECIFICITY):
            seq = student_adu_sequence(d)
            embeddings = [pool_average(embed_tokens(cached, adu.text)) for _, adu in seq]
            for i, (_, adu) in enumerate(seq):
                gold = adu.gold_argument if task is Task.ARGUMENT else adu.gold_specificity
                if gold is None:
                    continue
                if task is Task.ARGUMENT:
                    x = build_argument_features(embeddings, i, window)
                else:
                    x = build_specificity_features(embeddings[i])
                out.append((x, classes.index(gold.value)))
        else:
            turn_embeddings: dict[int, np.ndarray] = {}

            def turn_vec(idx: int) -> np.ndarray:
                if idx not in turn_embeddings:
                    turn_embeddings[idx] = pool_average(
                        embed_tokens(cached, d.turns[idx].text))
                return turn_embeddings[idx]

            for turn in d.turns:
                if turn.role is not SpeakerRole.STUDENT:
                    continue
                if turn.gold_collaboration is None or turn.reference_turn_index is None:
                    continue
                x = build_collaboration_features(
                    turn_vec(turn.turn_index), turn_vec(turn.reference_turn_index))
                out.append((x, classes.index(turn.gold_collaboration.value)))
    return out
