import numpy as np
import pytest

from discusskit.embedding import DeterministicBackend, embed_tokens, pool_average
from discusskit.features import WindowConfig
from discusskit.head import Task, cross_entropy_loss_and_grads
from discusskit.training import (
    Adam,
    DegenerateLabels,
    EarlyStopping,
    InsufficientData,
    TrainConfig,
    collect_examples,
    train_head,
)
from oracles import adam_first_step_oracle


class TestAdam:
    def test_first_step_matches_hand_computation(self):
        lr, b1, b2, eps = 0.001, 0.9, 0.999, 1e-8
        for g in (1.0, -2.5, 0.3):
            param = np.array([0.0])
            opt = Adam([(1,)], lr, b1, b2, eps)
            opt.step([param], [np.array([g])])
            expected = adam_first_step_oracle(g, lr, b1, b2, eps)
            assert abs(param[0] - expected) < 1e-15

    def test_first_step_approximates_signed_learning_rate(self):
        # For |g| >> eps the first update is about -lr * sign(g).
        param = np.array([0.0])
        opt = Adam([(1,)], 0.001, 0.9, 0.999, 1e-8)
        opt.step([param], [np.array([5.0])])
        assert abs(param[0] + 0.001) < 1e-9

    def test_constant_gradient_walks_parameter(self):
        param = np.array([0.0])
        opt = Adam([(1,)], 0.01, 0.9, 0.999, 1e-8)
        for _ in range(100):
            opt.step([param], [np.array([1.0])])
        assert param[0] < -0.5  # steadily moving against the gradient


class TestEarlyStopping:
    def test_spec_sequence_stops_at_epoch_4_best_2(self):
        stopper = EarlyStopping(patience=2)
        stops = [stopper.update(loss, epoch)
                 for epoch, loss in enumerate([1.0, 0.9, 0.95, 0.96], start=1)]
        assert stops == [False, False, False, True]
        assert stopper.best_epoch == 2
        assert stopper.best_loss == 0.9

    def test_strict_improvement_required(self):
        stopper = EarlyStopping(patience=1)
        assert stopper.update(1.0, 1) is False
        assert stopper.update(1.0, 2) is True  # equal is not an improvement

    def test_counter_resets_on_improvement(self):
        stopper = EarlyStopping(patience=2)
        for epoch, loss in enumerate([1.0, 1.1, 0.8, 0.9], start=1):
            stopped = stopper.update(loss, epoch)
        assert stopped is False  # counter was reset by the 0.8 improvement
        assert stopper.best_epoch == 3


def separable_corpus(backend, n=300, seed=11):
    """Texts anchored on one of three distinctive tokens: linearly separable
    clusters in embedding space."""
    rng = np.random.default_rng(seed)
    anchors = ("alpha", "beta", "gamma")
    examples = []
    for i in range(n):
        label = int(rng.integers(0, 3))
        noise = f"w{int(rng.integers(0, 40))}"
        text = f"{anchors[label]} {anchors[label]} {anchors[label]} {noise}"
        examples.append((pool_average(embed_tokens(backend, text)), label))
    return examples


class TestTrainHead:
    def test_insufficient_data(self):
        examples = [(np.zeros(4), 0)] * 5 + [(np.ones(4), 1)] * 4
        with pytest.raises(InsufficientData):
            train_head(examples, TrainConfig(), ("a", "b"), Task.SPECIFICITY)

    def test_degenerate_labels(self):
        examples = [(np.random.default_rng(i).normal(size=4), 0) for i in range(12)]
        with pytest.raises(DegenerateLabels):
            train_head(examples, TrainConfig(), ("a", "b"), Task.SPECIFICITY)

    def test_converges_on_separable_data(self, backend):
        examples = separable_corpus(backend)
        cfg = TrainConfig(max_epochs=200, seed=3)
        head, report = train_head(examples, cfg, ("a", "b", "c"), Task.SPECIFICITY)
        assert report.final_train_accuracy >= 0.95
        assert report.epochs_run <= 200
        assert report.best_epoch <= report.epochs_run
        assert len(report.train_loss_per_epoch) == report.epochs_run
        assert len(report.val_loss_per_epoch) == report.epochs_run

    def test_deterministic_given_seed(self, backend):
        examples = separable_corpus(backend, n=60)
        cfg = TrainConfig(max_epochs=30, seed=5)
        h1, r1 = train_head(examples, cfg, ("a", "b", "c"), Task.SPECIFICITY)
        h2, r2 = train_head(examples, cfg, ("a", "b", "c"), Task.SPECIFICITY)
        assert np.array_equal(h1.weights, h2.weights)
        assert np.array_equal(h1.bias, h2.bias)
        assert r1.val_loss_per_epoch == r2.val_loss_per_epoch

    def test_different_seed_different_split(self, backend):
        examples = separable_corpus(backend, n=60)
        h1, _ = train_head(examples, TrainConfig(max_epochs=10, seed=1),
                           ("a", "b", "c"), Task.SPECIFICITY)
        h2, _ = train_head(examples, TrainConfig(max_epochs=10, seed=2),
                           ("a", "b", "c"), Task.SPECIFICITY)
        assert not np.array_equal(h1.weights, h2.weights)

    def test_full_batch_best_loss_not_above_initial(self, backend):
        examples = separable_corpus(backend, n=100, seed=23)
        cfg = TrainConfig(batch_size=100, max_epochs=50, seed=9)
        _, report = train_head(examples, cfg, ("a", "b", "c"), Task.SPECIFICITY)
        assert report.train_loss_per_epoch[report.best_epoch - 1] <= report.initial_train_loss

    def test_validation_split_size(self, backend):
        # 10% of 40 examples -> 4 validation units, visible through loss lists
        examples = separable_corpus(backend, n=40)
        cfg = TrainConfig(max_epochs=5, seed=2)
        head, report = train_head(examples, cfg, ("a", "b", "c"), Task.SPECIFICITY)
        assert report.epochs_run >= 1  # split leaves 36 training examples

    def test_argument_head_requires_window(self):
        examples = [(np.random.default_rng(i).normal(size=8), i % 2) for i in range(12)]
        with pytest.raises(ValueError):
            train_head(examples, TrainConfig(), ("a", "b"), Task.ARGUMENT)

    def test_argument_head_records_geometry(self, backend):
        d = backend.dimension
        window = WindowConfig(1, 1)
        rng = np.random.default_rng(0)
        examples = [(rng.normal(size=3 * d), i % 3) for i in range(30)]
        head, _ = train_head(examples, TrainConfig(max_epochs=3),
                             ("claim", "evidence", "explanation"),
                             Task.ARGUMENT, window=window)
        assert head.embedding_dim == d
        assert head.window == window
        assert head.feature_dim == 3 * d


class TestTrainConfig:
    def test_validation_fraction_bounds(self):
        with pytest.raises(ValueError):
            TrainConfig(validation_fraction=0.5)
        with pytest.raises(ValueError):
            TrainConfig(validation_fraction=0.0)

    def test_patience_bound(self):
        with pytest.raises(ValueError):
            TrainConfig(patience=0)

    def test_defaults_match_contract(self):
        cfg = TrainConfig()
        assert (cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon) == \
            (0.001, 0.9, 0.999, 1e-8)
        assert (cfg.batch_size, cfg.max_epochs, cfg.patience, cfg.validation_fraction) == \
            (32, 500, 5, 0.1)


class TestCollectExamples:
    def test_argument_counts(self, sample_discussion, backend):
        examples = collect_examples([sample_discussion], Task.ARGUMENT,
                                    backend, WindowConfig())
        assert len(examples) == 21
        assert all(x.shape == (5 * backend.dimension,) for x, _ in examples)

    def test_specificity_counts(self, sample_discussion, backend):
        examples = collect_examples([sample_discussion], Task.SPECIFICITY,
                                    backend, WindowConfig())
        assert len(examples) == 21
        assert all(x.shape == (backend.dimension,) for x, _ in examples)

    def test_collaboration_skips_turns_without_reference(self, sample_discussion, backend):
        examples = collect_examples([sample_discussion], Task.COLLABORATION,
                                    backend, WindowConfig())
        with_ref = [t for t in sample_discussion.turns
                    if t.gold_collaboration is not None
                    and t.reference_turn_index is not None]
        assert len(examples) == len(with_ref) == 10
