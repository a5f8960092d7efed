"""Acceptance criteria, one test per criterion.

Each test enforces the contract at its stated tolerance and runtime budget
and prints one PASS line (visible with `pytest -s` or in captured output on
failure).  The dashboard (frontend/) has its own suite.
"""

import json
import os
import random
import signal
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from discusskit.embedding import DeterministicBackend, embed_tokens, pool_average
from discusskit.features import (
    WindowConfig,
    build_argument_features,
    build_collaboration_features,
    build_specificity_features,
)
from discusskit.head import Task, cross_entropy_loss_and_grads
from discusskit.metrics import (
    cohen_kappa,
    confusion_matrix,
    f1_scores,
    format_report_table,
    quadratic_weighted_kappa,
)
from discusskit.model import discussion_from_dict, validate_discussion
from discusskit.training import EarlyStopping, TrainConfig, train_head
from oracles import f1_oracle, kappa_oracle, qwk_oracle

PASS = "ACCEPTANCE PASS:"


def random_label_sets(count, seed=2026, n_max=50, k_max=4):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        k = int(rng.integers(2, k_max + 1))
        n = int(rng.integers(1, n_max + 1))
        classes = tuple(f"c{i}" for i in range(k))
        gold = [classes[i] for i in rng.integers(0, k, size=n)]
        pred = [classes[i] for i in rng.integers(0, k, size=n)]
        yield classes, gold, pred


def test_metric_oracle_equivalence():
    """kappa/QWK/macro/micro F1 match a per-definition brute force within 1e-9."""
    started = time.monotonic()
    checked = 0
    for classes, gold, pred in random_label_sets(120):
        m = confusion_matrix(gold, pred, classes)
        assert abs(cohen_kappa(m) - kappa_oracle(gold, pred, classes)) < 1e-9
        assert abs(quadratic_weighted_kappa(m) - qwk_oracle(gold, pred, classes)) < 1e-9
        scores = f1_scores(m)
        macro, micro, _ = f1_oracle(gold, pred, classes)
        assert abs(scores.macro_f1 - macro) < 1e-9
        assert abs(scores.micro_f1 - micro) < 1e-9
        checked += 1
    elapsed = time.monotonic() - started
    assert checked >= 100
    assert elapsed < 5.0
    print(f"{PASS} metric oracle equivalence ({checked} label sets, {elapsed:.2f}s)")


def test_metric_identities():
    """micro-F1 = accuracy always; QWK = kappa for K=2 within 1e-12; kappa = 1 iff diagonal."""
    started = time.monotonic()
    for classes, gold, pred in random_label_sets(150, seed=7):
        m = confusion_matrix(gold, pred, classes)
        accuracy = sum(g == p for g, p in zip(gold, pred)) / len(gold)
        assert abs(f1_scores(m).micro_f1 - accuracy) < 1e-12
        off_diagonal = m.cells.sum() - np.trace(m.cells)
        if off_diagonal == 0:
            assert cohen_kappa(m) == 1.0
        else:
            assert cohen_kappa(m) < 1.0
    for classes, gold, pred in random_label_sets(150, seed=8, k_max=2):
        m = confusion_matrix(gold, pred, classes)
        assert abs(quadratic_weighted_kappa(m) - cohen_kappa(m)) < 1e-12
    elapsed = time.monotonic() - started
    assert elapsed < 5.0
    print(f"{PASS} metric identities ({elapsed:.2f}s)")


def test_worked_metric_examples():
    """Hand-computed values: kappa = 0.5 exactly, macro-F1 = 2/3 within 1e-12."""
    m = confusion_matrix(["A", "A", "B", "B"], ["A", "B", "B", "B"], ("A", "B"))
    assert cohen_kappa(m) == 0.5
    m = confusion_matrix(["A", "A", "B"], ["A", "B", "B"], ("A", "B"))
    assert abs(f1_scores(m).macro_f1 - 2 / 3) < 1e-12
    print(f"{PASS} worked metric examples")


def test_feature_shapes():
    """Dims (b+1+a)*d for all (b,a) in {0..3}^2; exact zero padding; collab
    identities; specificity = pooled embedding."""
    started = time.monotonic()
    d = 6
    rng = np.random.default_rng(1)
    seq = [rng.normal(size=d) for _ in range(5)]
    for b in range(4):
        for a in range(4):
            w = WindowConfig(b, a)
            for i in range(len(seq)):
                x = build_argument_features(seq, i, w)
                assert x.shape == ((b + 1 + a) * d,)
                for offset in range(-b, a + 1):
                    j = i + offset
                    block = x[(offset + b) * d:(offset + b + 1) * d]
                    if 0 <= j < len(seq):
                        assert np.array_equal(block, seq[j])
                    else:
                        assert np.array_equal(block, np.zeros(d))
    x = rng.normal(size=d)
    y = rng.normal(size=d)
    assert np.array_equal(build_collaboration_features(x, np.ones(d)), x)
    assert np.array_equal(build_collaboration_features(x, y),
                          build_collaboration_features(y, x))
    pooled = pool_average(embed_tokens(DeterministicBackend(d), "some student words"))
    assert build_specificity_features(pooled) is pooled
    elapsed = time.monotonic() - started
    assert elapsed < 1.0
    print(f"{PASS} feature shapes ({elapsed:.2f}s)")


def test_gradient_check():
    """Analytic cross-entropy gradients match central differences within 1e-4
    relative error on 20 random instances (K <= 4, D <= 10)."""
    started = time.monotonic()
    h = 1e-6
    for seed in range(20):
        rng = np.random.default_rng(seed)
        k = int(rng.integers(2, 5))
        dim = int(rng.integers(2, 11))
        n = int(rng.integers(3, 12))
        weights = rng.normal(scale=0.5, size=(k, dim))
        bias = rng.normal(scale=0.5, size=k)
        features = rng.normal(size=(n, dim))
        labels = rng.integers(0, k, size=n)
        _, grad_w, grad_b = cross_entropy_loss_and_grads(weights, bias, features, labels)

        def loss_at(w, b):
            value, _, _ = cross_entropy_loss_and_grads(w, b, features, labels)
            return value

        fd_w = np.zeros_like(weights)
        for idx in np.ndindex(*weights.shape):
            w_plus, w_minus = weights.copy(), weights.copy()
            w_plus[idx] += h
            w_minus[idx] -= h
            fd_w[idx] = (loss_at(w_plus, bias) - loss_at(w_minus, bias)) / (2 * h)
        fd_b = np.zeros_like(bias)
        for i in range(k):
            b_plus, b_minus = bias.copy(), bias.copy()
            b_plus[i] += h
            b_minus[i] -= h
            fd_b[i] = (loss_at(weights, b_plus) - loss_at(weights, b_minus)) / (2 * h)

        assert np.linalg.norm(grad_w - fd_w) / max(np.linalg.norm(fd_w), 1e-12) < 1e-4
        assert np.linalg.norm(grad_b - fd_b) / max(np.linalg.norm(fd_b), 1e-12) < 1e-4
    elapsed = time.monotonic() - started
    assert elapsed < 5.0
    print(f"{PASS} gradient check ({elapsed:.2f}s)")


def test_training_convergence_and_early_stopping():
    """300 linearly separable examples reach >= 95% training accuracy within
    200 epochs on defaults; the constructed loss sequence stops at epoch 4."""
    started = time.monotonic()
    backend = DeterministicBackend(32)
    rng = np.random.default_rng(11)
    anchors = ("alpha", "beta", "gamma")
    examples = []
    for _ in range(300):
        label = int(rng.integers(0, 3))
        text = f"{anchors[label]} {anchors[label]} {anchors[label]} w{int(rng.integers(0, 40))}"
        examples.append((pool_average(embed_tokens(backend, text)), label))
    cfg = TrainConfig(max_epochs=200)
    head, report = train_head(examples, cfg, ("a", "b", "c"), Task.SPECIFICITY)
    assert report.final_train_accuracy >= 0.95
    assert report.epochs_run <= 200

    stopper = EarlyStopping(patience=2)
    stops = [stopper.update(loss, epoch)
             for epoch, loss in enumerate([1.0, 0.9, 0.95, 0.96], start=1)]
    assert stops == [False, False, False, True]
    assert stopper.best_epoch == 2
    elapsed = time.monotonic() - started
    assert elapsed < 60.0
    print(f"{PASS} training convergence (acc={report.final_train_accuracy:.3f}, "
          f"epochs={report.epochs_run}, {elapsed:.2f}s)")


def _run_dt(args, env_extra, cwd):
    env = {**os.environ, **env_extra}
    return subprocess.run(
        [sys.executable, "-m", "discusskit.cli", *args],
        env=env, cwd=cwd, capture_output=True, text=True)


def test_classify_determinism_across_runs(tmp_path):
    """`dt classify` on the bundled sample with the deterministic backend and a
    fixed seed produces byte-identical prediction files across two runs."""
    outputs = []
    for name in ("run-a", "run-b"):
        root = tmp_path / name
        root.mkdir()
        env = {"DT_DATA_ROOT": str(root / "data")}
        sample = root / "sample.csv"
        result = _run_dt(["sample", "--out", str(sample)], env, root)
        assert result.returncode == 0, result.stderr
        result = _run_dt(["ingest", str(sample), "--id", "demo1"], env, root)
        assert result.returncode == 0, result.stderr
        out_csv = root / "pred.csv"
        result = _run_dt(["classify", "demo1", "--seed", "7", "--out", str(out_csv)],
                         env, root)
        assert result.returncode == 0, result.stderr
        outputs.append(out_csv.read_bytes())
    assert outputs[0] == outputs[1]
    print(f"{PASS} classify determinism ({len(outputs[0])} bytes, identical)")


def test_end_to_end_pipeline(tmp_path):
    """Ingest -> classify -> analytics -> evaluation through the service."""
    from fastapi.testclient import TestClient

    from discusskit.config import AppConfig
    from discusskit.demo import sample_transcript_text
    from discusskit.metrics import evaluate_discussions
    from discusskit.server import create_app
    from discusskit.store import Store

    started = time.monotonic()
    cfg = AppConfig(data_root=str(tmp_path / "data"), embedding_dim=16)
    with TestClient(create_app(cfg)) as client:
        resp = client.post("/api/discussions", content=sample_transcript_text(),
                           params={"title": "sample", "recorded_at": "2026-03-05"})
        assert resp.status_code == 201
        discussion_id = resp.json()["discussion_id"]

        job = client.post(f"/api/discussions/{discussion_id}/classify", json={}).json()
        deadline = time.time() + 30
        while time.time() < deadline:
            status = client.get(f"/api/jobs/{job['job_id']}").json()
            if status["state"] in ("done", "failed"):
                break
            time.sleep(0.05)
        assert status["state"] == "done", status

        for source in ("gold", "predicted"):
            bundle = client.get(f"/api/discussions/{discussion_id}/analytics",
                                params={"source": source}).json()
            for dim in ("argument", "specificity", "collaboration"):
                pct = bundle["distributions"][dim]["percentages"]
                assert abs(sum(pct.values()) - 100.0) < 0.01

        bundle = client.get(f"/api/discussions/{discussion_id}/analytics",
                            params={"source": "gold"}).json()
        non_new_with_ref = 10  # sample: 5 extensions + 3 challenges + 2 agrees
        assert len(bundle["collaboration_map"]["edges"]) == non_new_with_ref

        evaluation = client.get(f"/api/discussions/{discussion_id}/evaluation").json()
        for name, ev in evaluation["dimensions"].items():
            assert -1.0 <= ev["kappa"] <= 1.0
            assert 0.0 <= ev["macro_f1"] <= 1.0
            assert 0.0 <= ev["micro_f1"] <= 1.0
            if name == "specificity":
                assert -1.0 <= ev["qwk"] <= 1.0

        # Table-3-shaped text report from the same stored discussion
        store = Store(cfg.data_root)
        table = format_report_table(evaluate_discussions(
            [store.load_discussion(discussion_id)]))
        header = table.splitlines()[0]
        for column in ("Code", "N", "Kappa", "Macro F", "Micro F"):
            assert column in header
    elapsed = time.monotonic() - started
    assert elapsed < 30.0
    print(f"{PASS} end-to-end pipeline ({elapsed:.2f}s)")


def test_service_durability_under_kills(tmp_path):
    """SIGKILL mid-classification 10 times at random points; the store always
    reloads cleanly and version 1 stays intact."""
    from discusskit.demo import load_sample_discussion
    from discusskit.store import Store

    root = tmp_path / "data"
    env = {"DT_DATA_ROOT": str(root), "DT_EMBEDDING_DIM": "64"}
    sample_path = tmp_path / "sample.csv"
    assert _run_dt(["sample", "--out", str(sample_path)], env, tmp_path).returncode == 0
    assert _run_dt(["ingest", str(sample_path), "--id", "demo1"],
                   env, tmp_path).returncode == 0
    original = Store(root).load_discussion("demo1", version=1)
    assert original.turns == load_sample_discussion().turns

    # time one full run to calibrate the kill window
    t0 = time.monotonic()
    assert _run_dt(["classify", "demo1", "--seed", "7"], env, tmp_path).returncode == 0
    full_runtime = time.monotonic() - t0

    rng = random.Random(13)
    kills = 0
    for _ in range(10):
        delay = rng.uniform(0.02, full_runtime * 1.05)
        proc = subprocess.Popen(
            [sys.executable, "-m", "discusskit.cli", "classify", "demo1", "--seed", "7"],
            env={**os.environ, **env}, cwd=tmp_path,
            stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
        time.sleep(delay)
        if proc.poll() is None:
            proc.send_signal(signal.SIGKILL)
            kills += 1
        proc.wait()

        # the store must reload cleanly after every kill
        store = Store(root)
        doc = store.get("discussions", "demo1")
        for version_doc in doc["versions"]:
            d = discussion_from_dict(version_doc)
            assert validate_discussion(d) == []
        assert store.load_discussion("demo1", version=1) == original
        for head_id in store.list_ids("heads"):
            json.dumps(store.get("heads", head_id))
    print(f"{PASS} service durability (10 iterations, {kills} mid-run kills, "
          f"store intact)")


@pytest.mark.skip(reason="optional criterion: needs the external transformer "
                         "backend and the downloadable training corpus; the "
                         "--search-window CV loop itself is covered in test_cli.py")
def test_optional_window_search_on_external_corpus():
    pass
