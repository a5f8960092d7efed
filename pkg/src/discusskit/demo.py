"""Bundled sample discussion and on-demand demo heads.

The sample is a gold-coded ~20-turn literature discussion shipped with the
package; the demo heads are trained on it with the deterministic backend,
so any fixed seed yields the same heads on every machine.
"""

from __future__ import annotations

import json
from datetime import date
from importlib import resources

from .embedding import EmbeddingBackend
from .features import WindowConfig
from .head import CLASSES_BY_TASK, SoftmaxHead, Task
from .model import Discussion
from .training import TrainConfig, collect_examples, train_head
from .transcript_io import parse_transcript

SAMPLE_ID = "sample-wintering"
SAMPLE_TITLE = "The Wintering, period 3 discussion"
SAMPLE_DATE = date(2026, 3, 5)


def _data(name: str) -> str:
    return resources.files("discusskit").joinpath(f"data/{name}").read_text("utf-8")


def sample_transcript_text() -> str:
    return _data("sample_transcript.csv")


def load_sample_discussion() -> Discussion:
    return parse_transcript(
        sample_transcript_text(),
        discussion_id=SAMPLE_ID,
        title=SAMPLE_TITLE,
        recorded_at=SAMPLE_DATE,
    )


def default_rules_json() -> list[dict]:
    return json.loads(_data("default_rules.json"))


def resource_links_json() -> dict:
    return json.loads(_data("resource_links.json"))


def build_demo_heads(
    backend: EmbeddingBackend,
    window: WindowConfig = WindowConfig(),
    seed: int = 7,
) -> dict[Task, SoftmaxHead]:
    """Train all three heads on the bundled sample; deterministic per seed."""
    sample = load_sample_discussion()
    heads: dict[Task, SoftmaxHead] = {}
    cfg = TrainConfig(seed=seed)
    for task in (Task.ARGUMENT, Task.SPECIFICITY, Task.COLLABORATION):
        examples = collect_examples([sample], task, backend, window)
        head, _ = train_head(
            examples, cfg, CLASSES_BY_TASK[task], task,
            window=window if task is Task.ARGUMENT else None,
            metadata={"backend": backend.name, "source": "demo", "seed": seed},
        )
        heads[task] = head
    return heads
