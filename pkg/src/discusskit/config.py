"""Runtime configuration: TOML or JSON file plus DT_* environment overrides."""

from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .embedding import (
    DEFAULT_DIMENSION,
    DEFAULT_MODEL_ID,
    DeterministicBackend,
    EmbeddingBackend,
    ExternalBackend,
)

ENV_PREFIX = "DT_"


@dataclass(frozen=True)
class AppConfig:
    data_root: str = "dt-data"
    host: str = "127.0.0.1"
    port: int = 8008
    backend: str = "deterministic"  # "deterministic" | "external"
    embedding_dim: int = DEFAULT_DIMENSION
    external_url: Optional[str] = None
    model_id: str = DEFAULT_MODEL_ID
    rules_path: Optional[str] = None
    resources_path: Optional[str] = None
    ui_root: Optional[str] = None  # static dashboard build to serve at /ui
    seed: int = 7

    def make_backend(self, name: Optional[str] = None) -> EmbeddingBackend:
        kind = name or self.backend
        if kind == "deterministic":
            return DeterministicBackend(self.embedding_dim)
        if kind == "external":
            if not self.external_url:
                raise ValueError("external backend requires external_url")
            return ExternalBackend(self.external_url, self.embedding_dim, self.model_id)
        raise ValueError(f"unknown backend kind {kind!r}")


_INT_FIELDS = {"port", "embedding_dim", "seed"}


def load_config(path: Optional[str | Path] = None, env: Optional[dict] = None) -> AppConfig:
    """Defaults <- config file (TOML or JSON by extension) <- DT_* env vars."""
    values: dict = {}
    if path is not None:
        p = Path(path)
        raw = p.read_bytes()
        doc = json.loads(raw) if p.suffix == ".json" else tomllib.loads(raw.decode("utf-8"))
        values.update(doc)

    env = os.environ if env is None else env
    for f in fields(AppConfig):
        key = ENV_PREFIX + f.name.upper()
        if key in env:
            values[f.name] = env[key]

    known = {f.name for f in fields(AppConfig)}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for name in _INT_FIELDS & set(values):
        values[name] = int(values[name])
    return AppConfig(**values)
