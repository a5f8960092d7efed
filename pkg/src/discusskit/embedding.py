"""Text-to-vector backends and average pooling.

Two backends ship: ``ExternalBackend`` talks to an HTTP inference endpoint
serving per-token vectors from a pretrained transformer, and
``DeterministicBackend`` is a hermetic test backend that maps each
whitespace token of the lowercased text to a pseudo-random vector keyed by
a stable 64-bit hash of the token.  Both are deterministic for a given
input, which keeps the whole classification pipeline reproducible.
"""

from __future__ import annotations

import hashlib
import threading
from typing import Protocol

import numpy as np
import requests

from .model import Adu, Turn

DEFAULT_DIMENSION = 768
DEFAULT_MODEL_ID = "bert-base-uncased"


class EmptyText(Exception):
    pass


class DimensionMismatch(Exception):
    pass


class BackendUnavailable(Exception):
    pass


class EmbeddingBackend(Protocol):
    name: str
    dimension: int

    def embed_tokens(self, text: str) -> list[np.ndarray]: ...


class DeterministicBackend:
    """Hermetic backend: one vector per whitespace token of the lowercased text.

    Each token's vector comes from a PCG64 generator seeded with the first
    8 bytes of the token's blake2b digest, components uniform in [-1, 1],
    so identical tokens embed identically across runs and platforms.
    """

    def __init__(self, dimension: int = DEFAULT_DIMENSION):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        self.name = f"deterministic-{dimension}"
        self.dimension = dimension

    def embed_tokens(self, text: str) -> list[np.ndarray]:
        tokens = text.lower().split()
        if not tokens:
            raise EmptyText("text tokenizes to zero tokens")
        return [self._token_vector(tok) for tok in tokens]

    def _token_vector(self, token: str) -> np.ndarray:
        key = int.from_bytes(
            hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest(), "big")
        rng = np.random.default_rng(key)
        return rng.uniform(-1.0, 1.0, self.dimension)


class ExternalBackend:
    """HTTP inference endpoint returning per-token vectors.

    Wire contract: POST {"texts": [str, ...]} to the configured URL;
    response {"dimension": int, "embeddings": [[[f64 x d] per token] per text]}.
    """

    def __init__(self, url: str, dimension: int = DEFAULT_DIMENSION,
                 model_id: str = DEFAULT_MODEL_ID, timeout: float = 60.0):
        self.url = url
        self.name = f"external-{model_id}"
        self.dimension = dimension
        self.model_id = model_id
        self.timeout = timeout

    def embed_tokens(self, text: str) -> list[np.ndarray]:
        if not text.strip():
            raise EmptyText("text is empty")
        try:
            resp = requests.post(
                self.url, json={"texts": [text], "model": self.model_id},
                timeout=self.timeout)
            resp.raise_for_status()
            payload = resp.json()
        except (requests.RequestException, ValueError) as exc:
            raise BackendUnavailable(f"embedding endpoint {self.url}: {exc}") from exc
        try:
            dim = int(payload["dimension"])
            token_vectors = payload["embeddings"][0]
        except (KeyError, IndexError, TypeError) as exc:
            raise BackendUnavailable(f"malformed response from {self.url}: {exc}") from exc
        if dim != self.dimension:
            raise DimensionMismatch(
                f"endpoint reports dimension {dim}, configured {self.dimension}")
        if not token_vectors:
            raise EmptyText("endpoint returned zero tokens")
        vectors = [np.asarray(v, dtype=float) for v in token_vectors]
        for v in vectors:
            if v.shape != (self.dimension,):
                raise DimensionMismatch(f"token vector has shape {v.shape}")
        return vectors


class CachingBackend:
    """Per-job memoization keyed by (backend name, text); thread-safe."""

    def __init__(self, inner: EmbeddingBackend):
        self.inner = inner
        self.name = inner.name
        self.dimension = inner.dimension
        self._cache: dict[tuple[str, str], list[np.ndarray]] = {}
        self._lock = threading.Lock()

    def embed_tokens(self, text: str) -> list[np.ndarray]:
        key = (self.name, text)
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        vectors = self.inner.embed_tokens(text)
        with self._lock:
            self._cache[key] = vectors
        return vectors


def embed_tokens(backend: EmbeddingBackend, text: str) -> list[np.ndarray]:
    """Per-token vectors for the text; tokenization is the backend's business."""
    if not text.strip():
        raise EmptyText("text is empty after trimming")
    return backend.embed_tokens(text)


def pool_average(tokens: list[np.ndarray]) -> np.ndarray:
    """Component-wise arithmetic mean of the token vectors."""
    if not tokens:
        raise EmptyText("cannot pool an empty token list")
    dim = tokens[0].shape[0]
    for v in tokens[1:]:
        if v.shape[0] != dim:
            raise DimensionMismatch(f"ragged token vectors: {v.shape[0]} != {dim}")
    return np.mean(np.stack(tokens), axis=0)


def embed_adu(backend: EmbeddingBackend, adu: Adu) -> np.ndarray:
    return pool_average(embed_tokens(backend, adu.text))


def embed_turn(backend: EmbeddingBackend, turn: Turn) -> np.ndarray:
    """Pooled embedding of the turn's full text (ADU texts joined by a space)."""
    return pool_average(embed_tokens(backend, turn.text))
