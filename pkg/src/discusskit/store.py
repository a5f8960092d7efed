"""File-backed persistence: one JSON document per entity plus an index file.

Writes go to a temp file in the same directory and are renamed into place,
so a crash between any two operations leaves every document parseable and
the previous version intact.  Discussions are versioned: the uploaded
(gold) transcript is version 1 and every classification run appends a new
version, so gold analytics are never overwritten.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from pathlib import Path
from typing import Optional

from .model import Discussion, discussion_from_dict, discussion_to_dict

COLLECTIONS = ("discussions", "heads", "goals", "rules")


class DuplicateEntity(Exception):
    pass


class UnknownEntity(Exception):
    pass


def _atomic_write(path: Path, payload: dict) -> None:
    tmp = path.with_name(f".{path.name}.{uuid.uuid4().hex}.tmp")
    data = json.dumps(payload, indent=1).encode("utf-8")
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


class Store:
    def __init__(self, data_root: str | Path):
        self.root = Path(data_root)
        self._locks = {c: threading.Lock() for c in COLLECTIONS}
        for collection in COLLECTIONS:
            (self.root / collection).mkdir(parents=True, exist_ok=True)
            index = self._index_path(collection)
            if not index.exists():
                _atomic_write(index, {"ids": []})

    def _index_path(self, collection: str) -> Path:
        return self.root / collection / "index.json"

    def _entity_path(self, collection: str, entity_id: str) -> Path:
        safe = entity_id.replace("/", "_")
        return self.root / collection / f"{safe}.json"

    def list_ids(self, collection: str) -> list[str]:
        with open(self._index_path(collection), encoding="utf-8") as fh:
            return list(json.load(fh)["ids"])

    def exists(self, collection: str, entity_id: str) -> bool:
        return entity_id in self.list_ids(collection)

    def get(self, collection: str, entity_id: str) -> dict:
        if not self.exists(collection, entity_id):
            raise UnknownEntity(f"{collection}/{entity_id}")
        with open(self._entity_path(collection, entity_id), encoding="utf-8") as fh:
            return json.load(fh)

    def put(self, collection: str, entity_id: str, document: dict,
            *, overwrite: bool = True) -> None:
        """Write entity then index, each atomically; an id listed in the
        index therefore always resolves to a complete document."""
        with self._locks[collection]:
            ids = self.list_ids(collection)
            if entity_id in ids and not overwrite:
                raise DuplicateEntity(f"{collection}/{entity_id}")
            _atomic_write(self._entity_path(collection, entity_id), document)
            if entity_id not in ids:
                _atomic_write(self._index_path(collection), {"ids": ids + [entity_id]})

    def delete(self, collection: str, entity_id: str) -> None:
        with self._locks[collection]:
            ids = self.list_ids(collection)
            if entity_id not in ids:
                raise UnknownEntity(f"{collection}/{entity_id}")
            _atomic_write(self._index_path(collection),
                          {"ids": [i for i in ids if i != entity_id]})
            self._entity_path(collection, entity_id).unlink(missing_ok=True)

    # --- discussion helpers -------------------------------------------

    def add_discussion(self, d: Discussion) -> None:
        if self.exists("discussions", d.discussion_id):
            raise DuplicateEntity(f"discussions/{d.discussion_id}")
        self.put("discussions", d.discussion_id, {
            "discussion_id": d.discussion_id,
            "title": d.title,
            "recorded_at": d.recorded_at.isoformat() if d.recorded_at else None,
            "versions": [discussion_to_dict(d)],
        }, overwrite=False)

    def add_discussion_version(self, d: Discussion) -> int:
        """Append a classified copy as a new version; returns the version number."""
        doc = self.get("discussions", d.discussion_id)
        doc["versions"].append(discussion_to_dict(d))
        self.put("discussions", d.discussion_id, doc)
        return len(doc["versions"])

    def load_discussion(self, discussion_id: str,
                        version: Optional[int] = None) -> Discussion:
        doc = self.get("discussions", discussion_id)
        versions = doc["versions"]
        if version is None:
            version = len(versions)
        if not (1 <= version <= len(versions)):
            raise UnknownEntity(f"discussions/{discussion_id} version {version}")
        return discussion_from_dict(versions[version - 1])

    def discussion_meta(self, discussion_id: str) -> dict:
        doc = self.get("discussions", discussion_id)
        latest = doc["versions"][-1]
        return {
            "discussion_id": doc["discussion_id"],
            "title": doc["title"],
            "recorded_at": doc.get("recorded_at"),
            "versions": len(doc["versions"]),
            "provenance": latest["provenance"],
        }
