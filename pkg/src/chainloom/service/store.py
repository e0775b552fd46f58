"""Filesystem persistence for templates and content-addressed images.

One canonical JSON file per template plus a sidecar with timestamps; writes
go to a temp file in the same directory and are renamed into place so a
record is always either the old or the new version, never a torn write.
"""

from __future__ import annotations

import json
import os
import secrets
import tempfile
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from ..model import Template
from ..template_io import parse_template, serialize_template


@dataclass
class TemplateRecord:
    template_id: str
    template: Template
    created_at: float
    updated_at: float


def _atomic_write(path: Path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


class TemplateStore:
    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _template_path(self, template_id: str) -> Path:
        return self.root / f"{template_id}.json"

    def _meta_path(self, template_id: str) -> Path:
        return self.root / f"{template_id}.meta.json"

    def save(self, template: Template) -> TemplateRecord:
        with self._lock:
            template_id = secrets.token_urlsafe(9)
            while self._template_path(template_id).exists():
                template_id = secrets.token_urlsafe(9)
            now = time.time()
            _atomic_write(self._template_path(template_id),
                          serialize_template(template).encode("utf-8"))
            _atomic_write(self._meta_path(template_id),
                          json.dumps({"created_at": now, "updated_at": now}).encode())
        return TemplateRecord(template_id, template, now, now)

    def get(self, template_id: str) -> TemplateRecord | None:
        path = self._template_path(template_id)
        if not path.exists() or template_id.endswith(".meta"):
            return None
        template = parse_template(path.read_text("utf-8"))
        meta = json.loads(self._meta_path(template_id).read_text("utf-8"))
        return TemplateRecord(template_id, template,
                              meta["created_at"], meta["updated_at"])

    def list(self) -> list[TemplateRecord]:
        records = []
        for path in self.root.glob("*.json"):
            if path.name.endswith(".meta.json"):
                continue
            record = self.get(path.stem)
            if record is not None:
                records.append(record)
        records.sort(key=lambda r: r.updated_at, reverse=True)
        return records


class ImageStore:
    """Content-addressed blob store: identical ids never duplicate storage."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def put(self, image_id: str, data: bytes, media_type: str) -> None:
        blob = self.root / f"{image_id}.bin"
        if blob.exists():
            return
        _atomic_write(self.root / f"{image_id}.meta.json",
                      json.dumps({"media_type": media_type}).encode())
        _atomic_write(blob, data)

    def get(self, image_id: str) -> tuple[bytes, str] | None:
        blob = self.root / f"{image_id}.bin"
        if not blob.exists():
            return None
        meta = json.loads((self.root / f"{image_id}.meta.json").read_text("utf-8"))
        return blob.read_bytes(), meta["media_type"]
