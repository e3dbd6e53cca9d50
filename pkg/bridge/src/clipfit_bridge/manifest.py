"""Minimal JSONL manifest reader: the bridge needs record ids plus either
an image path (image exports) or a caption (text exports). Relative image
paths resolve against the manifest's directory."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import DuplicateIdError, ManifestError


@dataclass(frozen=True)
class Record:
    id: str
    caption: str | None
    image_path: Path | None


def load_manifest(path) -> list[Record]:
    path = Path(path)
    records: list[Record] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"{path}:{lineno}: invalid record: {exc}") from exc
            if not isinstance(obj, dict) or not obj.get("id"):
                raise ManifestError(f"{path}:{lineno}: record needs an id")
            rec_id = str(obj["id"])
            if rec_id in seen:
                raise DuplicateIdError(f"{path}:{lineno}: duplicate id {rec_id!r}")
            seen.add(rec_id)
            image_path = obj.get("image_path")
            if image_path is not None:
                p = Path(str(image_path))
                image_path = p if p.is_absolute() else path.parent / p
            caption = obj.get("caption")
            records.append(
                Record(
                    id=rec_id,
                    caption=str(caption) if caption is not None else None,
                    image_path=image_path,
                )
            )
    return records
