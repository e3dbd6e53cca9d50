"""Dataset manifests and the multi-source registry.

A manifest is UTF-8 JSON Lines: each line a flat object with `id`,
`caption`, exactly one of `image_path` / `features_path`, optional
`labels` (list of strings) and optional `split`. A registry is JSON
Lines with `source_id`, `manifest_path`, and a `preprocess` flag
("chunks" or "none") per source. Relative paths resolve against the
file that mentions them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DataError,
    DuplicateIdError,
    MissingFieldError,
    NotFiniteError,
    ParseError,
)
from .imageops import PixelImage, read_netpbm

PREPROCESS_MODES = ("chunks", "none")


@dataclass
class ImageTextPair:
    """One training/evaluation sample: caption plus image or features."""

    id: str
    source_id: str
    caption: str
    image_path: Path | None = None
    features_path: Path | None = None
    features: np.ndarray | None = None  # in-memory feature vector
    image: PixelImage | None = None  # in-memory raw pixels
    labels: tuple[str, ...] | None = None
    split: str | None = None


@dataclass
class DatasetManifest:
    source_id: str
    records: list[ImageTextPair]
    preprocess: str = "chunks"
    path: Path | None = None

    def __post_init__(self) -> None:
        if not self.source_id:
            raise DataError("source_id must be nonempty")
        if self.preprocess not in PREPROCESS_MODES:
            raise DataError(f"unknown preprocess mode {self.preprocess!r}")


def _require(obj: dict, key: str, path, lineno: int) -> object:
    value = obj.get(key)
    if value is None or (isinstance(value, str) and not value.strip()):
        raise MissingFieldError(f"{path}:{lineno}: missing field {key!r}")
    return value


def load_manifest(path, source_id: str | None = None, preprocess: str = "chunks") -> DatasetManifest:
    """Parse and validate a JSONL manifest; duplicate ids are rejected."""
    path = Path(path)
    sid = source_id if source_id is not None else path.stem
    records: list[ImageTextPair] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: invalid record: {exc}") from exc
            if not isinstance(obj, dict):
                raise ParseError(f"{path}:{lineno}: record must be an object")

            rec_id = str(_require(obj, "id", path, lineno))
            caption = str(_require(obj, "caption", path, lineno))
            if rec_id in seen:
                raise DuplicateIdError(f"{path}:{lineno}: duplicate id {rec_id!r}")
            seen.add(rec_id)

            image_path = obj.get("image_path")
            features_path = obj.get("features_path")
            if image_path is None and features_path is None:
                raise MissingFieldError(
                    f"{path}:{lineno}: record needs image_path or features_path"
                )
            if image_path is not None and features_path is not None:
                raise ParseError(
                    f"{path}:{lineno}: record has both image_path and features_path"
                )

            labels = obj.get("labels")
            if labels is not None:
                if not isinstance(labels, list) or not all(
                    isinstance(x, str) for x in labels
                ):
                    raise ParseError(f"{path}:{lineno}: labels must be a string list")
                labels = tuple(labels)

            records.append(
                ImageTextPair(
                    id=rec_id,
                    source_id=sid,
                    caption=caption,
                    image_path=_resolve(path, image_path),
                    features_path=_resolve(path, features_path),
                    labels=labels,
                    split=obj.get("split"),
                )
            )
    return DatasetManifest(source_id=sid, records=records, preprocess=preprocess, path=path)


def _resolve(base: Path, rel: str | None) -> Path | None:
    if rel is None:
        return None
    p = Path(rel)
    return p if p.is_absolute() else (base.parent / p)


def load_registry(path) -> list[DatasetManifest]:
    """Load every source listed in a registry file, in file order."""
    path = Path(path)
    manifests: list[DatasetManifest] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: invalid entry: {exc}") from exc
            sid = str(_require(obj, "source_id", path, lineno))
            mpath = _resolve(path, str(_require(obj, "manifest_path", path, lineno)))
            preprocess = obj.get("preprocess", "chunks")
            if preprocess not in PREPROCESS_MODES:
                raise ParseError(f"{path}:{lineno}: bad preprocess {preprocess!r}")
            if sid in seen:
                raise DuplicateIdError(f"{path}:{lineno}: duplicate source {sid!r}")
            seen.add(sid)
            manifests.append(load_manifest(mpath, source_id=sid, preprocess=preprocess))
    return manifests


def write_manifest(path, records: list[ImageTextPair]) -> None:
    """Serialize records back to JSONL (paths as given, one line each)."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            obj: dict = {"id": rec.id, "caption": rec.caption}
            if rec.image_path is not None:
                obj["image_path"] = str(rec.image_path)
            if rec.features_path is not None:
                obj["features_path"] = str(rec.features_path)
            if rec.labels is not None:
                obj["labels"] = list(rec.labels)
            if rec.split is not None:
                obj["split"] = rec.split
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def load_features(pair: ImageTextPair) -> np.ndarray:
    """Materialize the feature vector for a record.

    In-memory features win; otherwise features_path must point to a JSON
    array of numbers, or image pixels (in-memory or netpbm file) are
    flattened to [0, 1] floats.
    """
    if pair.features is not None:
        return np.asarray(pair.features, dtype=np.float64)
    if pair.features_path is not None:
        with open(pair.features_path, encoding="utf-8") as fh:
            try:
                values = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{pair.features_path}: invalid features: {exc}") from exc
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise DataError(f"{pair.features_path}: features must be a flat list")
        if not np.all(np.isfinite(arr)):
            raise NotFiniteError(f"{pair.features_path}: non-finite feature values")
        return arr
    image = pair.image
    if image is None and pair.image_path is not None:
        image = read_netpbm(pair.image_path)
    if image is None:
        raise DataError(f"record {pair.id!r} carries no features or image")
    return image.pixels.astype(np.float64).ravel() / 255.0
