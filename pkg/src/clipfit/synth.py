"""Synthetic garment dataset for demos and convergence checks.

Each pair couples a caption "a {color} {material} {garment}" with a
feature vector derived from the triple's bag-of-words through a fixed
random linear map plus small noise. Records carry the garment as a
class label and the color/material as attributes, and split across
three unevenly sized sources.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import json

import numpy as np

from .errors import ConfigError
from .manifest import DatasetManifest, ImageTextPair, write_manifest
from .rng import derive_seed, uniform_block

COLORS = ("red", "blue", "green", "black", "white", "yellow", "purple", "orange")
MATERIALS = ("cotton", "silk", "wool", "denim", "leather", "linen", "velvet", "suede")
GARMENTS = ("dress", "jacket", "skirt", "coat", "sweater", "shirt", "blouse", "scarf")

SOURCE_NAMES = ("web", "catalog", "studio")
SOURCE_WEIGHTS = (3, 2, 1)  # sizes split 3:2:1 across the sources

_MAP_SALT = 101
_NOISE_SALT = 202


@dataclass
class ToyData:
    manifests: list[DatasetManifest]
    class_labels: tuple[str, ...]  # garments
    attribute_labels: tuple[str, ...]  # colors then materials
    class_truths: list[int]  # per pair, garment index
    attribute_truths: list[list[int]]  # per pair, {color, material} indices
    feature_dim: int

    @property
    def pairs(self) -> list[ImageTextPair]:
        return [p for m in self.manifests for p in m.records]


def _triples(n_pairs: int) -> list[tuple[int, int, int]]:
    """Distinct (color, material, garment) index triples, all sets covered."""
    out = []
    for i in range(n_pairs):
        color = i % len(COLORS)
        material = (i // len(COLORS)) % len(MATERIALS)
        cycle = i // (len(COLORS) * len(MATERIALS))
        garment = (color + material + 3 * cycle) % len(GARMENTS)
        out.append((color, material, garment))
    return out


def toy_dataset(
    seed: int = 0,
    n_pairs: int = 192,
    feature_dim: int = 16,
    noise: float = 0.05,
) -> ToyData:
    """Build the in-memory dataset; deterministic in (seed, sizes, noise)."""
    max_unique = len(COLORS) * len(MATERIALS) * 3
    if not 1 <= n_pairs <= max_unique:
        raise ConfigError(f"n_pairs must be in [1, {max_unique}], got {n_pairs}")
    if feature_dim < 1:
        raise ConfigError(f"feature_dim must be positive, got {feature_dim}")

    vocab = len(COLORS) + len(MATERIALS) + len(GARMENTS)
    mixing = (
        uniform_block(derive_seed(seed, _MAP_SALT), vocab * feature_dim) * 2.0 - 1.0
    ).reshape(vocab, feature_dim)
    noise_block = (
        uniform_block(derive_seed(seed, _NOISE_SALT), n_pairs * feature_dim) - 0.5
    ).reshape(n_pairs, feature_dim) * noise

    pairs: list[ImageTextPair] = []
    class_truths: list[int] = []
    attribute_truths: list[list[int]] = []
    for i, (ci, mi, gi) in enumerate(_triples(n_pairs)):
        bag = np.zeros(vocab)
        bag[ci] = 1.0
        bag[len(COLORS) + mi] = 1.0
        bag[len(COLORS) + len(MATERIALS) + gi] = 1.0
        features = bag @ mixing + noise_block[i]
        caption = f"a {COLORS[ci]} {MATERIALS[mi]} {GARMENTS[gi]}"
        pairs.append(
            ImageTextPair(
                id=f"pair-{i:04d}",
                source_id="",  # patched below once the source is known
                caption=caption,
                features=features,
                labels=(GARMENTS[gi], COLORS[ci], MATERIALS[mi]),
            )
        )
        class_truths.append(gi)
        attribute_truths.append([ci, len(COLORS) + mi])

    total_weight = sum(SOURCE_WEIGHTS)
    cuts = []
    start = 0
    for w in SOURCE_WEIGHTS[:-1]:
        start += n_pairs * w // total_weight
        cuts.append(start)
    bounds = [0, *cuts, n_pairs]
    manifests = []
    for s, name in enumerate(SOURCE_NAMES):
        chunk = pairs[bounds[s] : bounds[s + 1]]
        for p in chunk:
            p.source_id = name
        manifests.append(DatasetManifest(source_id=name, records=chunk, preprocess="chunks"))

    return ToyData(
        manifests=manifests,
        class_labels=GARMENTS,
        attribute_labels=COLORS + MATERIALS,
        class_truths=class_truths,
        attribute_truths=attribute_truths,
        feature_dim=feature_dim,
    )


def write_toy_dataset(out_dir, seed: int = 0, n_pairs: int = 192, feature_dim: int = 16, noise: float = 0.05) -> Path:
    """Materialize the toy dataset on disk; returns the registry path.

    Layout: one JSON feature file per pair under features/, one manifest
    per source, a registry listing the sources, plus label files for the
    evaluation commands.
    """
    data = toy_dataset(seed=seed, n_pairs=n_pairs, feature_dim=feature_dim, noise=noise)
    out_dir = Path(out_dir)
    feat_dir = out_dir / "features"
    feat_dir.mkdir(parents=True, exist_ok=True)

    registry_lines = []
    for manifest in data.manifests:
        disk_records = []
        for pair in manifest.records:
            feat_path = feat_dir / f"{pair.id}.json"
            feat_path.write_text(
                json.dumps([float(x) for x in pair.features]), encoding="utf-8"
            )
            disk_records.append(
                ImageTextPair(
                    id=pair.id,
                    source_id=pair.source_id,
                    caption=pair.caption,
                    features_path=Path("features") / feat_path.name,
                    labels=pair.labels,
                )
            )
        manifest_path = out_dir / f"{manifest.source_id}.jsonl"
        write_manifest(manifest_path, disk_records)
        registry_lines.append(
            json.dumps(
                {
                    "source_id": manifest.source_id,
                    "manifest_path": manifest_path.name,
                    "preprocess": manifest.preprocess,
                }
            )
        )

    registry_path = out_dir / "registry.jsonl"
    registry_path.write_text("\n".join(registry_lines) + "\n", encoding="utf-8")
    (out_dir / "classes.txt").write_text("\n".join(data.class_labels) + "\n", encoding="utf-8")
    (out_dir / "attributes.txt").write_text(
        "\n".join(data.attribute_labels) + "\n", encoding="utf-8"
    )
    return registry_path
