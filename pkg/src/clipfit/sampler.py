"""Multi-source stratified batching.

Every batch draws from all sources still holding samples, with per-source
quotas proportional to how many samples each source has left (largest
remainder rounding, minimum one sample per nonempty source). Within a
source, order is a seeded shuffle that changes each epoch. The epoch's
final batch may be smaller than requested; every sample appears exactly
once per epoch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import BatchTooSmallError, DataError
from .manifest import DatasetManifest, ImageTextPair
from .rng import SplitMix64, derive_seed


@dataclass
class Batch:
    """One training batch: records plus the epoch/step that produced it."""

    pairs: list[ImageTextPair]
    epoch: int
    step: int

    def __len__(self) -> int:
        return len(self.pairs)


def apportion(remaining: Sequence[int], batch_size: int) -> list[int]:
    """Split a batch across sources proportionally to remaining counts.

    Uses largest-remainder rounding on quotas ``batch_size * r_i / total``,
    then lifts any zero allocation to one by shaving the largest one.
    Sources with nothing left get zero. When fewer than ``batch_size``
    samples remain overall, everything left is allocated.
    """
    if batch_size <= 0:
        raise DataError("batch size must be positive")
    remaining = list(remaining)
    if any(r < 0 for r in remaining):
        raise DataError("remaining counts must be nonnegative")
    total = sum(remaining)
    if total == 0:
        return [0] * len(remaining)
    if total <= batch_size:
        return remaining

    active = [i for i, r in enumerate(remaining) if r > 0]
    if len(active) > batch_size:
        raise BatchTooSmallError(
            f"batch size {batch_size} cannot cover {len(active)} active sources"
        )

    quotas = {i: batch_size * remaining[i] / total for i in active}
    alloc = [0] * len(remaining)
    for i in active:
        alloc[i] = math.floor(quotas[i])
    leftover = batch_size - sum(alloc)
    # Hand the leftover units to the largest fractional parts; ties go to
    # the lower source index. Never push a source past its remaining count.
    by_fraction = sorted(active, key=lambda i: (-(quotas[i] - alloc[i]), i))
    pos = 0
    while leftover > 0:
        i = by_fraction[pos % len(by_fraction)]
        if alloc[i] < remaining[i]:
            alloc[i] += 1
            leftover -= 1
        pos += 1

    # Guarantee every active source appears at least once.
    for i in active:
        if alloc[i] == 0:
            donor = max(
                (j for j in active if alloc[j] > 1),
                key=lambda j: (alloc[j], -j),
                default=None,
            )
            if donor is None:
                raise BatchTooSmallError(
                    f"batch size {batch_size} cannot cover all active sources"
                )
            alloc[donor] -= 1
            alloc[i] = 1
    return alloc


def epoch_order(manifest: DatasetManifest, seed: int, epoch: int, source_index: int) -> list[int]:
    """Deterministic per-epoch shuffle of a source's record indices."""
    order = list(range(len(manifest.records)))
    rng = SplitMix64(derive_seed(seed, epoch, source_index))
    rng.shuffle(order)
    return order


def batch_stream(
    manifests: Sequence[DatasetManifest],
    batch_size: int,
    seed: int,
    epochs: int,
    start_epoch: int = 0,
) -> Iterator[Batch]:
    """Yield stratified batches for the given number of epochs."""
    if not manifests:
        raise DataError("no data sources")
    if any(not m.records for m in manifests):
        empty = next(m.source_id for m in manifests if not m.records)
        raise DataError(f"source {empty!r} has no records")
    step = 0
    for epoch in range(start_epoch, start_epoch + epochs):
        orders = [epoch_order(m, seed, epoch, i) for i, m in enumerate(manifests)]
        cursors = [0] * len(manifests)
        while True:
            remaining = [len(o) - c for o, c in zip(orders, cursors)]
            if sum(remaining) == 0:
                break
            alloc = apportion(remaining, batch_size)
            pairs: list[ImageTextPair] = []
            for i, take in enumerate(alloc):
                rows = orders[i][cursors[i] : cursors[i] + take]
                cursors[i] += take
                pairs.extend(manifests[i].records[r] for r in rows)
            yield Batch(pairs=pairs, epoch=epoch, step=step)
            step += 1
