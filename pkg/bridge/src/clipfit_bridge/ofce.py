"""Writer/reader for the engine's binary embedding interchange format.

Layout (all little-endian): magic ``OFCE``, u32 version (=1), u32 dim,
u64 count header; then per record a u16 id byte length, the UTF-8 id,
and dim float32 components. Stored vectors must be unit-norm; the engine
re-validates on read, so this module normalizes nothing silently.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import DataError, DimMismatchError, DuplicateIdError, NotNormalizedError

MAGIC = b"OFCE"
VERSION = 1
HEADER = struct.Struct("<4sIIQ")
ID_LEN = struct.Struct("<H")
NORM_TOL = 1e-5


def write_embeddings(path, ids, vectors) -> None:
    path = Path(path)
    ids = [str(i) for i in ids]
    arr = np.asarray(vectors, dtype=np.float32)
    if arr.ndim != 2:
        raise DimMismatchError(f"vectors must be 2-D, got shape {arr.shape}")
    if arr.shape[0] != len(ids):
        raise DimMismatchError(f"{len(ids)} ids but {arr.shape[0]} vectors")
    if len(set(ids)) != len(ids):
        raise DuplicateIdError("embedding ids must be unique")
    norms = np.linalg.norm(arr.astype(np.float64), axis=1)
    bad = np.abs(norms - 1.0) > NORM_TOL
    if np.any(bad):
        worst = float(np.max(np.abs(norms - 1.0)))
        raise NotNormalizedError(
            f"{int(bad.sum())} vectors deviate from unit norm (worst {worst:.2e})"
        )
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, VERSION, arr.shape[1], arr.shape[0]))
        for rec_id, row in zip(ids, arr):
            raw = rec_id.encode("utf-8")
            if len(raw) > 0xFFFF:
                raise DataError(f"id too long: {rec_id[:32]!r}...")
            fh.write(ID_LEN.pack(len(raw)))
            fh.write(raw)
            fh.write(row.tobytes())


def read_embeddings(path) -> tuple[list[str], np.ndarray]:
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < HEADER.size:
        raise DataError(f"{path}: truncated header")
    magic, version, dim, count = HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise DataError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise DataError(f"{path}: unsupported version {version}")
    offset = HEADER.size
    ids: list[str] = []
    rows = np.empty((count, dim), dtype=np.float32)
    for i in range(count):
        if offset + ID_LEN.size > len(blob):
            raise DataError(f"{path}: truncated record at offset {offset}")
        (id_len,) = ID_LEN.unpack_from(blob, offset)
        end = offset + ID_LEN.size + id_len + 4 * dim
        if end > len(blob):
            raise DataError(f"{path}: truncated record at offset {offset}")
        ids.append(blob[offset + ID_LEN.size : offset + ID_LEN.size + id_len].decode("utf-8"))
        rows[i] = np.frombuffer(blob, dtype="<f4", count=dim, offset=offset + ID_LEN.size + id_len)
        offset = end
    if offset != len(blob):
        raise DataError(f"{path}: {len(blob) - offset} trailing bytes")
    if len(set(ids)) != len(ids):
        raise DuplicateIdError(f"{path}: duplicate record ids")
    return ids, rows
