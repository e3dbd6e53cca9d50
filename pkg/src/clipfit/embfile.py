"""Binary embedding file format (magic ``OFCE``).

Layout, all little-endian:

    bytes 0-3   magic "OFCE"
    bytes 4-7   u32 format version (currently 1)
    bytes 8-11  u32 embedding dimension
    bytes 12-19 u64 record count
    records     u16 id byte length, UTF-8 id, dim * f32 components

Vectors are stored unit-normalized in 32-bit floats. On read, rows
whose norm deviates from 1 by at most 1e-6 are returned exactly as
stored (so write -> read -> write reproduces the file byte for byte);
deviations up to 1e-5 are renormalized; anything worse is rejected.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BadMagicError,
    CorruptRecordError,
    DimMismatchError,
    DuplicateIdError,
    MissingFieldError,
    NotFiniteError,
    NotNormalizedError,
    UnsupportedVersionError,
)

MAGIC = b"OFCE"
VERSION = 1
HEADER = struct.Struct("<4sIIQ")

KEEP_RAW_TOL = 1e-6
RENORM_TOL = 1e-5


@dataclass
class EmbeddingSet:
    """Parallel id list and (count, dim) float32 vector block."""

    ids: list[str]
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.ids)

    def index(self) -> dict[str, int]:
        return {eid: i for i, eid in enumerate(self.ids)}


def write_embeddings(path, ids, vectors) -> None:
    """Serialize unit vectors with their string ids."""
    vecs = np.asarray(vectors)
    if vecs.ndim != 2 or vecs.shape[0] != len(ids):
        raise DimMismatchError(
            f"need one id per vector row, got {len(ids)} ids and shape {vecs.shape}"
        )
    if vecs.shape[1] == 0:
        raise DimMismatchError("embedding dimension must be positive")
    if not np.all(np.isfinite(vecs)):
        raise NotFiniteError("vectors contain non-finite entries")
    norms = np.linalg.norm(vecs.astype(np.float64), axis=1)
    worst = float(np.abs(norms - 1.0).max()) if len(norms) else 0.0
    if worst > KEEP_RAW_TOL:
        raise NotNormalizedError(f"vector norm deviates from 1 by {worst:.3e}")

    seen: set[str] = set()
    payload = vecs.astype("<f4")
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, VERSION, vecs.shape[1], vecs.shape[0]))
        for row, eid in enumerate(ids):
            if not eid:
                raise MissingFieldError(f"record {row} has an empty id")
            if eid in seen:
                raise DuplicateIdError(f"duplicate embedding id {eid!r}")
            seen.add(eid)
            raw = eid.encode("utf-8")
            if len(raw) > 0xFFFF:
                raise MissingFieldError(f"id {eid[:32]!r}... exceeds 65535 bytes")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(payload[row].tobytes())


def _take(buf: bytes, offset: int, size: int, what: str) -> tuple[bytes, int]:
    end = offset + size
    if end > len(buf):
        raise CorruptRecordError(f"truncated {what} at byte {offset}")
    return buf[offset:end], end


def read_embeddings(path) -> EmbeddingSet:
    """Parse and validate an embedding file."""
    data = Path(path).read_bytes()
    if len(data) < HEADER.size:
        raise CorruptRecordError(f"file too short for header ({len(data)} bytes)")
    magic, version, dim, count = HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise BadMagicError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported embedding file version {version}")
    if dim == 0:
        raise CorruptRecordError("embedding dimension is zero")

    ids: list[str] = []
    seen: set[str] = set()
    rows = np.empty((count, dim), dtype=np.float32)
    offset = HEADER.size
    vec_bytes = 4 * dim
    for row in range(count):
        raw_len, offset = _take(data, offset, 2, f"id length of record {row}")
        (id_len,) = struct.unpack("<H", raw_len)
        raw_id, offset = _take(data, offset, id_len, f"id of record {row}")
        try:
            eid = raw_id.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorruptRecordError(f"record {row} id is not valid UTF-8") from exc
        if not eid:
            raise CorruptRecordError(f"record {row} has an empty id")
        if eid in seen:
            raise DuplicateIdError(f"duplicate embedding id {eid!r}")
        seen.add(eid)
        raw_vec, offset = _take(data, offset, vec_bytes, f"vector of record {row}")
        rows[row] = np.frombuffer(raw_vec, dtype="<f4")
        ids.append(eid)
    if offset != len(data):
        raise CorruptRecordError(f"{len(data) - offset} trailing bytes at byte {offset}")

    if count:
        if not np.all(np.isfinite(rows)):
            raise NotFiniteError("stored vectors contain non-finite entries")
        norms = np.linalg.norm(rows.astype(np.float64), axis=1)
        dev = np.abs(norms - 1.0)
        worst = float(dev.max())
        if worst > RENORM_TOL:
            raise NotNormalizedError(f"stored vector norm deviates from 1 by {worst:.3e}")
        fix = dev > KEEP_RAW_TOL
        if np.any(fix):
            rows[fix] = (rows[fix].astype(np.float64) / norms[fix, None]).astype(np.float32)
    return EmbeddingSet(ids=ids, vectors=rows)


def describe_embeddings(path) -> dict:
    """Header summary without materializing the records."""
    with open(path, "rb") as fh:
        head = fh.read(HEADER.size)
    if len(head) < HEADER.size:
        raise CorruptRecordError(f"file too short for header ({len(head)} bytes)")
    magic, version, dim, count = HEADER.unpack(head)
    if magic != MAGIC:
        raise BadMagicError(f"bad magic {magic!r}, expected {MAGIC!r}")
    return {"format": "embeddings", "version": version, "dim": dim, "count": count}
