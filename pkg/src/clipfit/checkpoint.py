"""Binary checkpoint format for encoder weights (magic ``OFCK``).

Layout, all little-endian:

    bytes 0-3  magic "OFCK"
    bytes 4-7  u32 format version (currently 1)
    tensors    until end of file, each:
                   u16 name byte length, UTF-8 name,
                   u8 rank, rank * u32 dims,
                   prod(dims) * f64 values (row-major)

A scalar tensor has rank 0 and a single value. Checkpoints carry the
encoder tensors w_img, b_img, e_tok, w_txt, b_txt, and log_scale, in
that order; readers accept any order and ignore unknown extras.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .encoder import PARAM_ORDER, DualEncoder
from .errors import (
    BadMagicError,
    CorruptRecordError,
    DuplicateIdError,
    MissingFieldError,
    NotFiniteError,
    UnsupportedVersionError,
)

MAGIC = b"OFCK"
VERSION = 1
HEADER = struct.Struct("<4sI")

MAX_RANK = 8


def write_tensors(path, tensors) -> None:
    """Serialize named float64 tensors in the mapping's iteration order."""
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, VERSION))
        for name, tensor in tensors.items():
            arr = np.asarray(tensor, dtype=np.float64)
            if not name:
                raise MissingFieldError("tensor name must be nonempty")
            raw = name.encode("utf-8")
            if len(raw) > 0xFFFF:
                raise MissingFieldError(f"tensor name {name[:32]!r}... exceeds 65535 bytes")
            if arr.ndim > MAX_RANK:
                raise CorruptRecordError(f"tensor {name!r} rank {arr.ndim} exceeds {MAX_RANK}")
            if not np.all(np.isfinite(arr)):
                raise NotFiniteError(f"tensor {name!r} contains non-finite entries")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(struct.pack("<B", arr.ndim))
            for d in arr.shape:
                fh.write(struct.pack("<I", d))
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def _take(buf: bytes, offset: int, size: int, what: str) -> tuple[bytes, int]:
    end = offset + size
    if end > len(buf):
        raise CorruptRecordError(f"truncated {what} at byte {offset}")
    return buf[offset:end], end


def read_tensors(path) -> dict[str, np.ndarray]:
    """Parse every named tensor from a checkpoint file."""
    data = Path(path).read_bytes()
    if len(data) < HEADER.size:
        raise CorruptRecordError(f"file too short for header ({len(data)} bytes)")
    magic, version = HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise BadMagicError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported checkpoint version {version}")

    tensors: dict[str, np.ndarray] = {}
    offset = HEADER.size
    while offset < len(data):
        raw_len, offset = _take(data, offset, 2, "tensor name length")
        (name_len,) = struct.unpack("<H", raw_len)
        raw_name, offset = _take(data, offset, name_len, "tensor name")
        try:
            name = raw_name.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorruptRecordError(f"tensor name at byte {offset - name_len} is not UTF-8") from exc
        if not name:
            raise CorruptRecordError(f"empty tensor name at byte {offset - name_len}")
        if name in tensors:
            raise DuplicateIdError(f"duplicate tensor name {name!r}")
        raw_rank, offset = _take(data, offset, 1, f"rank of tensor {name!r}")
        rank = raw_rank[0]
        if rank > MAX_RANK:
            raise CorruptRecordError(f"tensor {name!r} rank {rank} exceeds {MAX_RANK}")
        dims: list[int] = []
        for axis in range(rank):
            raw_dim, offset = _take(data, offset, 4, f"dim {axis} of tensor {name!r}")
            dims.append(struct.unpack("<I", raw_dim)[0])
        size = 1
        for d in dims:
            size *= d
        raw_vals, offset = _take(data, offset, 8 * size, f"values of tensor {name!r}")
        tensors[name] = np.frombuffer(raw_vals, dtype="<f8").reshape(dims).copy()
    return tensors


def write_checkpoint(path, encoder: DualEncoder) -> None:
    """Store the encoder's parameter tensors in their canonical order."""
    write_tensors(path, encoder.params())


def read_checkpoint(path) -> DualEncoder:
    """Rebuild an encoder from a checkpoint; extra tensors are ignored."""
    tensors = read_tensors(path)
    missing = [n for n in PARAM_ORDER if n not in tensors]
    if missing:
        raise CorruptRecordError(f"checkpoint lacks tensors: {missing}")
    if not np.all(np.isfinite(np.concatenate([tensors[n].ravel() for n in PARAM_ORDER]))):
        raise NotFiniteError("checkpoint contains non-finite values")
    return DualEncoder.from_params(tensors)


def describe_checkpoint(path) -> dict:
    """Version plus (name, shape) for every stored tensor."""
    tensors = read_tensors(path)
    return {
        "format": "checkpoint",
        "version": VERSION,
        "tensors": [{"name": n, "shape": list(t.shape)} for n, t in tensors.items()],
    }
