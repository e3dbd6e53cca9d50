import struct

import numpy as np
import pytest

from clipfit import checkpoint as ckpt
from clipfit import embfile
from clipfit.encoder import init_encoder
from clipfit.errors import (
    BadMagicError,
    CorruptRecordError,
    DimMismatchError,
    DuplicateIdError,
    MissingFieldError,
    NotFiniteError,
    NotNormalizedError,
    UnsupportedVersionError,
)
from clipfit.linalg import l2_normalize_rows


def _unit(rng, n, d):
    return l2_normalize_rows(rng.normal(size=(n, d)))


# --- embedding files -------------------------------------------------------


def test_header_is_twenty_bytes(tmp_path):
    p = tmp_path / "e.bin"
    embfile.write_embeddings(p, [], np.zeros((0, 4)))
    assert p.stat().st_size == 20


def test_single_record_layout(tmp_path):
    p = tmp_path / "e.bin"
    vec = np.array([[0.6, 0.8]])
    embfile.write_embeddings(p, ["a"], vec)
    raw = p.read_bytes()
    # 20 header + 2 id-length + 1 id byte + 2*4 floats = 31 bytes.
    assert len(raw) == 31
    assert raw[:4] == b"OFCE"
    version, dim, count = struct.unpack_from("<IIQ", raw, 4)
    assert (version, dim, count) == (1, 2, 1)
    (id_len,) = struct.unpack_from("<H", raw, 20)
    assert id_len == 1
    assert raw[22:23] == b"a"
    floats = np.frombuffer(raw[23:], dtype="<f4")
    assert np.allclose(floats, [0.6, 0.8], atol=1e-7)


def test_round_trip_preserves_ids_and_values(tmp_path):
    rng = np.random.default_rng(0)
    vecs = _unit(rng, 25, 12)
    ids = [f"item-{i:03d}" for i in range(25)]
    p = tmp_path / "e.bin"
    embfile.write_embeddings(p, ids, vecs)
    back = embfile.read_embeddings(p)
    assert back.ids == ids
    assert back.dim == 12
    assert np.max(np.abs(back.vectors.astype(np.float64) - vecs)) < 2.0**-20


def test_unicode_ids_round_trip(tmp_path):
    p = tmp_path / "e.bin"
    ids = ["robe-d'été", "пальто", "外套"]
    vecs = _unit(np.random.default_rng(1), 3, 5)
    embfile.write_embeddings(p, ids, vecs)
    assert embfile.read_embeddings(p).ids == ids


def test_reserialization_is_byte_identical(tmp_path):
    rng = np.random.default_rng(2)
    vecs = _unit(rng, 40, 9)
    ids = [f"r{i}" for i in range(40)]
    p1 = tmp_path / "a.bin"
    p2 = tmp_path / "b.bin"
    embfile.write_embeddings(p1, ids, vecs)
    back = embfile.read_embeddings(p1)
    embfile.write_embeddings(p2, back.ids, back.vectors)
    assert p1.read_bytes() == p2.read_bytes()


def test_write_rejects_bad_input(tmp_path):
    p = tmp_path / "e.bin"
    with pytest.raises(DimMismatchError):
        embfile.write_embeddings(p, ["a"], np.ones((2, 3)) / np.sqrt(3))
    with pytest.raises(NotNormalizedError):
        embfile.write_embeddings(p, ["a"], np.array([[1.0, 1.0]]))
    with pytest.raises(NotFiniteError):
        embfile.write_embeddings(p, ["a"], np.array([[np.nan, 0.0]]))
    with pytest.raises(DuplicateIdError):
        embfile.write_embeddings(p, ["a", "a"], np.eye(2))
    with pytest.raises(MissingFieldError):
        embfile.write_embeddings(p, [""], np.array([[1.0, 0.0]]))


def test_read_rejects_bad_magic(tmp_path):
    p = tmp_path / "e.bin"
    p.write_bytes(b"NOPE" + bytes(16))
    with pytest.raises(BadMagicError):
        embfile.read_embeddings(p)


def test_read_rejects_bad_version(tmp_path):
    p = tmp_path / "e.bin"
    p.write_bytes(embfile.HEADER.pack(b"OFCE", 9, 4, 0))
    with pytest.raises(UnsupportedVersionError):
        embfile.read_embeddings(p)


def test_read_rejects_truncation_with_offset(tmp_path):
    p = tmp_path / "e.bin"
    embfile.write_embeddings(p, ["ab"], np.array([[1.0, 0.0]]))
    whole = p.read_bytes()
    p.write_bytes(whole[:-3])
    with pytest.raises(CorruptRecordError) as err:
        embfile.read_embeddings(p)
    assert "byte" in str(err.value)


def test_read_rejects_trailing_garbage(tmp_path):
    p = tmp_path / "e.bin"
    embfile.write_embeddings(p, ["a"], np.array([[1.0, 0.0]]))
    p.write_bytes(p.read_bytes() + b"xx")
    with pytest.raises(CorruptRecordError):
        embfile.read_embeddings(p)


def test_read_renormalizes_mild_drift(tmp_path):
    p = tmp_path / "e.bin"
    v = np.array([[1.0, 0.0, 0.0]]) * (1.0 + 5e-6)
    payload = embfile.HEADER.pack(b"OFCE", 1, 3, 1) + struct.pack("<H", 1) + b"a"
    payload += v.astype("<f4").tobytes()
    p.write_bytes(payload)
    back = embfile.read_embeddings(p)
    assert abs(np.linalg.norm(back.vectors[0].astype(np.float64)) - 1.0) < 1e-6


def test_read_rejects_gross_norm_drift(tmp_path):
    p = tmp_path / "e.bin"
    payload = embfile.HEADER.pack(b"OFCE", 1, 2, 1) + struct.pack("<H", 1) + b"a"
    payload += np.array([[2.0, 0.0]], dtype="<f4").tobytes()
    p.write_bytes(payload)
    with pytest.raises(NotNormalizedError):
        embfile.read_embeddings(p)


def test_describe_embeddings(tmp_path):
    p = tmp_path / "e.bin"
    embfile.write_embeddings(p, ["a", "b"], np.eye(2))
    info = embfile.describe_embeddings(p)
    assert info == {"format": "embeddings", "version": 1, "dim": 2, "count": 2}


# --- checkpoints -----------------------------------------------------------


def test_checkpoint_round_trip_is_exact(tmp_path):
    enc = init_encoder(6, 4, vocab_size=30, token_dim=5, seed=3)
    p = tmp_path / "m.ck"
    ckpt.write_checkpoint(p, enc)
    back = ckpt.read_checkpoint(p)
    for name, tensor in enc.params().items():
        assert np.array_equal(tensor, getattr(back, name)), name
    assert back.log_scale.shape == ()


def test_checkpoint_magic_and_tensor_order(tmp_path):
    enc = init_encoder(3, 2, vocab_size=10, token_dim=2, seed=0)
    p = tmp_path / "m.ck"
    ckpt.write_checkpoint(p, enc)
    raw = p.read_bytes()
    assert raw[:4] == b"OFCK"
    (version,) = struct.unpack_from("<I", raw, 4)
    assert version == 1
    names = [t["name"] for t in ckpt.describe_checkpoint(p)["tensors"]]
    assert names == ["w_img", "b_img", "e_tok", "w_txt", "b_txt", "log_scale"]


def test_scalar_tensor_rank_zero(tmp_path):
    p = tmp_path / "s.ck"
    ckpt.write_tensors(p, {"x": np.asarray(2.5)})
    back = ckpt.read_tensors(p)
    assert back["x"].shape == ()
    assert float(back["x"]) == 2.5
    # rank byte is 0 -> name(1) + len(2) + rank(1) + 8 value bytes.
    assert p.stat().st_size == 8 + 2 + 1 + 1 + 8


def test_tensors_values_bitwise(tmp_path):
    rng = np.random.default_rng(4)
    tensors = {"a": rng.normal(size=(3, 4, 2)), "b": rng.normal(size=7)}
    p = tmp_path / "t.ck"
    ckpt.write_tensors(p, tensors)
    back = ckpt.read_tensors(p)
    assert np.array_equal(back["a"], tensors["a"])
    assert np.array_equal(back["b"], tensors["b"])


def test_checkpoint_missing_tensor_rejected(tmp_path):
    enc = init_encoder(3, 2, vocab_size=10, token_dim=2, seed=0)
    params = enc.params()
    del params["w_txt"]
    p = tmp_path / "m.ck"
    ckpt.write_tensors(p, params)
    with pytest.raises(CorruptRecordError):
        ckpt.read_checkpoint(p)


def test_checkpoint_extra_tensors_ignored(tmp_path):
    enc = init_encoder(3, 2, vocab_size=10, token_dim=2, seed=0)
    params = dict(enc.params())
    params["extra"] = np.ones(3)
    p = tmp_path / "m.ck"
    ckpt.write_tensors(p, params)
    back = ckpt.read_checkpoint(p)
    assert back.embed_dim == 2


def test_checkpoint_corruption_detected(tmp_path):
    enc = init_encoder(3, 2, vocab_size=10, token_dim=2, seed=0)
    p = tmp_path / "m.ck"
    ckpt.write_checkpoint(p, enc)
    raw = p.read_bytes()
    p.write_bytes(raw[: len(raw) - 5])
    with pytest.raises(CorruptRecordError):
        ckpt.read_tensors(p)


def test_checkpoint_rejects_nan(tmp_path):
    p = tmp_path / "m.ck"
    with pytest.raises(NotFiniteError):
        ckpt.write_tensors(p, {"x": np.array([np.nan])})


def test_checkpoint_duplicate_name_rejected(tmp_path):
    p = tmp_path / "m.ck"
    body = ckpt.HEADER.pack(b"OFCK", 1)
    rec = struct.pack("<H", 1) + b"x" + struct.pack("<B", 0) + struct.pack("<d", 1.0)
    p.write_bytes(body + rec + rec)
    with pytest.raises(DuplicateIdError):
        ckpt.read_tensors(p)


def test_checkpoint_bad_magic_and_version(tmp_path):
    p = tmp_path / "m.ck"
    p.write_bytes(b"XXXX" + bytes(4))
    with pytest.raises(BadMagicError):
        ckpt.read_tensors(p)
    p.write_bytes(ckpt.HEADER.pack(b"OFCK", 7))
    with pytest.raises(UnsupportedVersionError):
        ckpt.read_tensors(p)
