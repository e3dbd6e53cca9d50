import json
import os

import numpy as np
import pytest

os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TRANSFORMERS_OFFLINE", "1")


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory):
    """A fully local CLIP checkpoint: seeded random weights plus a
    character-level tokenizer, so no test touches the network."""
    import torch
    from transformers import CLIPConfig, CLIPImageProcessor, CLIPModel, CLIPTokenizer

    out = tmp_path_factory.mktemp("tinyclip")
    chars = "abcdefghijklmnopqrstuvwxyz0123456789-"
    vocab = {"<|startoftext|>": 0, "<|endoftext|>": 1}
    for ch in chars:
        vocab[ch] = len(vocab)
    for ch in chars:
        vocab[ch + "</w>"] = len(vocab)
    (out / "vocab.json").write_text(json.dumps(vocab))
    (out / "merges.txt").write_text("#version: 0.2\n")

    cfg = CLIPConfig(
        text_config={
            "vocab_size": len(vocab),
            "hidden_size": 32,
            "intermediate_size": 64,
            "num_hidden_layers": 2,
            "num_attention_heads": 2,
            "max_position_embeddings": 77,
            "bos_token_id": 0,
            "eos_token_id": 1,
        },
        vision_config={
            "hidden_size": 32,
            "intermediate_size": 64,
            "num_hidden_layers": 2,
            "num_attention_heads": 2,
            "image_size": 32,
            "patch_size": 8,
            "num_channels": 3,
        },
        projection_dim=16,
    )
    torch.manual_seed(0)
    CLIPModel(cfg).save_pretrained(out)
    CLIPTokenizer(str(out / "vocab.json"), str(out / "merges.txt")).save_pretrained(out)
    CLIPImageProcessor().save_pretrained(out)
    return out


@pytest.fixture(scope="session")
def image_dataset(tmp_path_factory):
    """Four small PNGs (two color, two grayscale) plus a manifest."""
    from PIL import Image

    root = tmp_path_factory.mktemp("imgs")
    rng = np.random.default_rng(7)
    lines = []
    shapes = [(40, 50, 3), (64, 48, 3), (28, 28, 1), (28, 28, 1)]
    for i, shape in enumerate(shapes):
        arr = rng.integers(0, 256, size=shape, dtype=np.uint8)
        img = Image.fromarray(arr.squeeze(), mode="L" if shape[2] == 1 else "RGB")
        name = f"img-{i}.png"
        img.save(root / name)
        lines.append(json.dumps({
            "id": f"rec-{i}",
            "caption": f"a garment number {i}",
            "image_path": name,
            "labels": ["left" if i % 2 == 0 else "right"],
        }))
    manifest = root / "manifest.jsonl"
    manifest.write_text("\n".join(lines) + "\n")
    return manifest
