import numpy as np
import pytest

from clipfit.errors import (
    DataError,
    DuplicateLabelError,
    EmptyCaptionError,
    EmptyLabelSetError,
)
from clipfit.prompts import (
    FASHION_PROMPTS,
    FIXED_PROMPT_INDEX,
    build_class_embeddings,
    load_template,
    render_prompt,
    sample_prompt,
)
from clipfit.rng import SplitMix64


def test_template_has_nineteen_prompts():
    assert len(FASHION_PROMPTS) == 19
    assert len(set(FASHION_PROMPTS)) == 19


def test_template_contents_and_order():
    assert FASHION_PROMPTS[0] == "a photo of a"
    assert FASHION_PROMPTS[3] == "a photo of an expensive"
    assert FASHION_PROMPTS[6] == "a fashion studio shot of a"
    assert FASHION_PROMPTS[14] == "an asos photo of a"
    assert FASHION_PROMPTS[18] == "a photo of one"
    assert FIXED_PROMPT_INDEX == 0


def test_render_concatenates_with_space():
    assert render_prompt(0, "red dress") == "a photo of a red dress"
    assert render_prompt(18, "coat") == "a photo of one coat"


def test_render_rejects_empty_caption():
    with pytest.raises(EmptyCaptionError):
        render_prompt(0, "")


def test_sampling_covers_all_indices_deterministically():
    rng = SplitMix64(11)
    draws = [sample_prompt(rng) for _ in range(400)]
    assert set(draws) == set(range(19))
    rng2 = SplitMix64(11)
    assert draws == [sample_prompt(rng2) for _ in range(400)]


def test_load_template_override(tmp_path):
    p = tmp_path / "prompts.txt"
    p.write_text("a sketch of a\n\nan ad for a\n", encoding="utf-8")
    assert load_template(p) == ("a sketch of a", "an ad for a")


def test_load_template_rejects_blank_file(tmp_path):
    p = tmp_path / "empty.txt"
    p.write_text("\n\n", encoding="utf-8")
    with pytest.raises(DataError):
        load_template(p)


def _toy_embed(text):
    # A deterministic stand-in embedder: character histogram, 8 dims.
    v = np.zeros(8)
    for ch in text:
        v[ord(ch) % 8] += 1.0
    return v


def test_class_embeddings_are_unit_rows():
    out = build_class_embeddings(["dress", "coat", "skirt"], _toy_embed, mode="fixed")
    assert out.shape == (3, 8)
    assert np.allclose(np.linalg.norm(out, axis=1), 1.0)


def test_class_embeddings_fixed_uses_generic_prompt():
    out = build_class_embeddings(["dress"], _toy_embed, mode="fixed")
    direct = _toy_embed(render_prompt(FIXED_PROMPT_INDEX, "dress"))
    assert np.allclose(out[0], direct / np.linalg.norm(direct))


def test_ensemble_mode_differs_from_fixed():
    fixed = build_class_embeddings(["dress"], _toy_embed, mode="fixed")
    ensemble = build_class_embeddings(["dress"], _toy_embed, mode="template-ensemble")
    assert not np.allclose(fixed, ensemble)


def test_ensemble_averages_unit_embeddings():
    ensemble = build_class_embeddings(["coat"], _toy_embed, mode="template-ensemble")
    stack = []
    for i in range(len(FASHION_PROMPTS)):
        e = _toy_embed(render_prompt(i, "coat"))
        stack.append(e / np.linalg.norm(e))
    mean = np.mean(stack, axis=0)
    assert np.allclose(ensemble[0], mean / np.linalg.norm(mean))


def test_class_embedding_errors():
    with pytest.raises(EmptyLabelSetError):
        build_class_embeddings([], _toy_embed)
    with pytest.raises(DuplicateLabelError):
        build_class_embeddings(["dress", "dress"], _toy_embed)
    with pytest.raises(DataError):
        build_class_embeddings(["dress"], _toy_embed, mode="bogus")
