import pytest

from clipfit.errors import DataError, EmptyCaptionError
from clipfit.textprep import (
    PosLexicon,
    default_lexicon,
    extract_noun_chunks,
    lemmatize_token,
    preprocess_caption,
)


# --- lemmatizer ------------------------------------------------------------


@pytest.mark.parametrize(
    "token,expected",
    [
        ("dresses", "dress"),
        ("blouses", "blouse"),
        ("purses", "purse"),
        ("sleeves", "sleeve"),
        ("skirts", "skirt"),
        ("ties", "tie"),
        ("accessories", "accessory"),
        ("bodies", "body"),
        ("jeans", "jeans"),
        ("pants", "pants"),
        ("leggings", "leggings"),
        ("sunglasses", "sunglasses"),
        ("dress", "dress"),
        ("as", "as"),
        ("is", "is"),
        ("zip-up", "zip-up"),
        ("90s", "90s"),
        ("wool", "wool"),
    ],
)
def test_lemmatize_cases(token, expected):
    assert lemmatize_token(token) == expected


def test_lemmatize_leaves_double_s_alone():
    assert lemmatize_token("glass") == "glass"
    assert lemmatize_token("class") == "class"


# --- chunk extraction ------------------------------------------------------


def test_chunks_reference_caption():
    chunks = extract_noun_chunks("a red cotton dress with long sleeves")
    assert chunks == ["red cotton dress", "long sleeve"]


def test_chunks_drop_pure_function_words():
    assert extract_noun_chunks("the and of") == []


def test_determiners_skip_without_breaking():
    assert extract_noun_chunks("a red dress") == ["red dress"]
    # Determiner inside a run must not split it.
    assert extract_noun_chunks("red the dress") == ["red dress"]


def test_prepositions_split_runs():
    assert extract_noun_chunks("jacket with hood") == ["jacket", "hood"]


def test_conjunction_splits():
    assert extract_noun_chunks("skirt and blouse") == ["skirt", "blouse"]


def test_verbs_split_runs():
    assert extract_noun_chunks("dress made from silk fabric") == ["dress", "silk fabric"]


def test_trailing_adjectives_are_trimmed():
    # "soft" has no following noun, so the run collapses to its noun core.
    assert extract_noun_chunks("wool sweater warm and soft") == ["wool sweater"]


def test_adjective_only_run_yields_nothing():
    assert extract_noun_chunks("red and blue") == []


def test_unknown_words_count_as_nouns():
    assert extract_noun_chunks("bohemian maxi dress") == ["bohemian maxi dress"]


def test_punctuation_breaks_runs():
    assert extract_noun_chunks("red dress, leather belt") == ["red dress", "leather belt"]


def test_hyphenated_words_stay_whole():
    assert extract_noun_chunks("zip-up hoodie") == ["zip-up hoodie"]
    assert extract_noun_chunks("v-neck sweater") == ["v-neck sweater"]


def test_head_noun_is_lemmatized_only_at_head():
    assert extract_noun_chunks("denim jeans") == ["denim jeans"]
    assert extract_noun_chunks("summer dresses") == ["summer dress"]


def test_longer_caption_end_to_end():
    chunks = extract_noun_chunks(
        "This elegant black dress is made of soft cotton and has long sleeves."
    )
    assert chunks == ["elegant black dress", "soft cotton", "long sleeve"]


def test_case_is_folded():
    assert extract_noun_chunks("RED Cotton DRESS") == ["red cotton dress"]


def test_empty_caption_rejected():
    with pytest.raises(EmptyCaptionError):
        extract_noun_chunks("")
    with pytest.raises(EmptyCaptionError):
        extract_noun_chunks("   ")


def test_custom_lexicon_is_honored():
    lex = PosLexicon(
        determiners=frozenset({"a"}),
        prepositions=frozenset({"with"}),
        conjunctions=frozenset(),
        other_closed=frozenset(),
        adjectives=frozenset({"quilted"}),
    )
    assert extract_noun_chunks("a quilted bag with strap", lex) == ["quilted bag", "strap"]


def test_lexicon_requires_all_categories():
    with pytest.raises(DataError):
        PosLexicon.from_dict({"determiners": []})


def test_default_lexicon_loads_and_caches():
    lex1 = default_lexicon()
    lex2 = default_lexicon()
    assert lex1 is lex2
    assert "with" in lex1.prepositions
    assert "red" in lex1.adjectives


# --- caption preprocessing -------------------------------------------------


def test_preprocess_joins_chunks():
    out = preprocess_caption("a red cotton dress with long sleeves")
    assert out == "red cotton dress, long sleeve"


def test_preprocess_falls_back_to_original():
    assert preprocess_caption("the and of") == "the and of"


def test_preprocess_custom_joiner():
    out = preprocess_caption("jacket with hood", joiner=" | ")
    assert out == "jacket | hood"
