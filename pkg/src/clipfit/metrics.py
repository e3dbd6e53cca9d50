"""Zero-shot classification, attribute, and retrieval metrics.

Ranking is deterministic: scores sort descending with ties broken by
ascending candidate index. Final averages accumulate in plain Python
left-to-right so results are reproducible bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimMismatchError,
    EmptyLabelSetError,
    EmptyRelevanceError,
    MissingTruthError,
)
from .linalg import as_f64, check_finite


def rank_candidates(scores: np.ndarray) -> np.ndarray:
    """Candidate indices from best to worst; ties keep ascending index."""
    scores = as_f64(scores)
    if scores.ndim != 1:
        raise DimMismatchError("rank_candidates expects a 1-D score vector")
    check_finite(scores, "scores")
    return np.argsort(-scores, kind="stable")


def rank_rows(score_matrix: np.ndarray) -> np.ndarray:
    """Row-wise ranking of a (queries, candidates) score matrix."""
    scores = as_f64(score_matrix)
    if scores.ndim != 2:
        raise DimMismatchError("rank_rows expects a 2-D score matrix")
    check_finite(scores, "scores")
    return np.argsort(-scores, axis=1, kind="stable")


def score_matrix(query_embs: np.ndarray, candidate_embs: np.ndarray) -> np.ndarray:
    """Cosine scores between unit query rows and unit candidate rows."""
    q = as_f64(query_embs)
    c = as_f64(candidate_embs)
    if q.ndim != 2 or c.ndim != 2 or q.shape[1] != c.shape[1]:
        raise DimMismatchError(f"incompatible embedding shapes {q.shape} and {c.shape}")
    return q @ c.T


@dataclass(frozen=True)
class ZeroShotResult:
    accuracy_at: dict[int, float]
    weighted_f1: float
    predictions: tuple[int, ...]
    n_queries: int
    n_classes: int


def zero_shot_classify(
    image_embs: np.ndarray,
    class_embs: np.ndarray,
    truths: Sequence[int],
    ks: Sequence[int] = (1, 5),
) -> ZeroShotResult:
    """Single-label evaluation: accuracy at each k plus weighted F1 at 1."""
    return classify_scores(score_matrix(image_embs, class_embs), truths, ks)


def classify_scores(
    scores: np.ndarray, truths: Sequence[int], ks: Sequence[int] = (1, 5)
) -> ZeroShotResult:
    """Same evaluation on an explicit (queries, classes) score matrix."""
    scores = as_f64(scores)
    if scores.ndim != 2:
        raise DimMismatchError("classify_scores expects a 2-D score matrix")
    n_queries, n_classes = scores.shape
    if n_classes == 0:
        raise EmptyLabelSetError("no classes to rank")
    if len(truths) != n_queries:
        raise DimMismatchError(f"{n_queries} queries but {len(truths)} truth labels")
    for t in truths:
        if not 0 <= t < n_classes:
            raise MissingTruthError(f"truth label {t} outside [0, {n_classes})")

    ranked = rank_rows(scores)
    predictions = tuple(int(ranked[i, 0]) for i in range(n_queries))

    accuracy_at: dict[int, float] = {}
    for k in ks:
        depth = min(k, n_classes)
        hits = 0
        for i, truth in enumerate(truths):
            if truth in ranked[i, :depth]:
                hits += 1
        accuracy_at[k] = hits / n_queries

    return ZeroShotResult(
        accuracy_at=accuracy_at,
        weighted_f1=weighted_f1(predictions, truths, n_classes),
        predictions=predictions,
        n_queries=n_queries,
        n_classes=n_classes,
    )


def weighted_f1(predictions: Sequence[int], truths: Sequence[int], n_classes: int) -> float:
    """Support-weighted mean of per-class F1 over classes that occur.

    A class with zero precision and recall scores zero; classes with no
    true instances are left out of both the sum and the weight mass.
    """
    if len(predictions) != len(truths):
        raise DimMismatchError("predictions and truths differ in length")
    tp = [0] * n_classes
    fp = [0] * n_classes
    fn = [0] * n_classes
    for pred, truth in zip(predictions, truths):
        if not 0 <= truth < n_classes:
            raise MissingTruthError(f"truth label {truth} outside [0, {n_classes})")
        if not 0 <= pred < n_classes:
            raise MissingTruthError(f"prediction {pred} outside [0, {n_classes})")
        if pred == truth:
            tp[truth] += 1
        else:
            fp[pred] += 1
            fn[truth] += 1
    weighted_sum = 0.0
    total_support = 0
    for c in range(n_classes):
        support = tp[c] + fn[c]
        if support == 0:
            continue
        precision = tp[c] / (tp[c] + fp[c]) if tp[c] + fp[c] > 0 else 0.0
        recall = tp[c] / support
        f1 = 0.0 if precision + recall == 0.0 else 2.0 * precision * recall / (precision + recall)
        weighted_sum += support * f1
        total_support += support
    if total_support == 0:
        raise EmptyLabelSetError("every class has zero support")
    return weighted_sum / total_support


@dataclass(frozen=True)
class AttributeResult:
    overall_at: dict[int, float]
    per_class_at: dict[int, float]
    n_queries: int
    n_attributes: int
    excluded: int


def attribute_recall(
    image_embs: np.ndarray,
    attribute_embs: np.ndarray,
    truth_sets: Sequence[Sequence[int]],
    ks: Sequence[int] = (1, 3, 5),
) -> AttributeResult:
    """Multi-label recall at k, overall and macro-averaged per attribute.

    Overall: retrieved true attributes over total true attributes.
    Per class: recall per attribute with at least one positive, then the
    plain mean over those attributes. Queries with empty truth sets are
    skipped and reported in ``excluded``.
    """
    return attribute_recall_scores(score_matrix(image_embs, attribute_embs), truth_sets, ks)


def attribute_recall_scores(
    scores: np.ndarray, truth_sets: Sequence[Sequence[int]], ks: Sequence[int] = (1, 3, 5)
) -> AttributeResult:
    """Same evaluation on an explicit (queries, attributes) score matrix."""
    scores = as_f64(scores)
    if scores.ndim != 2:
        raise DimMismatchError("attribute_recall_scores expects a 2-D score matrix")
    n_queries, n_attrs = scores.shape
    if n_attrs == 0:
        raise EmptyLabelSetError("no attributes to rank")
    if len(truth_sets) != n_queries:
        raise DimMismatchError(f"{n_queries} queries but {len(truth_sets)} truth sets")

    truths: list[set[int]] = []
    kept_rows: list[int] = []
    excluded = 0
    for i, raw in enumerate(truth_sets):
        tset = set(raw)
        for a in tset:
            if not 0 <= a < n_attrs:
                raise MissingTruthError(f"attribute {a} outside [0, {n_attrs})")
        if not tset:
            excluded += 1
            continue
        truths.append(tset)
        kept_rows.append(i)
    if not kept_rows:
        raise EmptyRelevanceError("all queries have empty truth sets")

    ranked = rank_rows(scores)
    positives = [0] * n_attrs
    for tset in truths:
        for a in tset:
            positives[a] += 1

    overall_at: dict[int, float] = {}
    per_class_at: dict[int, float] = {}
    for k in ks:
        depth = min(k, n_attrs)
        total_hits = 0
        total_truth = 0
        hits_per_attr = [0] * n_attrs
        for row, tset in zip(kept_rows, truths):
            top = set(int(a) for a in ranked[row, :depth])
            matched = tset & top
            total_hits += len(matched)
            total_truth += len(tset)
            for a in matched:
                hits_per_attr[a] += 1
        overall_at[k] = total_hits / total_truth
        ratios = [hits_per_attr[a] / positives[a] for a in range(n_attrs) if positives[a] > 0]
        per_class_at[k] = sum(ratios) / len(ratios)

    return AttributeResult(
        overall_at=overall_at,
        per_class_at=per_class_at,
        n_queries=n_queries,
        n_attributes=n_attrs,
        excluded=excluded,
    )


@dataclass(frozen=True)
class RetrievalResult:
    recall_at: dict[int, float]
    n_queries: int
    n_gallery: int


def retrieval_recall(
    query_embs: np.ndarray,
    gallery_embs: np.ndarray,
    relevance: Sequence[Sequence[int]],
    ks: Sequence[int] = (1, 5, 10),
) -> RetrievalResult:
    """Fraction of queries with a relevant gallery item in the top k."""
    return retrieval_recall_scores(score_matrix(query_embs, gallery_embs), relevance, ks)


def retrieval_recall_scores(
    scores: np.ndarray, relevance: Sequence[Sequence[int]], ks: Sequence[int] = (1, 5, 10)
) -> RetrievalResult:
    """Same evaluation on an explicit (queries, gallery) score matrix."""
    scores = as_f64(scores)
    if scores.ndim != 2:
        raise DimMismatchError("retrieval_recall_scores expects a 2-D score matrix")
    n_queries, n_gallery = scores.shape
    if len(relevance) != n_queries:
        raise DimMismatchError(f"{n_queries} queries but {len(relevance)} relevance sets")
    rel_sets: list[set[int]] = []
    for i, raw in enumerate(relevance):
        rset = set(raw)
        if not rset:
            raise EmptyRelevanceError(f"query {i} has no relevant items")
        for g in rset:
            if not 0 <= g < n_gallery:
                raise MissingTruthError(f"gallery index {g} outside [0, {n_gallery})")
        rel_sets.append(rset)

    ranked = rank_rows(scores)
    recall_at: dict[int, float] = {}
    for k in ks:
        depth = min(k, n_gallery)
        hits = 0
        for i, rset in enumerate(rel_sets):
            if rset & set(int(g) for g in ranked[i, :depth]):
                hits += 1
        recall_at[k] = hits / n_queries
    return RetrievalResult(recall_at=recall_at, n_queries=n_queries, n_gallery=n_gallery)


def paired_retrieval(
    text_embs: np.ndarray, image_embs: np.ndarray, ks: Sequence[int] = (1, 5, 10)
) -> tuple[RetrievalResult, RetrievalResult]:
    """Text-to-image and image-to-text recall when row i matches row i."""
    t = as_f64(text_embs)
    v = as_f64(image_embs)
    if t.shape != v.shape:
        raise DimMismatchError(f"paired sets differ in shape: {t.shape} vs {v.shape}")
    identity = [[i] for i in range(t.shape[0])]
    return (
        retrieval_recall(t, v, identity, ks),
        retrieval_recall(v, t, identity, ks),
    )
