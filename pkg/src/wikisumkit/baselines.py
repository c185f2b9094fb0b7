"""Extractive baselines: Lead, LexRank ranking and selection, the greedy
sentence oracle, and budgeted paragraph extraction."""

from __future__ import annotations

import logging

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .rouge import rouge_n

log = logging.getLogger(__name__)


@dataclass
class RankedUnits:
    units: list[list[str]]   # token lists, original order
    scores: list[float]      # stationary probabilities, sum to 1
    iterations: int = 0


@dataclass
class OracleSelection:
    chosen: list[int]        # sentence indices in selection order
    score_trace: list[float]  # ROUGE-2 F1 after each greedy step


def lead_baseline(doc_tokens: Sequence[str], k: int) -> list[str]:
    """First min(k, len(doc)) tokens in document order."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return list(doc_tokens[:k])


def lexrank_scores(
    units: Sequence[Sequence[str]],
    damping: float = 0.85,
    epsilon: float = 1e-6,
    max_iter: int = 100,
) -> RankedUnits:
    """Continuous LexRank over tf-idf cosine similarities.

    idf is computed within the unit collection (idf = ln(M/df)). The
    row-normalized similarity matrix is mixed with a uniform teleport at
    weight (1 - damping); units with a zero similarity row link uniformly.
    Power iteration starts uniform and stops when the L1 change drops
    below epsilon.
    """
    m = len(units)
    if m == 0:
        raise ValueError("lexrank needs at least one unit")
    if m == 1:
        return RankedUnits(units=[list(units[0])], scores=[1.0], iterations=0)

    vocab: dict[str, int] = {}
    for unit in units:
        for tok in unit:
            vocab.setdefault(tok, len(vocab))

    tf = np.zeros((m, max(len(vocab), 1)))
    for i, unit in enumerate(units):
        for tok in unit:
            tf[i, vocab[tok]] += 1.0
    df = (tf > 0).sum(axis=0)
    idf = np.log(m / np.maximum(df, 1))
    vectors = tf * idf

    norms = np.linalg.norm(vectors, axis=1)
    sim = vectors @ vectors.T
    denom = np.outer(norms, norms)
    with np.errstate(divide="ignore", invalid="ignore"):
        sim = np.where(denom > 0, sim / denom, 0.0)
    np.fill_diagonal(sim, 0.0)  # no self-votes: a sink unit must not hoard rank

    row_sums = sim.sum(axis=1)
    transition = np.empty_like(sim)
    for i in range(m):
        if row_sums[i] > 0:
            transition[i] = sim[i] / row_sums[i]
        else:
            transition[i] = 1.0 / m  # isolated unit links uniformly

    teleport = np.full(m, 1.0 / m)
    p = np.full(m, 1.0 / m)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        new_p = (1 - damping) * teleport + damping * (transition.T @ p)
        if np.abs(new_p - p).sum() < epsilon:
            p = new_p
            break
        p = new_p
    p = p / p.sum()
    return RankedUnits(units=[list(u) for u in units], scores=p.tolist(), iterations=iterations)


def lexrank_baseline(
    sentences: Sequence[Sequence[str]],
    k: int,
    damping: float = 0.85,
    epsilon: float = 1e-6,
    max_iter: int = 100,
) -> list[str]:
    """Concatenate sentences by descending score (ties keep document order)
    and truncate to k tokens."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if not sentences:
        return []
    ranked = lexrank_scores(sentences, damping=damping, epsilon=epsilon, max_iter=max_iter)
    order = sorted(range(len(sentences)), key=lambda i: (-ranked.scores[i], i))
    out: list[str] = []
    for i in order:
        out.extend(sentences[i])
    return out[:k]


def ext_oracle(
    sentences: Sequence[Sequence[str]],
    reference: Sequence[str],
    proxy_reference: Sequence[str] | None = None,
) -> OracleSelection:
    """Greedy sentence selection maximizing ROUGE-2 F1 against the reference.

    When a proxy reference is given it drives the selection (the usual
    cross-lingual setup where the monolingual summary stands in for the
    target-language one). Stops as soon as no candidate strictly improves
    the score; ties go to the smallest sentence index.
    """
    target = list(proxy_reference) if proxy_reference is not None else list(reference)
    chosen: list[int] = []
    trace: list[float] = []
    best = 0.0
    while True:
        best_gain_idx = -1
        best_score = best
        for i in range(len(sentences)):
            if i in chosen:
                continue
            candidate_idx = sorted(chosen + [i])
            cand_tokens = [t for j in candidate_idx for t in sentences[j]]
            score = rouge_n(cand_tokens, target, 2).f1
            if score > best_score:
                best_score = score
                best_gain_idx = i
        if best_gain_idx < 0:
            break
        chosen.append(best_gain_idx)
        trace.append(best_score)
        best = best_score
    return OracleSelection(chosen=chosen, score_trace=trace)


def oracle_tokens(sentences: Sequence[Sequence[str]], selection: OracleSelection) -> list[str]:
    """Selected sentences concatenated in document order."""
    return [t for i in sorted(selection.chosen) for t in sentences[i]]


def paragraph_extract(
    paragraphs: Sequence[Sequence[str]],
    budget: int = 600,
    damping: float = 0.85,
    epsilon: float = 1e-6,
    max_iter: int = 100,
) -> list[int]:
    """Pick top-LexRank paragraphs up to a token budget, skip-and-continue.

    Returns the selected paragraph indices in original document order. If
    no paragraph fits the budget at all, the single highest-ranked one is
    returned (callers truncate it to the budget) with a warning.
    """
    if budget <= 0:
        raise ValueError("budget must be > 0")
    if not paragraphs:
        return []
    ranked = lexrank_scores(paragraphs, damping=damping, epsilon=epsilon, max_iter=max_iter)
    order = sorted(range(len(paragraphs)), key=lambda i: (-ranked.scores[i], i))
    remaining = budget
    selected: list[int] = []
    for i in order:
        size = len(paragraphs[i])
        if size <= remaining:
            selected.append(i)
            remaining -= size
    if not selected:
        log.warning(
            "no paragraph fits budget %d; returning top-ranked paragraph truncated", budget
        )
        return [order[0]]
    return sorted(selected)
