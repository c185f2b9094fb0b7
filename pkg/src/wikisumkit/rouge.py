"""Self-contained ROUGE-1/2/L scoring over tokenized text.

No stemming; lowercasing is the caller's choice at tokenization time.
Zero denominators always score 0 rather than raising, which the greedy
oracle relies on for empty selections.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .segment import TokenizedText


@dataclass
class RougeScore:
    precision: float
    recall: float
    f1: float
    variant: str  # R1, R2, RL


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _tokens(x: "TokenizedText | Sequence[str]") -> list[str]:
    return list(x.tokens) if isinstance(x, TokenizedText) else list(x)


def rouge_n(candidate, reference, n: int) -> RougeScore:
    """Clipped n-gram overlap precision/recall/F1."""
    cand = _tokens(candidate)
    ref = _tokens(reference)
    cand_grams = _ngrams(cand, n)
    ref_grams = _ngrams(ref, n)
    match = sum((cand_grams & ref_grams).values())
    cand_total = sum(cand_grams.values())
    ref_total = sum(ref_grams.values())
    p = match / cand_total if cand_total else 0.0
    r = match / ref_total if ref_total else 0.0
    return RougeScore(p, r, _f1(p, r), f"R{n}")


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Token-level longest common subsequence length (two-row DP)."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0] * (len(b) + 1)
        for j, y in enumerate(b, 1):
            if x == y:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = max(prev[j], cur[j - 1])
        prev = cur
    return prev[-1]


def _lcs_tokens(a: Sequence[str], b: Sequence[str]) -> list[str]:
    """Tokens of one LCS of a and b (full DP table with backtrack)."""
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        return []
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        row = dp[i]
        above = dp[i - 1]
        ai = a[i - 1]
        for j in range(1, m + 1):
            if ai == b[j - 1]:
                row[j] = above[j - 1] + 1
            else:
                row[j] = max(above[j], row[j - 1])
    out = []
    i, j = n, m
    while i > 0 and j > 0:
        if a[i - 1] == b[j - 1]:
            out.append(a[i - 1])
            i -= 1
            j -= 1
        elif dp[i - 1][j] >= dp[i][j - 1]:
            i -= 1
        else:
            j -= 1
    out.reverse()
    return out


def rouge_l(candidate, reference, mode: str = "summary-union") -> RougeScore:
    """ROUGE-L in sequence or summary-union mode.

    Sequence mode scores the LCS of the two full token sequences.
    Summary-union mode computes an LCS per reference sentence against the
    whole candidate, then clips the aggregated match counts per token type
    against the candidate counts so no candidate token is credited twice.
    """
    cand = _tokens(candidate)
    ref = _tokens(reference)
    if not cand or not ref:
        return RougeScore(0.0, 0.0, 0.0, "RL")

    if mode == "sequence":
        match = lcs_length(cand, ref)
    elif mode == "summary-union":
        ref_sentences: list[list[str]]
        if isinstance(reference, TokenizedText) and reference.sentence_bounds:
            ref_sentences = reference.sentences
        else:
            ref_sentences = [ref]
        hits: Counter = Counter()
        for sent in ref_sentences:
            hits.update(_lcs_tokens(sent, cand))
        cand_counts = Counter(cand)
        match = sum((hits & cand_counts).values())
        # clipping an arbitrary LCS composition can drop below the whole-
        # sequence LCS; floor it there so union mode only ever adds matches
        if len(ref_sentences) > 1:
            match = max(match, lcs_length(cand, ref))
    else:
        raise ValueError(f"unknown ROUGE-L mode {mode!r}")

    p = match / len(cand)
    r = match / len(ref)
    return RougeScore(p, r, _f1(p, r), "RL")


def rouge_l_recall_budget(extracted_doc, reference, mode: str = "summary-union") -> float:
    """ROUGE-L recall with the (possibly truncated) document as candidate."""
    return rouge_l(extracted_doc, reference, mode=mode).recall
