"""Task-characterisation metrics: extractive fragments, coverage, density,
compression, novel n-grams, and corpus-level statistics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .segment import TokenizedText, tokenize


@dataclass
class FragmentSet:
    # (summary_start, article_start, length) triples, ordered and disjoint
    # in summary positions; each span matches verbatim in both texts
    fragments: list[tuple[int, int, int]]
    summary_len: int
    article_len: int


@dataclass
class TaskStats:
    pairs: int
    words_per_doc: float
    sents_per_doc: float
    sections_per_doc: float
    words_per_sum: float
    sents_per_sum: float
    aspects: int
    coverage: float
    density: float
    compression: float
    novel_ngram_pct: dict[int, float] = field(default_factory=dict)

    CSV_FIELDS = (
        "pairs", "words_per_doc", "sents_per_doc", "sections_per_doc",
        "words_per_sum", "sents_per_sum", "aspects",
        "coverage", "density", "compression",
        "novel_1gram_pct", "novel_2gram_pct", "novel_3gram_pct", "novel_4gram_pct",
    )

    def csv_row(self) -> list:
        return [
            self.pairs,
            round(self.words_per_doc, 2), round(self.sents_per_doc, 2),
            round(self.sections_per_doc, 2),
            round(self.words_per_sum, 2), round(self.sents_per_sum, 2),
            self.aspects,
            round(self.coverage, 2), round(self.density, 2),
            round(self.compression, 2),
        ] + [round(self.novel_ngram_pct.get(n, 0.0), 2) for n in (1, 2, 3, 4)]


def _tokens(x) -> list[str]:
    return list(x.tokens) if isinstance(x, TokenizedText) else list(x)


def extractive_fragments(article, summary) -> FragmentSet:
    """Greedy left-to-right longest-match shared fragments.

    At each summary position the longest verbatim article match is taken
    (ties broken by smallest article start); unmatched positions advance
    by one.
    """
    a = _tokens(article)
    s = _tokens(summary)
    fragments: list[tuple[int, int, int]] = []
    i = 0
    while i < len(s):
        best_len = 0
        best_j = -1
        for j in range(len(a)):
            if a[j] != s[i]:
                continue
            k = 1
            while i + k < len(s) and j + k < len(a) and a[j + k] == s[i + k]:
                k += 1
            if k > best_len:
                best_len = k
                best_j = j
        if best_len >= 1:
            fragments.append((i, best_j, best_len))
            i += best_len
        else:
            i += 1
    return FragmentSet(fragments=fragments, summary_len=len(s), article_len=len(a))


def coverage(f: FragmentSet) -> float:
    """Percentage of summary tokens inside extractive fragments."""
    if f.summary_len == 0:
        raise ValueError("coverage undefined for empty summary")
    return 100.0 * sum(length for _, _, length in f.fragments) / f.summary_len


def density(f: FragmentSet) -> float:
    """Mean squared fragment length per summary token."""
    if f.summary_len == 0:
        raise ValueError("density undefined for empty summary")
    return sum(length * length for _, _, length in f.fragments) / f.summary_len


def compression(article_len: int, summary_len: int) -> float:
    if summary_len == 0:
        raise ValueError("compression undefined for empty summary")
    return article_len / summary_len


def novel_ngrams(article, summary, n: int) -> float:
    """Percentage of summary n-gram occurrences absent from the article.

    Summary side counts occurrences; article side is a set.
    """
    a = _tokens(article)
    s = _tokens(summary)
    if n < 1:
        raise ValueError("n must be >= 1")
    if len(s) < n:
        raise ValueError(f"summary shorter than n={n}")
    article_grams = {tuple(a[i : i + n]) for i in range(len(a) - n + 1)}
    total = len(s) - n + 1
    novel = sum(
        1 for i in range(total) if tuple(s[i : i + n]) not in article_grams
    )
    return 100.0 * novel / total


def corpus_stats(
    pairs: Iterable,
    monolingual_summary: Callable[[object], "Sequence[str] | None"],
    max_n: int = 4,
    lowercase: bool = True,
) -> TaskStats:
    """Aggregate task statistics over SummPair records.

    Size statistics come from each pair's document and summary; overlap
    metrics (coverage, density, compression, novel n-grams) use the
    monolingual summary returned by `monolingual_summary(pair)`, skipping
    pairs where it returns None. Aspects counts distinct top-level section
    headings verbatim, with no normalisation beyond ingest's own.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("empty pair list")

    words_doc = []
    sents_doc = []
    sections_doc = []
    words_sum = []
    sents_sum = []
    aspect_headings: set[str] = set()
    cov, dens, comp = [], [], []
    novel: dict[int, list[float]] = {n: [] for n in range(1, max_n + 1)}

    for pair in pairs:
        doc_text = " ".join(
            p for sec in pair.doc for p in sec.paragraphs
        )
        doc_tok = tokenize(doc_text, pair.src_lang, lowercase=lowercase)
        sum_text = " ".join(pair.summary)
        sum_tok = tokenize(sum_text, pair.tgt_lang, lowercase=lowercase)
        words_doc.append(len(doc_tok.tokens))
        sents_doc.append(len(doc_tok.sentence_bounds))
        sections_doc.append(len(pair.doc))
        words_sum.append(len(sum_tok.tokens))
        sents_sum.append(len(sum_tok.sentence_bounds))
        for sec in pair.doc:
            if sec.level == 2:
                aspect_headings.add(sec.heading)

        mono = monolingual_summary(pair)
        if mono is None:
            continue
        mono_tok = tokenize(" ".join(mono), pair.src_lang, lowercase=lowercase)
        if not mono_tok.tokens or not doc_tok.tokens:
            continue
        frags = extractive_fragments(doc_tok, mono_tok)
        cov.append(coverage(frags))
        dens.append(density(frags))
        comp.append(compression(len(doc_tok.tokens), len(mono_tok.tokens)))
        for n in range(1, max_n + 1):
            if len(mono_tok.tokens) >= n:
                novel[n].append(novel_ngrams(doc_tok, mono_tok, n))

    def mean(xs: list[float]) -> float:
        return sum(xs) / len(xs) if xs else 0.0

    return TaskStats(
        pairs=len(pairs),
        words_per_doc=mean(words_doc),
        sents_per_doc=mean(sents_doc),
        sections_per_doc=mean(sections_doc),
        words_per_sum=mean(words_sum),
        sents_per_sum=mean(sents_sum),
        aspects=len(aspect_headings),
        coverage=mean(cov),
        density=mean(dens),
        compression=mean(comp),
        novel_ngram_pct={n: mean(v) for n, v in novel.items()},
    )
