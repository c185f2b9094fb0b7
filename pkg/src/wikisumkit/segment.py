"""Rule-based tokenization and sentence splitting, pluggable per language.

The default tokenizer keeps Unicode word tokens and splits punctuation into
single-character tokens. Sentence boundaries are terminal punctuation
followed by whitespace and an uppercase letter or digit, with per-language
abbreviation exception lists shipped as plain-text data files.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources


@dataclass
class TokenizedText:
    tokens: list[str]
    sentence_bounds: list[tuple[int, int]]  # (start, end) token-index ranges
    source: str

    @property
    def sentences(self) -> list[list[str]]:
        return [self.tokens[a:b] for a, b in self.sentence_bounds]


_WORD_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)
_TERMINAL_RE = re.compile(r"[.!?…]")

KNOWN_LANGUAGES = ("en", "de", "fr", "cs")


@lru_cache(maxsize=None)
def load_abbreviations(lang: str) -> frozenset[str]:
    """Abbreviation list for a language; one token per line, '#' comments."""
    try:
        data = (
            resources.files("wikisumkit.data.abbrev")
            .joinpath(f"{lang}.txt")
            .read_text(encoding="utf-8")
        )
    except FileNotFoundError:
        return frozenset()
    entries = set()
    for line in data.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            entries.add(line)
    return frozenset(entries)


def split_sentences(text: str, abbreviations: frozenset[str]) -> list[str]:
    """Split on terminal punctuation followed by space + uppercase/digit."""
    boundaries = []
    for m in _TERMINAL_RE.finditer(text):
        end = m.end()
        # swallow a run of terminal punctuation
        while end < len(text) and _TERMINAL_RE.match(text[end]):
            end += 1
        j = end
        while j < len(text) and text[j].isspace():
            j += 1
        if j == end or j >= len(text):
            continue
        nxt = text[j]
        if not (nxt.isupper() or nxt.isdigit()):
            continue
        if text[m.start()] == ".":
            prev = re.search(r"(\S+)$", text[:end])
            if prev and prev.group(1) in abbreviations:
                continue
        boundaries.append(end)
    pieces = []
    start = 0
    for b in boundaries:
        pieces.append(text[start:b])
        start = b
    pieces.append(text[start:])
    return [p for p in pieces if p.strip()]


def tokenize(text: str, lang: str = "en", lowercase: bool = False) -> TokenizedText:
    """Tokenize NFKC-normalized text and record sentence spans.

    Unknown languages fall back to the default rules with a warning.
    """
    if lang not in KNOWN_LANGUAGES:
        warnings.warn(f"no tokenizer rules for language {lang!r}; using defaults")
        abbrevs = frozenset()
    else:
        abbrevs = load_abbreviations(lang)

    tokens: list[str] = []
    bounds: list[tuple[int, int]] = []
    for sent in split_sentences(text, abbrevs):
        sent_tokens = _WORD_RE.findall(sent)
        if not sent_tokens:
            continue
        if lowercase:
            sent_tokens = [t.lower() for t in sent_tokens]
        bounds.append((len(tokens), len(tokens) + len(sent_tokens)))
        tokens.extend(sent_tokens)
    return TokenizedText(tokens=tokens, sentence_bounds=bounds, source=text)


def count_tokens(text: str, lang: str = "en") -> int:
    return len(_WORD_RE.findall(text))
