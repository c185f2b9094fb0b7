"""Interlanguage-link alignment: title clusters, cross-lingual pair sets,
parallel subset selection and train/valid splitting."""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, TextIO

from .ingest import Article, Section
from .segment import count_tokens


@dataclass
class LangLink:
    src_title: str
    src_lang: str
    tgt_title: str
    tgt_lang: str


@dataclass
class TitleCluster:
    members: dict[str, str]  # language code -> title

    @property
    def cluster_id(self) -> str:
        return "|".join(f"{lang}:{self.members[lang]}" for lang in sorted(self.members))


@dataclass
class FilterConfig:
    min_body_tokens: int = 250
    max_body_tokens: int = 5000
    min_lead_tokens: int = 20
    max_lead_tokens: int = 400

    def __post_init__(self):
        if not (0 < self.min_body_tokens < self.max_body_tokens):
            raise ValueError("invalid body token range")
        if not (0 < self.min_lead_tokens < self.max_lead_tokens):
            raise ValueError("invalid lead token range")


@dataclass
class SummPair:
    id: str
    src_lang: str
    tgt_lang: str
    src_title: str
    tgt_title: str
    doc: list[Section]          # sectioned body of the source article
    summary: list[str]          # lead paragraphs of the target article
    subset: str = "comparable"  # comparable | parallel | external
    split: str = "unassigned"   # train | valid | test | unassigned
    cluster_id: str = ""


def _decode_sql_string(s: str) -> str:
    return s.replace("\\\\", "\x00").replace("\\'", "'").replace('\\"', '"').replace("\x00", "\\")


_SQL_TUPLE_RE = re.compile(r"\(\s*'((?:[^'\\]|\\.)*)'\s*,\s*'((?:[^'\\]|\\.)*)'\s*,\s*'((?:[^'\\]|\\.)*)'\s*,\s*'((?:[^'\\]|\\.)*)'\s*\)")


def load_langlinks(
    stream: TextIO, format: str = "tsv", counters: dict[str, int] | None = None
) -> Iterator[LangLink]:
    """Read interlanguage links from a TSV file or SQL INSERT dump.

    TSV rows are "src_title\\tsrc_lang\\ttgt_lang\\ttgt_title". The SQL
    format expects INSERT statements with 4-string tuples in the same field
    order; \\' and \\\\ escapes are decoded. Malformed rows are counted and
    skipped.
    """
    if format == "tsv":
        for line in stream:
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4 or not all(parts):
                if counters is not None:
                    counters["malformed_links"] = counters.get("malformed_links", 0) + 1
                continue
            src_title, src_lang, tgt_lang, tgt_title = parts
            if src_lang == tgt_lang:
                if counters is not None:
                    counters["malformed_links"] = counters.get("malformed_links", 0) + 1
                continue
            yield LangLink(src_title, src_lang, tgt_title, tgt_lang)
    elif format == "sql-insert":
        for line in stream:
            if not line.lstrip().upper().startswith("INSERT"):
                continue
            for m in _SQL_TUPLE_RE.finditer(line):
                src_title, src_lang, tgt_lang, tgt_title = (
                    _decode_sql_string(g) for g in m.groups()
                )
                if src_lang == tgt_lang or not all((src_title, src_lang, tgt_lang, tgt_title)):
                    if counters is not None:
                        counters["malformed_links"] = counters.get("malformed_links", 0) + 1
                    continue
                yield LangLink(src_title, src_lang, tgt_title, tgt_lang)
    else:
        raise ValueError(f"unknown langlinks format {format!r}")


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def build_clusters(
    links: Iterable[LangLink],
    langs: set[str],
    counters: dict[str, int] | None = None,
) -> list[TitleCluster]:
    """Connected components over the undirected link graph, restricted to langs.

    Any component with two distinct titles for one language is dropped
    whole and counted under 'conflicting_clusters'.
    """
    uf = _UnionFind()
    for link in links:
        if link.src_lang not in langs or link.tgt_lang not in langs:
            continue
        uf.union((link.src_lang, link.src_title), (link.tgt_lang, link.tgt_title))

    components: dict = {}
    for node in list(uf.parent):
        components.setdefault(uf.find(node), []).append(node)

    clusters = []
    for nodes in components.values():
        if len(nodes) < 2:
            continue
        members: dict[str, str] = {}
        conflict = False
        for lang, title in nodes:
            if lang in members and members[lang] != title:
                conflict = True
                break
            members[lang] = title
        if conflict:
            if counters is not None:
                counters["conflicting_clusters"] = counters.get("conflicting_clusters", 0) + 1
            continue
        if len(members) >= 2:
            clusters.append(TitleCluster(members=members))
    clusters.sort(key=lambda c: c.cluster_id)
    return clusters


def body_token_count(article: Article, lang: str) -> int:
    return sum(count_tokens(p, lang) for sec in article.sections for p in sec.paragraphs)


def lead_token_count(article: Article, lang: str) -> int:
    return sum(count_tokens(p, lang) for p in article.lead)


def build_pairs(
    clusters: Iterable[TitleCluster],
    articles: Callable[[str, str], Article | None],
    cfg: FilterConfig,
    langs: list[str],
    include_monolingual: bool = True,
) -> dict[tuple[str, str], list[SummPair]]:
    """Materialize every ordered cross-lingual set, plus monolingual sets.

    `articles` maps (lang, title) to an Article or None. A pair is emitted
    iff the source body and target lead token counts pass the filters. The
    result always contains all N*(N-1) cross-lingual keys, even when empty.
    """
    keys = [(x, y) for x in langs for y in langs if x != y]
    if include_monolingual:
        keys += [(x, x) for x in langs]
    result: dict[tuple[str, str], list[SummPair]] = {k: [] for k in keys}

    for cluster in clusters:
        cid = cluster.cluster_id
        cached: dict[str, Article | None] = {}
        body_tok: dict[str, int] = {}
        lead_tok: dict[str, int] = {}
        for lang, title in cluster.members.items():
            if lang not in langs:
                continue
            art = articles(lang, title)
            cached[lang] = art
            if art is not None:
                body_tok[lang] = body_token_count(art, lang)
                lead_tok[lang] = lead_token_count(art, lang)
        for (x, y) in keys:
            src = cached.get(x)
            if x == y:
                tgt = src
            else:
                tgt = cached.get(y)
            if src is None or tgt is None:
                continue
            if not (cfg.min_body_tokens <= body_tok[x] <= cfg.max_body_tokens):
                continue
            if not (cfg.min_lead_tokens <= lead_tok[y] <= cfg.max_lead_tokens):
                continue
            result[(x, y)].append(
                SummPair(
                    id=f"{cid}#{x}-{y}",
                    src_lang=x,
                    tgt_lang=y,
                    src_title=cluster.members[x],
                    tgt_title=cluster.members[y],
                    doc=src.sections,
                    summary=tgt.lead,
                    cluster_id=cid,
                )
            )
    return result


def cross_lingual_keys(pair_sets: dict) -> list[tuple[str, str]]:
    return [k for k in pair_sets if k[0] != k[1]]


def select_parallel(
    pair_sets: dict[tuple[str, str], list[SummPair]],
    k: int,
    seed: int,
) -> set[str]:
    """Pick k cluster ids from the intersection of all cross-lingual sets.

    Pairs from chosen clusters are retagged 'parallel' in place; all other
    Wikipedia pairs stay 'comparable'. Deterministic for a given seed.
    """
    xl_keys = cross_lingual_keys(pair_sets)
    if not xl_keys:
        raise ValueError("no cross-lingual sets")
    per_set = [{p.cluster_id for p in pair_sets[key]} for key in xl_keys]
    intersection = set.intersection(*per_set)
    if k > len(intersection):
        raise ValueError(
            f"requested {k} parallel clusters but the intersection has "
            f"only {len(intersection)}"
        )
    ordered = sorted(intersection)
    random.Random(seed).shuffle(ordered)
    chosen = set(ordered[:k])
    for pairs in pair_sets.values():
        for p in pairs:
            p.subset = "parallel" if p.cluster_id in chosen else "comparable"
    return chosen


def split_train_valid(
    pair_sets: dict[tuple[str, str], list[SummPair]],
    valid_fraction: float = 0.05,
    seed: int = 0,
) -> dict[str, str]:
    """Assign splits by cluster id so no cluster straddles train and valid.

    Comparable clusters are shuffled deterministically; round-half-up of
    valid_fraction * cluster count go to valid, the rest to train. Parallel
    pairs are assigned to test.
    """
    if not (0 < valid_fraction < 1):
        raise ValueError("valid_fraction must be in (0, 1)")
    comparable = sorted(
        {p.cluster_id for pairs in pair_sets.values() for p in pairs if p.subset == "comparable"}
    )
    if len(comparable) < 2:
        raise ValueError("need at least 2 comparable clusters to split")
    random.Random(seed).shuffle(comparable)
    n_valid = int(math.floor(valid_fraction * len(comparable) + 0.5))
    valid_ids = set(comparable[:n_valid])

    assignment: dict[str, str] = {}
    for pairs in pair_sets.values():
        for p in pairs:
            if p.subset == "parallel":
                p.split = "test"
            elif p.cluster_id in valid_ids:
                p.split = "valid"
            else:
                p.split = "train"
            assignment[p.cluster_id] = p.split
    return assignment
