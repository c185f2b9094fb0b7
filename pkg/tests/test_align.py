import io

import pytest

from wikisumkit.align import (
    FilterConfig,
    LangLink,
    TitleCluster,
    build_clusters,
    build_pairs,
    load_langlinks,
    select_parallel,
    split_train_valid,
)
from wikisumkit.ingest import Article, Section


class TestLoadLanglinks:
    def test_tsv_row(self):
        links = list(load_langlinks(io.StringIO("Olive_oil\ten\tfr\tHuile_d'olive\n")))
        assert links == [LangLink("Olive_oil", "en", "Huile_d'olive", "fr")]

    def test_empty_file(self):
        assert list(load_langlinks(io.StringIO(""))) == []

    def test_malformed_rows_counted_and_skipped(self):
        counters = {}
        links = list(load_langlinks(io.StringIO("bad row\nA\ten\tfr\tB\n"), "tsv", counters))
        assert len(links) == 1
        assert counters["malformed_links"] == 1

    def test_sql_insert_with_escaped_quote(self):
        stmt = "INSERT INTO `langlinks` VALUES ('Olive_oil','en','fr','Huile_d\\'olive'),('A','en','de','B');\n"
        links = list(load_langlinks(io.StringIO(stmt), "sql-insert"))
        assert links[0].tgt_title == "Huile_d'olive"
        assert links[1] == LangLink("A", "en", "B", "de")

    def test_sql_backslash_escape(self):
        stmt = "INSERT INTO t VALUES ('a\\\\b','en','fr','C');\n"
        links = list(load_langlinks(io.StringIO(stmt), "sql-insert"))
        assert links[0].src_title == "a\\b"

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            list(load_langlinks(io.StringIO(""), "csv"))


LANGS = {"en", "de", "fr", "cs"}


class TestBuildClusters:
    def test_chain_forms_one_cluster(self):
        links = [LangLink("A", "en", "B", "fr"), LangLink("B", "fr", "C", "de")]
        clusters = build_clusters(links, LANGS)
        assert len(clusters) == 1
        assert clusters[0].members == {"en": "A", "fr": "B", "de": "C"}

    def test_single_link(self):
        clusters = build_clusters([LangLink("A", "en", "B", "fr")], LANGS)
        assert clusters[0].members == {"en": "A", "fr": "B"}

    def test_conflicting_component_dropped(self):
        counters = {}
        links = [LangLink("A", "en", "B", "fr"), LangLink("A2", "en", "B", "fr")]
        assert build_clusters(links, LANGS, counters) == []
        assert counters["conflicting_clusters"] == 1

    def test_symmetry_under_link_reversal(self):
        links = [
            LangLink("A", "en", "B", "fr"),
            LangLink("B", "fr", "C", "de"),
            LangLink("D", "en", "E", "cs"),
        ]
        reversed_links = [
            LangLink(l.tgt_title, l.tgt_lang, l.src_title, l.src_lang) for l in links
        ]
        forward = build_clusters(links, LANGS)
        backward = build_clusters(reversed_links, LANGS)
        assert [c.members for c in forward] == [c.members for c in backward]

    def test_languages_outside_set_ignored(self):
        clusters = build_clusters([LangLink("A", "en", "B", "xx")], LANGS)
        assert clusters == []


def fake_article(lang, title, body_tokens=300, lead_tokens=30):
    # token counts: each "word" is one token
    lead = [" ".join(f"{lang}l{i}" for i in range(lead_tokens))]
    body = [" ".join(f"{lang}b{i}" for i in range(body_tokens))]
    return Article(
        title=title, language=lang, lead=lead,
        sections=[Section("History", 2, body)],
    )


def make_store(langs, titles, overrides=None):
    overrides = overrides or {}
    index = {}
    for lang in langs:
        for t in titles:
            kwargs = overrides.get((lang, t), {})
            index[(lang, f"{t}_{lang}")] = fake_article(lang, f"{t}_{lang}", **kwargs)
    return lambda lang, title: index.get((lang, title))


def full_clusters(langs, titles):
    return [TitleCluster({l: f"{t}_{l}" for l in langs}) for t in titles]


LANG_LIST = ["en", "de", "fr", "cs"]


class TestBuildPairs:
    def test_twelve_cross_lingual_keys(self):
        sets = build_pairs([], lambda l, t: None, FilterConfig(), LANG_LIST)
        assert sum(1 for (x, y) in sets if x != y) == 12
        assert sum(1 for (x, y) in sets if x == y) == 4

    def test_six_full_clusters_everywhere(self):
        titles = [f"T{i}" for i in range(6)]
        sets = build_pairs(
            full_clusters(LANG_LIST, titles), make_store(LANG_LIST, titles),
            FilterConfig(), LANG_LIST,
        )
        for key, pairs in sets.items():
            assert len(pairs) == 6, key

    def test_short_body_excluded_as_source(self):
        titles = ["T"]
        store = make_store(LANG_LIST, titles, {("en", "T"): {"body_tokens": 100}})
        sets = build_pairs(full_clusters(LANG_LIST, titles), store, FilterConfig(), LANG_LIST)
        assert sets[("en", "de")] == [] and sets[("en", "en")] == []
        assert len(sets[("de", "en")]) == 1

    def test_lead_out_of_range_excluded_as_target(self):
        titles = ["T"]
        store = make_store(LANG_LIST, titles, {("fr", "T"): {"lead_tokens": 500}})
        sets = build_pairs(full_clusters(LANG_LIST, titles), store, FilterConfig(), LANG_LIST)
        assert sets[("en", "fr")] == []
        assert len(sets[("fr", "en")]) == 1

    def test_missing_article_ignored(self):
        clusters = full_clusters(LANG_LIST, ["T"])
        store = make_store(["en", "de", "fr"], ["T"])  # no cs article
        sets = build_pairs(clusters, store, FilterConfig(), LANG_LIST)
        assert sets[("en", "cs")] == [] and sets[("cs", "en")] == []
        assert len(sets[("en", "de")]) == 1

    def test_emitted_pairs_satisfy_filters(self):
        titles = [f"T{i}" for i in range(3)]
        cfg = FilterConfig()
        sets = build_pairs(full_clusters(LANG_LIST, titles), make_store(LANG_LIST, titles), cfg, LANG_LIST)
        from wikisumkit.segment import count_tokens
        for pairs in sets.values():
            for p in pairs:
                body = sum(count_tokens(t, p.src_lang) for s in p.doc for t in s.paragraphs)
                lead = sum(count_tokens(t, p.tgt_lang) for t in p.summary)
                assert cfg.min_body_tokens <= body <= cfg.max_body_tokens
                assert cfg.min_lead_tokens <= lead <= cfg.max_lead_tokens


class TestFilterConfig:
    def test_defaults(self):
        cfg = FilterConfig()
        assert (cfg.min_body_tokens, cfg.max_body_tokens) == (250, 5000)
        assert (cfg.min_lead_tokens, cfg.max_lead_tokens) == (20, 400)

    def test_invalid_range(self):
        with pytest.raises(ValueError):
            FilterConfig(min_body_tokens=500, max_body_tokens=100)


def built_sets(n_full=6, n_partial=0):
    titles = [f"T{i}" for i in range(n_full)]
    clusters = full_clusters(LANG_LIST, titles)
    partial = [f"P{i}" for i in range(n_partial)]
    clusters += [TitleCluster({l: f"{t}_{l}" for l in ("en", "de")}) for t in partial]
    store = make_store(LANG_LIST, titles + partial)
    return build_pairs(clusters, store, FilterConfig(), LANG_LIST)


class TestSelectParallel:
    def test_exhaustive_sample_ignores_seed(self):
        sets = built_sets(4)
        a = select_parallel(sets, 4, seed=1)
        b = select_parallel(sets, 4, seed=999)
        assert a == b and len(a) == 4

    def test_k_too_large(self):
        sets = built_sets(3)
        with pytest.raises(ValueError, match="only 3"):
            select_parallel(sets, 10, seed=1)

    def test_deterministic_per_seed(self):
        assert select_parallel(built_sets(6), 2, seed=5) == select_parallel(built_sets(6), 2, seed=5)

    def test_partial_clusters_never_parallel(self):
        sets = built_sets(4, n_partial=3)
        chosen = select_parallel(sets, 4, seed=0)
        assert len(chosen) == 4
        for pairs in sets.values():
            for p in pairs:
                expected = "parallel" if p.cluster_id in chosen else "comparable"
                assert p.subset == expected


class TestSplitTrainValid:
    def test_exact_fraction(self):
        sets = built_sets(6, n_partial=94)  # 100 comparable clusters
        select_parallel(sets, 6, seed=0)
        assignment = split_train_valid(sets, 0.05, seed=1)
        valid = {c for c, s in assignment.items() if s == "valid"}
        assert len(valid) == 5

    def test_round_half_up(self):
        sets = built_sets(3)
        # all comparable (no parallel tagging): round(3 * 0.5) = round(1.5) -> 2
        assignment = split_train_valid(sets, 0.5, seed=2)
        assert sum(1 for s in assignment.values() if s == "valid") == 2

    def test_seed_changes_membership_not_counts(self):
        sets_a = built_sets(6, n_partial=34)
        sets_b = built_sets(6, n_partial=34)
        a = split_train_valid(sets_a, 0.1, seed=1)
        b = split_train_valid(sets_b, 0.1, seed=2)
        count = lambda assignment: sorted(
            (s, sum(1 for v in assignment.values() if v == s)) for s in set(assignment.values())
        )
        assert count(a) == count(b)
        assert a != b

    def test_no_leakage_across_directions(self):
        sets = built_sets(6, n_partial=4)
        select_parallel(sets, 2, seed=3)
        split_train_valid(sets, 0.25, seed=3)
        seen: dict[str, str] = {}
        for pairs in sets.values():
            for p in pairs:
                assert seen.setdefault(p.cluster_id, p.split) == p.split

    def test_parallel_assigned_test(self):
        sets = built_sets(6)
        select_parallel(sets, 2, seed=1)
        split_train_valid(sets, 0.25, seed=1)
        for pairs in sets.values():
            for p in pairs:
                if p.subset == "parallel":
                    assert p.split == "test"

    def test_too_few_clusters(self):
        sets = built_sets(2)
        select_parallel(sets, 1, seed=0)
        with pytest.raises(ValueError):
            split_train_valid(sets, 0.5, seed=0)
