"""Shared pipeline driver used by conftest and the acceptance suite."""

from fixture_corpus import LANGS

from wikisumkit.cli import main


def run_pipeline(fixture_files, work, build_seed=11, split_seed=7, parallel_k=2):
    """ingest -> align -> build -> split over the fixture; returns the corpus dir."""
    articles = []
    for lang in LANGS:
        out = work / f"articles.{lang}.jsonl"
        rc = main([
            "ingest", "--dump", str(fixture_files["dumps"][lang]),
            "--lang", lang, "-o", str(out),
        ])
        assert rc == 0
        articles.append(str(out))
    clusters = work / "clusters.jsonl"
    assert main([
        "align", "--langlinks", str(fixture_files["langlinks"]),
        "--format", "tsv", "-o", str(clusters),
    ]) == 0
    corpus = work / "corpus"
    assert main([
        "--seed", str(build_seed), "build", "--clusters", str(clusters),
        "--articles", *articles, "--parallel-k", str(parallel_k),
        "--outdir", str(corpus),
    ]) == 0
    assert main(["--seed", str(split_seed), "split", "--corpus", str(corpus)]) == 0
    return corpus
