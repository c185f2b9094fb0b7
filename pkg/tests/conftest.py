import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fixture_corpus import write_fixture  # noqa: E402
from helpers import run_pipeline  # noqa: E402


@pytest.fixture(scope="session")
def fixture_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("fixture")
    return write_fixture(root)


@pytest.fixture(scope="session")
def built_corpus(fixture_files, tmp_path_factory):
    """Full pipeline run over the bundled mini-dump: ingest, align, build, split."""
    work = tmp_path_factory.mktemp("corpus")
    corpus = run_pipeline(fixture_files, work)
    return {"work": work, "corpus": corpus, "clusters": work / "clusters.jsonl"}
