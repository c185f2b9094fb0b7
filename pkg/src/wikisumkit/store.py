"""JSONL persistence for every pipeline artifact, plus a loader for
external (non-Wikipedia) corpora. All writes are deterministic: stable
field order, sorted records where order is not meaningful, '\\n' line ends."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator

from .align import SummPair
from .ingest import Article, Section

SCHEMA_VERSION = 1


class StoreError(Exception):
    pass


@dataclass
class Manifest:
    schema_version: int
    created: str
    config_hash: str
    counts: dict[str, int]


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, ensure_ascii=False).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def deterministic_timestamp(input_paths: Iterable[str | Path]) -> str:
    """Newest input mtime as UTC ISO, so reruns on the same inputs agree."""
    mtimes = [os.path.getmtime(p) for p in input_paths if os.path.exists(p)]
    stamp = max(mtimes) if mtimes else 0.0
    return datetime.fromtimestamp(int(stamp), tz=timezone.utc).isoformat()


def _pair_to_json(pair: SummPair) -> dict:
    return {
        "id": pair.id,
        "src_lang": pair.src_lang,
        "tgt_lang": pair.tgt_lang,
        "src_title": pair.src_title,
        "tgt_title": pair.tgt_title,
        "doc": {
            "sections": [
                {"heading": s.heading, "level": s.level, "paragraphs": s.paragraphs}
                for s in pair.doc
            ]
        },
        "summary": pair.summary,
        "subset": pair.subset,
        "split": pair.split,
        "cluster_id": pair.cluster_id,
    }


_PAIR_FIELDS = ("id", "src_lang", "tgt_lang", "src_title", "tgt_title",
                "doc", "summary", "subset", "split")


def write_pairs(path: str | Path, pairs: Iterable[SummPair]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for pair in pairs:
            f.write(json.dumps(_pair_to_json(pair), ensure_ascii=False))
            f.write("\n")
            n += 1
    return n


def read_pairs(path: str | Path) -> Iterator[SummPair]:
    """Stream pairs back, validating required fields per line."""
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise StoreError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            missing = [k for k in _PAIR_FIELDS if k not in obj]
            if missing:
                raise StoreError(f"{path}:{lineno}: missing fields {missing}")
            yield SummPair(
                id=obj["id"],
                src_lang=obj["src_lang"],
                tgt_lang=obj["tgt_lang"],
                src_title=obj["src_title"],
                tgt_title=obj["tgt_title"],
                doc=[
                    Section(s["heading"], s["level"], s["paragraphs"])
                    for s in obj["doc"]["sections"]
                ],
                summary=obj["summary"],
                subset=obj["subset"],
                split=obj["split"],
                cluster_id=obj.get("cluster_id", ""),
            )


def write_articles(path: str | Path, articles: Iterable[Article]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for art in articles:
            obj = {
                "lang": art.language,
                "title": art.title,
                "lead": art.lead,
                "sections": [
                    {"heading": s.heading, "level": s.level, "paragraphs": s.paragraphs}
                    for s in art.sections
                ],
            }
            f.write(json.dumps(obj, ensure_ascii=False))
            f.write("\n")
            n += 1
    return n


def read_articles(path: str | Path) -> Iterator[Article]:
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise StoreError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            missing = [k for k in ("lang", "title", "lead", "sections") if k not in obj]
            if missing:
                raise StoreError(f"{path}:{lineno}: missing fields {missing}")
            yield Article(
                title=obj["title"],
                language=obj["lang"],
                lead=obj["lead"],
                sections=[
                    Section(s["heading"], s["level"], s["paragraphs"])
                    for s in obj["sections"]
                ],
            )


def write_manifest(path: str | Path, manifest: Manifest) -> None:
    obj = {
        "schema_version": manifest.schema_version,
        "created": manifest.created,
        "config_hash": manifest.config_hash,
        "counts": dict(sorted(manifest.counts.items())),
    }
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(obj, f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")


def read_manifest(path: str | Path) -> Manifest:
    with open(path, encoding="utf-8") as f:
        obj = json.load(f)
    version = obj.get("schema_version")
    if version != SCHEMA_VERSION:
        raise StoreError(
            f"schema version mismatch: file has {version}, expected {SCHEMA_VERSION}"
        )
    return Manifest(
        schema_version=version,
        created=obj["created"],
        config_hash=obj["config_hash"],
        counts=obj["counts"],
    )


def write_split_manifest(path: str | Path, assignment: dict[str, str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for cid in sorted(assignment):
            f.write(f"{cid}\t{assignment[cid]}\n")


def read_split_manifest(path: str | Path) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line:
                continue
            cid, split = line.rsplit("\t", 1)
            out[cid] = split
    return out


def load_external_corpus(path: str | Path, mapping: dict[str, str]) -> Iterator[SummPair]:
    """Load an out-of-domain JSONL corpus via a user-declared field mapping.

    mapping keys: doc, summary, src_lang, tgt_lang -> field names in the
    external records. External corpora bypass the Wikipedia length filters.
    """
    required = ("doc", "summary", "src_lang", "tgt_lang")
    for key in required:
        if key not in mapping:
            raise StoreError(f"mapping is missing the {key!r} entry")
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            for key in required:
                if mapping[key] not in obj:
                    raise StoreError(
                        f"{path}:{lineno}: record has no field {mapping[key]!r}"
                    )
            doc = obj[mapping["doc"]]
            summary = obj[mapping["summary"]]
            doc_paragraphs = [doc] if isinstance(doc, str) else list(doc)
            summary_paras = [summary] if isinstance(summary, str) else list(summary)
            yield SummPair(
                id=f"external-{lineno}",
                src_lang=obj[mapping["src_lang"]],
                tgt_lang=obj[mapping["tgt_lang"]],
                src_title="",
                tgt_title="",
                doc=[Section(heading="body", level=2, paragraphs=doc_paragraphs)],
                summary=summary_paras,
                subset="external",
            )
