"""Command-line entry point wiring the pipeline into subcommands.

All outputs are deterministic given identical config and inputs. Sampling
subcommands require an explicit seed (config key or flag); running without
one is a usage error, never a silent nondeterministic run.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import align, baselines, fragments, ingest, rouge, store
from .segment import tokenize

log = logging.getLogger("wikisum")

DEFAULT_LANGUAGES = ["en", "de", "fr", "cs"]

CONFIG_KEYS = {
    "languages": DEFAULT_LANGUAGES,
    "min_body_tokens": 250,
    "max_body_tokens": 5000,
    "min_lead_tokens": 20,
    "max_lead_tokens": 400,
    "parallel_k": 7000,
    "valid_fraction": 0.05,
    "seed": None,
    "lexrank_damping": 0.85,
    "lexrank_epsilon": 1e-6,
    "lexrank_max_iter": 100,
    "budget": 600,
    "rouge_lowercase": True,
    "rouge_mode": "summary-union",
    "jobs": 1,
}


@dataclass
class RunConfig:
    languages: list[str] = field(default_factory=lambda: list(DEFAULT_LANGUAGES))
    min_body_tokens: int = 250
    max_body_tokens: int = 5000
    min_lead_tokens: int = 20
    max_lead_tokens: int = 400
    parallel_k: int = 7000
    valid_fraction: float = 0.05
    seed: int | None = None
    lexrank_damping: float = 0.85
    lexrank_epsilon: float = 1e-6
    lexrank_max_iter: int = 100
    budget: int = 600
    rouge_lowercase: bool = True
    rouge_mode: str = "summary-union"
    jobs: int = 1

    @property
    def filters(self) -> align.FilterConfig:
        return align.FilterConfig(
            self.min_body_tokens, self.max_body_tokens,
            self.min_lead_tokens, self.max_lead_tokens,
        )

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in CONFIG_KEYS}


class DataError(Exception):
    """Input data problem; exits with status 1."""


def load_config(path: str | None, overrides: dict) -> RunConfig:
    cfg = RunConfig()
    if path:
        with open(path, "rb") as f:
            data = tomllib.load(f)
        for key, value in data.items():
            if key not in CONFIG_KEYS:
                raise DataError(f"unknown config key {key!r}")
            setattr(cfg, key, value)
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    if "XWF_JOBS" in os.environ and overrides.get("jobs") is None:
        cfg.jobs = int(os.environ["XWF_JOBS"])
    return cfg


def require_seed(cfg: RunConfig, parser: argparse.ArgumentParser) -> int:
    if cfg.seed is None:
        parser.error("this subcommand samples and needs an explicit --seed (or config 'seed')")
    return cfg.seed


# ---------------------------------------------------------------- subcommands

def cmd_ingest(args, cfg: RunConfig) -> int:
    counters: dict[str, int] = {}
    n = 0

    def articles():
        nonlocal n
        with open(args.dump, "rb") as f:
            for page in ingest.parse_dump(f, args.lang):
                if page.redirect or page.namespace != 0:
                    continue
                art = ingest.extract_article(page, counters)
                if art is None:
                    counters["empty_lead"] = counters.get("empty_lead", 0) + 1
                    continue
                n += 1
                yield art

    store.write_articles(args.output, articles())
    log.info("ingest %s: %d articles, counters=%s", args.dump, n, counters)
    return 0


def cmd_align(args, cfg: RunConfig) -> int:
    counters: dict[str, int] = {}
    with open(args.langlinks, encoding="utf-8") as f:
        links = list(align.load_langlinks(f, args.format, counters))
    clusters = align.build_clusters(links, set(cfg.languages), counters)
    with open(args.output, "w", encoding="utf-8", newline="\n") as f:
        for c in clusters:
            f.write(json.dumps({"members": dict(sorted(c.members.items()))},
                               ensure_ascii=False))
            f.write("\n")
    log.info("align: %d clusters, counters=%s", len(clusters), counters)
    return 0


def _read_clusters(path: str) -> list[align.TitleCluster]:
    clusters = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                clusters.append(align.TitleCluster(members=json.loads(line)["members"]))
    return clusters


def _article_lookup(paths: list[str]):
    index: dict[tuple[str, str], ingest.Article] = {}
    for path in paths:
        for art in store.read_articles(path):
            index[(art.language, art.title)] = art
    return lambda lang, title: index.get((lang, title))


def cmd_build(args, cfg: RunConfig, parser) -> int:
    seed = require_seed(cfg, parser)
    clusters = _read_clusters(args.clusters)
    articles = _article_lookup(args.articles)
    pair_sets = align.build_pairs(clusters, articles, cfg.filters, cfg.languages)
    chosen = align.select_parallel(pair_sets, args.parallel_k or cfg.parallel_k, seed)

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    counts = {}
    for (x, y), pairs in sorted(pair_sets.items()):
        pairs.sort(key=lambda p: p.id)
        name = f"pairs.{x}-{y}.jsonl"
        counts[f"{x}-{y}"] = store.write_pairs(outdir / name, pairs)
    manifest = store.Manifest(
        schema_version=store.SCHEMA_VERSION,
        created=store.deterministic_timestamp([args.clusters, *args.articles]),
        config_hash=store.config_hash(cfg.as_dict()),
        counts=counts,
    )
    store.write_manifest(outdir / "manifest.json", manifest)
    log.info("build: %d parallel clusters, counts=%s", len(chosen), counts)
    return 0


def _corpus_pair_files(corpus: Path) -> list[Path]:
    return sorted(corpus.glob("pairs.*.jsonl"))


def cmd_split(args, cfg: RunConfig, parser) -> int:
    seed = require_seed(cfg, parser)
    corpus = Path(args.corpus)
    files = _corpus_pair_files(corpus)
    if not files:
        raise DataError(f"no pairs.*.jsonl files under {corpus}")
    pair_sets = {}
    for f in files:
        x, y = f.name[len("pairs."):-len(".jsonl")].split("-")
        pair_sets[(x, y)] = list(store.read_pairs(f))
    assignment = align.split_train_valid(pair_sets, args.valid_fraction or cfg.valid_fraction, seed)
    for (x, y), pairs in pair_sets.items():
        store.write_pairs(corpus / f"pairs.{x}-{y}.jsonl", pairs)
    store.write_split_manifest(corpus / "splits.manifest", assignment)
    n_valid = sum(1 for s in assignment.values() if s == "valid")
    log.info("split: %d clusters, %d valid", len(assignment), n_valid)
    return 0


def _mono_summary_lookup(corpus: Path, src_lang: str):
    mono_path = corpus / f"pairs.{src_lang}-{src_lang}.jsonl"
    if not mono_path.exists():
        return lambda pair: None
    summaries = {p.cluster_id: p.summary for p in store.read_pairs(mono_path)}
    return lambda pair: summaries.get(pair.cluster_id)


def cmd_stats(args, cfg: RunConfig) -> int:
    corpus = Path(args.corpus)
    sets = args.set or [
        f.name[len("pairs."):-len(".jsonl")] for f in _corpus_pair_files(corpus)
    ]
    rows = []
    for name in sets:
        x, y = name.split("-")
        pairs = list(store.read_pairs(corpus / f"pairs.{name}.jsonl"))
        if not pairs:
            log.warning("stats: %s is empty, skipped", name)
            continue
        lookup = _mono_summary_lookup(corpus, x)
        stats = fragments.corpus_stats(pairs, lookup, lowercase=cfg.rouge_lowercase)
        rows.append((name, stats))

    with open(args.output, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(("set",) + fragments.TaskStats.CSV_FIELDS)
        for name, stats in rows:
            writer.writerow([name] + stats.csv_row())

    if args.report:
        with open(args.report, "w", encoding="utf-8", newline="\n") as f:
            header = ["metric"] + [name for name, _ in rows]
            f.write("| " + " | ".join(header) + " |\n")
            f.write("|" + "---|" * len(header) + "\n")
            for i, metric in enumerate(fragments.TaskStats.CSV_FIELDS):
                cells = [str(stats.csv_row()[i]) for _, stats in rows]
                f.write("| " + " | ".join([metric] + cells) + " |\n")
    return 0


def _doc_tokenized(pair: align.SummPair, lowercase: bool):
    text = " ".join(p for sec in pair.doc for p in sec.paragraphs)
    return tokenize(text, pair.src_lang, lowercase=lowercase)


def cmd_baseline(args, cfg: RunConfig) -> int:
    corpus_dir = Path(args.pairs).parent
    pairs = list(store.read_pairs(args.pairs))
    mono_lookup = None
    if args.proxy_reference:
        if args.monolingual_pairs:
            summaries = {
                p.cluster_id: p.summary for p in store.read_pairs(args.monolingual_pairs)
            }
            mono_lookup = lambda pair: summaries.get(pair.cluster_id)
        else:
            mono_lookup = None

    score_rows = []
    with open(args.output, "w", encoding="utf-8", newline="\n") as out:
        for pair in pairs:
            doc = _doc_tokenized(pair, cfg.rouge_lowercase)
            ref = tokenize(" ".join(pair.summary), pair.tgt_lang, lowercase=cfg.rouge_lowercase)
            k = len(ref.tokens)
            if args.method == "lead":
                cand_tokens = baselines.lead_baseline(doc.tokens, k)
            elif args.method == "lexrank":
                cand_tokens = baselines.lexrank_baseline(
                    doc.sentences, k,
                    damping=cfg.lexrank_damping,
                    epsilon=cfg.lexrank_epsilon,
                    max_iter=cfg.lexrank_max_iter,
                )
            elif args.method == "ext-oracle":
                proxy = None
                if args.proxy_reference:
                    mono = mono_lookup(pair) if mono_lookup else None
                    if mono is None and pair.src_lang != pair.tgt_lang:
                        mono = _mono_summary_lookup(corpus_dir, pair.src_lang)(pair)
                    if mono is not None:
                        proxy = tokenize(
                            " ".join(mono), pair.src_lang, lowercase=cfg.rouge_lowercase
                        ).tokens
                selection = baselines.ext_oracle(doc.sentences, ref.tokens, proxy)
                cand_tokens = baselines.oracle_tokens(doc.sentences, selection)
            else:
                raise DataError(f"unknown method {args.method!r}")
            out.write(json.dumps({"id": pair.id, "tokens": cand_tokens}, ensure_ascii=False))
            out.write("\n")
            scores = {
                v: s for v, s in (
                    ("R1", rouge.rouge_n(cand_tokens, ref.tokens, 1)),
                    ("R2", rouge.rouge_n(cand_tokens, ref.tokens, 2)),
                    ("RL", rouge.rouge_l(cand_tokens, ref, mode=cfg.rouge_mode)),
                )
            }
            score_rows.append((pair.id, scores))

    with open(args.scores, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["id"] + [f"{v}_{m}" for v in ("R1", "R2", "RL") for m in ("p", "r", "f1")])
        for pid, scores in score_rows:
            writer.writerow([pid] + [
                round(getattr(scores[v], m), 6)
                for v in ("R1", "R2", "RL")
                for m in ("precision", "recall", "f1")
            ])
        if score_rows:
            writer.writerow(["MEAN"] + [
                round(sum(getattr(s[v], m) for _, s in score_rows) / len(score_rows), 6)
                for v in ("R1", "R2", "RL")
                for m in ("precision", "recall", "f1")
            ])
    return 0


def _read_token_records(path: str, lowercase: bool) -> dict[str, list[str]]:
    out = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if "id" not in obj:
                raise DataError(f"{path}:{lineno}: record has no 'id'")
            if "tokens" in obj:
                tokens = [t.lower() for t in obj["tokens"]] if lowercase else obj["tokens"]
            elif "text" in obj:
                tokens = tokenize(obj["text"], lowercase=lowercase).tokens
            else:
                raise DataError(f"{path}:{lineno}: record needs 'tokens' or 'text'")
            out[obj["id"]] = tokens
    return out


def cmd_rouge(args, cfg: RunConfig) -> int:
    cands = _read_token_records(args.candidates, cfg.rouge_lowercase)
    refs = _read_token_records(args.references, cfg.rouge_lowercase)
    shared = sorted(set(cands) & set(refs))
    if not shared:
        raise DataError("no shared ids between candidates and references")
    with open(args.output, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["id"] + [f"{v}_{m}" for v in ("R1", "R2", "RL") for m in ("p", "r", "f1")])
        sums = [0.0] * 9
        for pid in shared:
            scores = [
                rouge.rouge_n(cands[pid], refs[pid], 1),
                rouge.rouge_n(cands[pid], refs[pid], 2),
                rouge.rouge_l(cands[pid], refs[pid], mode=cfg.rouge_mode),
            ]
            vals = [getattr(s, m) for s in scores for m in ("precision", "recall", "f1")]
            sums = [a + b for a, b in zip(sums, vals)]
            writer.writerow([pid] + [round(v, 6) for v in vals])
        writer.writerow(["MEAN"] + [round(v / len(shared), 6) for v in sums])
    return 0


def cmd_extract_paragraphs(args, cfg: RunConfig) -> int:
    corpus_dir = Path(args.pairs).parent
    budget = args.budget or cfg.budget
    pairs = list(store.read_pairs(args.pairs))
    recall_rows = []
    reduced_pairs = []
    for pair in pairs:
        # flatten to (section index, paragraph index) units
        units = []
        keys = []
        for si, sec in enumerate(pair.doc):
            for pi, para in enumerate(sec.paragraphs):
                units.append(tokenize(para, pair.src_lang, lowercase=cfg.rouge_lowercase).tokens)
                keys.append((si, pi))
        if not units:
            reduced_pairs.append(pair)
            continue
        selected = baselines.paragraph_extract(
            units, budget,
            damping=cfg.lexrank_damping,
            epsilon=cfg.lexrank_epsilon,
            max_iter=cfg.lexrank_max_iter,
        )
        keep = {keys[i] for i in selected}
        new_sections = []
        for si, sec in enumerate(pair.doc):
            kept = [p for pi, p in enumerate(sec.paragraphs) if (si, pi) in keep]
            if kept:
                new_sections.append(ingest.Section(sec.heading, sec.level, kept))
        mono = _mono_summary_lookup(corpus_dir, pair.src_lang)(pair) or pair.summary
        ref = tokenize(" ".join(mono), pair.src_lang, lowercase=cfg.rouge_lowercase)
        all_tokens = [t for u in units for t in u]
        extracted = [t for i in selected for t in units[i]][:budget]
        recall_rows.append((
            pair.id,
            rouge.rouge_l_recall_budget(all_tokens, ref, mode=cfg.rouge_mode),
            rouge.rouge_l_recall_budget(extracted, ref, mode=cfg.rouge_mode),
        ))
        reduced = align.SummPair(**{**pair.__dict__, "doc": new_sections})
        reduced_pairs.append(reduced)

    store.write_pairs(args.output, reduced_pairs)
    if args.report:
        with open(args.report, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["id", "recall_all", f"recall_{budget}"])
            for pid, r_all, r_ext in recall_rows:
                writer.writerow([pid, round(r_all, 6), round(r_ext, 6)])
            if recall_rows:
                writer.writerow([
                    "MEAN",
                    round(sum(r[1] for r in recall_rows) / len(recall_rows), 6),
                    round(sum(r[2] for r in recall_rows) / len(recall_rows), 6),
                ])
    return 0


# --------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wikisum",
        description="Build and analyse cross-lingual document-summary corpora "
                    "from Wikipedia dumps.",
    )
    parser.add_argument("--config", help="TOML config file (flat keys)")
    parser.add_argument("--jobs", type=int, default=None,
                        help="worker hint; XWF_JOBS env var is the fallback [config: jobs]")
    parser.add_argument("--seed", type=int, default=None, help="[config: seed]")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a dump into article JSONL",
                       epilog="config keys read: (none beyond globals)")
    p.add_argument("--dump", required=True, help="MediaWiki pages XML export")
    p.add_argument("--lang", required=True)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("align", help="build title clusters from interlanguage links",
                       epilog="config keys read: languages")
    p.add_argument("--langlinks", required=True)
    p.add_argument("--format", choices=("tsv", "sql-insert"), default="tsv")
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("build", help="materialize all pair sets",
                       epilog="config keys read: languages, min/max_body_tokens, "
                              "min/max_lead_tokens, parallel_k, seed")
    p.add_argument("--clusters", required=True)
    p.add_argument("--articles", required=True, nargs="+")
    p.add_argument("--parallel-k", type=int, default=None)
    p.add_argument("--outdir", required=True)

    p = sub.add_parser("split", help="assign cluster-keyed train/valid splits",
                       epilog="config keys read: valid_fraction, seed")
    p.add_argument("--corpus", required=True)
    p.add_argument("--valid-fraction", type=float, default=None)

    p = sub.add_parser("stats", help="task-characterisation statistics",
                       epilog="config keys read: rouge_lowercase")
    p.add_argument("--corpus", required=True)
    p.add_argument("--set", action="append", help="limit to SRC-TGT set(s)")
    p.add_argument("-o", "--output", required=True, help="CSV output")
    p.add_argument("--report", help="markdown table output")

    p = sub.add_parser("baseline", help="run an extractive baseline",
                       epilog="config keys read: rouge_lowercase, rouge_mode, "
                              "lexrank_damping, lexrank_epsilon, lexrank_max_iter")
    p.add_argument("--method", choices=("lead", "lexrank", "ext-oracle"), required=True)
    p.add_argument("--pairs", required=True)
    p.add_argument("--proxy-reference", action="store_true",
                   help="ext-oracle selects against the monolingual summary")
    p.add_argument("--monolingual-pairs", help="pairs.X-X.jsonl for proxy lookup")
    p.add_argument("-o", "--output", required=True, help="candidate JSONL")
    p.add_argument("--scores", required=True, help="scores CSV")

    p = sub.add_parser("rouge", help="score candidates against references",
                       epilog="config keys read: rouge_lowercase, rouge_mode")
    p.add_argument("--candidates", required=True)
    p.add_argument("--references", required=True)
    p.add_argument("-o", "--output", required=True, help="CSV output")

    p = sub.add_parser("extract-paragraphs", help="budgeted LexRank paragraph extraction",
                       epilog="config keys read: budget, rouge_lowercase, rouge_mode, "
                              "lexrank_damping, lexrank_epsilon, lexrank_max_iter")
    p.add_argument("--pairs", required=True)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--report", help="recall report CSV")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = load_config(args.config, {"seed": args.seed, "jobs": args.jobs})
        if args.command == "ingest":
            return cmd_ingest(args, cfg)
        if args.command == "align":
            return cmd_align(args, cfg)
        if args.command == "build":
            return cmd_build(args, cfg, parser)
        if args.command == "split":
            return cmd_split(args, cfg, parser)
        if args.command == "stats":
            return cmd_stats(args, cfg)
        if args.command == "baseline":
            return cmd_baseline(args, cfg)
        if args.command == "rouge":
            return cmd_rouge(args, cfg)
        if args.command == "extract-paragraphs":
            return cmd_extract_paragraphs(args, cfg)
        parser.error(f"unknown subcommand {args.command!r}")
    except (DataError, store.StoreError, ingest.DumpParseError, ValueError, OSError) as exc:
        log.error("%s", exc)
        # drop partial outputs from this run
        for attr in ("output", "scores", "report"):
            path = getattr(args, attr, None)
            if path and os.path.exists(path):
                os.remove(path)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
