"""Command-line interface orchestrating the sub-event pipeline.

Each subcommand reads its inputs from the files named in the config and
the artifacts of the prior stage, so any stage can be re-run on its own.
Exit codes: 0 success, 1 usage or configuration error, 2 data or format
error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from ._util import sha256_file
from .cluster import build_affinity, spectral_cluster, summarize_clusters, write_clusters
from .config import OVERRIDABLE, PipelineConfig, apply_override, load_config
from .corpus import (
    Corpus,
    LabelMode,
    attach_parses,
    concat_corpora,
    dedupe_corpus,
    load_corpus,
    load_parses,
    load_stopwords,
    preprocess_corpus,
)
from .embed import EmbeddingStore, OovPolicy, compose, load_vectors
from .errors import ConfigError, SubeventsError
from .evaluate import evaluate_at_k, read_metrics, roc_points, write_metrics
from .extract import (
    PhraseConfig,
    detect_phrases,
    extract_nv_pairs,
    extract_nv_pairs_fallback,
    filter_candidates,
    load_pos_lexicon,
    read_candidates,
    reduction_percent,
    write_candidates,
)
from .rank import load_ontology, rank_baseline_overlap, rank_candidates, read_ranked, top_k, write_ranked
from .report import f1_plot_svg, roc_plot_svg

logger = logging.getLogger(__name__)

ARTIFACTS = {
    "candidates": "candidates.csv",
    "accounting": "accounting.json",
    "ranked": "ranked.csv",
    "clusters": "clusters.json",
    "metrics": "metrics.csv",
    "f1_plot": "report_f1.svg",
    "roc_plot": "report_roc.svg",
    "manifest": "manifest.json",
}


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors, but 2 is reserved for
    data errors here, so usage problems are remapped to exit 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="JSON config file")
    parser.add_argument(
        "--threads", type=int, default=1, metavar="N",
        help="worker cap for parallel stages; outputs are identical for any N",
    )
    parser.add_argument(
        "--seed", type=int, default=None, metavar="N",
        help="override cluster.seed, the single source of randomness",
    )
    parser.add_argument(
        "--dedupe", nargs="?", const="true", default=None, metavar="BOOL",
        help="drop exact duplicate tweet texts before extraction",
    )
    parser.add_argument("--verbose", action="store_true", help="log progress details")
    for dotted in OVERRIDABLE:
        if dotted == "dedupe":
            continue
        parser.add_argument(
            f"--{dotted}", default=None, metavar="VALUE", dest=dotted,
            help=argparse.SUPPRESS,
        )


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="subevents",
        description="Detect, rank, and cluster crisis sub-events from tweet corpora.",
        epilog=(
            "Any config key can be overridden with a flag of the same dotted "
            "name, e.g. --cluster.k 40 or --phrase.threshold 12.5."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, help_text in [
        ("extract", "extract and filter candidate sub-events"),
        ("rank", "rank candidates against the crisis term list"),
        ("cluster", "group top-ranked candidates into sub-event clusters"),
        ("evaluate", "score the ranking against labeled tweets"),
        ("pipeline", "run extract, rank, cluster, and evaluate in sequence"),
        ("report", "render F1 and ROC plots from the metrics artifact"),
    ]:
        _add_common(sub.add_parser(name, help=help_text, epilog=parser.epilog))
    return parser


def _resolve_config(args: argparse.Namespace) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else PipelineConfig()
    values = vars(args)
    for dotted in OVERRIDABLE:
        raw = values.get(dotted)
        if raw is not None:
            apply_override(cfg, dotted, raw)
    if args.seed is not None:
        cfg.cluster.seed = args.seed
    cfg.validate()
    return cfg


def _artifact(out_dir: Path, name: str) -> Path:
    return out_dir / ARTIFACTS[name]


def _require_artifact(out_dir: Path, name: str, producer: str) -> Path:
    path = _artifact(out_dir, name)
    if not path.exists():
        raise ConfigError(f"{path} not found; run the {producer} stage first")
    return path


def _load_combined_corpus(cfg: PipelineConfig, stopwords: frozenset[str], threads: int) -> Corpus:
    """Unlabeled corpus with the labeled corpus appended, preprocessed, and
    (when configured) with dependency parses attached."""
    paths = cfg.paths
    if not paths.corpus_unlabeled and not paths.corpus_labeled:
        raise ConfigError("set paths.corpus_unlabeled and/or paths.corpus_labeled")
    parts = []
    if paths.corpus_unlabeled:
        parts.append(load_corpus(paths.corpus_unlabeled, LabelMode.UNLABELED))
    if paths.corpus_labeled:
        parts.append(load_corpus(paths.corpus_labeled, LabelMode.LABELED))
    corpus = concat_corpora(*parts)
    if cfg.dedupe:
        before = len(corpus)
        corpus = dedupe_corpus(corpus)
        logger.info("dedupe removed %d duplicate tweets", before - len(corpus))
    corpus = preprocess_corpus(corpus, stopwords, threads)
    if paths.parses:
        corpus = attach_parses(corpus, load_parses(paths.parses))
    return corpus


def _load_store(cfg: PipelineConfig) -> EmbeddingStore:
    if not cfg.paths.vectors:
        raise ConfigError("paths.vectors is required for ranking and clustering")
    return load_vectors(
        cfg.paths.vectors,
        OovPolicy(cfg.rank.oov_policy),
        hash_seed=cfg.cluster.seed,
    )


def cmd_extract(cfg: PipelineConfig, threads: int, out_dir: Path) -> None:
    lexicon = load_pos_lexicon(cfg.paths.lexicon) if cfg.paths.lexicon else None
    if cfg.paths.parses is None and lexicon is None:
        raise ConfigError(
            "noun-verb extraction needs dependency parses (paths.parses) or a "
            "part-of-speech lexicon (paths.lexicon); point one of them at a file"
        )
    stopwords = load_stopwords(cfg.paths.stopwords)
    corpus = _load_combined_corpus(cfg, stopwords, threads)
    nv = []
    parsed = 0
    for tweet in corpus.tweets:
        if tweet.parse is not None:
            parsed += 1
            nv.extend(extract_nv_pairs(tweet, stopwords))
        elif lexicon is not None:
            nv.extend(extract_nv_pairs_fallback(tweet, lexicon))
    if parsed == 0 and lexicon is None:
        logger.warning("no tweet ids matched the parse file; zero noun-verb pairs")
    phrases = detect_phrases(corpus, PhraseConfig(cfg.phrase.min_count, cfg.phrase.threshold))
    result = filter_candidates(nv, phrases, cfg.filter_min_freq)
    write_candidates(result.candidates, _artifact(out_dir, "candidates"))
    accounting = {
        "tweets": len(corpus),
        "skipped_lines": corpus.skipped,
        "nv_before": result.nv_before,
        "nv_after": result.nv_after,
        "nv_reduction_percent": reduction_percent(result.nv_before, result.nv_after),
        "phrases": result.phrase_count,
        "candidates_before": result.nv_before + result.phrase_count,
        "total": result.total,
        "overall_reduction_percent": reduction_percent(
            result.nv_before + result.phrase_count, result.total
        ),
        "overlap": result.overlap,
    }
    with open(_artifact(out_dir, "accounting"), "w", encoding="utf-8") as fh:
        json.dump(accounting, fh, indent=2)
        fh.write("\n")
    print("extraction accounting:")
    print(f"  tweets processed:  {accounting['tweets']}")
    print(
        f"  nv pairs (unique): {result.nv_before} -> {result.nv_after}"
        f" ({accounting['nv_reduction_percent']:.2f}% reduction)"
    )
    print(f"  phrases:           {result.phrase_count}")
    print(
        f"  candidates:        {accounting['candidates_before']} -> {result.total}"
        f" ({accounting['overall_reduction_percent']:.2f}% reduction)"
    )


def cmd_rank(cfg: PipelineConfig, threads: int, out_dir: Path) -> None:
    candidates = read_candidates(_require_artifact(out_dir, "candidates", "extract"))
    if cfg.rank.method == "baseline":
        stopwords = load_stopwords(cfg.paths.stopwords)
        corpus = _load_combined_corpus(cfg, stopwords, threads)
        ranked = rank_baseline_overlap(candidates, corpus, cfg.rank.discount)
    else:
        store = _load_store(cfg)
        ontology = load_ontology(cfg.paths.ontology, store, cfg.rank.normalize_words)
        ranked = rank_candidates(candidates, ontology, store, cfg.rank.normalize_words)
    write_ranked(ranked, _artifact(out_dir, "ranked"))
    print(f"ranked {len(ranked)} candidates with the {cfg.rank.method} method")


def cmd_cluster(cfg: PipelineConfig, threads: int, out_dir: Path) -> None:
    if cfg.cluster.k is None:
        raise ConfigError("cluster.k is required: choose the number of sub-event clusters")
    ranked = read_ranked(_require_artifact(out_dir, "ranked", "rank"))
    top = top_k(ranked, cfg.cluster.top_m)
    store = _load_store(cfg)
    kept = []
    vectors = []
    for rc in top:
        vec = compose(list(rc.candidate.words), store, cfg.rank.normalize_words)
        if vec.is_null:
            continue
        kept.append(rc)
        vectors.append(vec)
    if len(kept) < len(top):
        logger.info(
            "%d of %d top candidates have no vector and stay unclustered",
            len(top) - len(kept), len(top),
        )
    affinity = build_affinity(vectors)
    assignment = spectral_cluster(
        affinity, cfg.cluster.k, cfg.cluster.seed, cfg.cluster.normalized
    )
    summaries = summarize_clusters(assignment, kept, vectors)
    write_clusters(summaries, _artifact(out_dir, "clusters"))
    print(f"clustered {len(kept)} candidates into {len(summaries)} clusters")


def cmd_evaluate(cfg: PipelineConfig, threads: int, out_dir: Path) -> None:
    if not cfg.paths.corpus_labeled:
        raise ConfigError("paths.corpus_labeled is required for evaluation")
    ranked = read_ranked(_require_artifact(out_dir, "ranked", "rank"))
    stopwords = load_stopwords(cfg.paths.stopwords)
    labeled = load_corpus(cfg.paths.corpus_labeled, LabelMode.LABELED)
    labeled = preprocess_corpus(labeled, stopwords, threads)
    metrics = evaluate_at_k(
        ranked, labeled, list(cfg.eval.ks),
        nv_mode=cfg.eval.nv_match, phrase_mode=cfg.eval.phrase_match,
    )
    write_metrics(metrics, _artifact(out_dir, "metrics"))
    best = max(metrics, key=lambda m: m.f1)
    curve = roc_points(metrics)
    print(
        f"evaluated {len(metrics)} cuts: best f1 {best.f1:.4f} at k={best.k},"
        f" auc {curve.auc:.4f}"
    )


def cmd_report(cfg: PipelineConfig, threads: int, out_dir: Path) -> None:
    metrics = read_metrics(_require_artifact(out_dir, "metrics", "evaluate"))
    curve = roc_points(metrics)
    _artifact(out_dir, "f1_plot").write_text(f1_plot_svg(metrics), encoding="utf-8")
    _artifact(out_dir, "roc_plot").write_text(roc_plot_svg(curve), encoding="utf-8")
    print(f"wrote {ARTIFACTS['f1_plot']} and {ARTIFACTS['roc_plot']} (auc {curve.auc:.4f})")


def _input_hashes(cfg: PipelineConfig) -> dict:
    hashes = {}
    for field in ("corpus_labeled", "corpus_unlabeled", "parses", "vectors",
                  "ontology", "stopwords", "lexicon"):
        value = getattr(cfg.paths, field)
        if value:
            hashes[field] = {"path": value, "sha256": sha256_file(value)}
    return hashes


def cmd_pipeline(cfg: PipelineConfig, threads: int, out_dir: Path) -> None:
    # Fail on configuration gaps before any stage runs.
    if cfg.cluster.k is None:
        raise ConfigError("cluster.k is required: choose the number of sub-event clusters")
    if not cfg.paths.corpus_labeled:
        raise ConfigError("paths.corpus_labeled is required: evaluation needs labels")
    if not cfg.paths.vectors:
        raise ConfigError("paths.vectors is required for ranking and clustering")
    stages = [
        ("extract", cmd_extract),
        ("rank", cmd_rank),
        ("cluster", cmd_cluster),
        ("evaluate", cmd_evaluate),
    ]
    timings = {}
    start = time.perf_counter()
    for name, handler in stages:
        stage_start = time.perf_counter()
        handler(cfg, threads, out_dir)
        timings[name] = round(time.perf_counter() - stage_start, 6)
    total = round(time.perf_counter() - start, 6)
    manifest = {
        "tool_version": __version__,
        "config": cfg.to_dict(),
        "inputs": _input_hashes(cfg),
        "artifacts": {
            name: {
                "path": ARTIFACTS[name],
                "sha256": sha256_file(str(_artifact(out_dir, name))),
            }
            for name in ("candidates", "accounting", "ranked", "clusters", "metrics")
        },
        "stage_seconds": timings,
        "total_seconds": total,
    }
    with open(_artifact(out_dir, "manifest"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    print(f"pipeline complete in {total:.2f}s; manifest at {_artifact(out_dir, 'manifest')}")


COMMANDS = {
    "extract": cmd_extract,
    "rank": cmd_rank,
    "cluster": cmd_cluster,
    "evaluate": cmd_evaluate,
    "pipeline": cmd_pipeline,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        cfg = _resolve_config(args)
        out_dir = Path(cfg.paths.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](cfg, args.threads, out_dir)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SubeventsError, OSError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
