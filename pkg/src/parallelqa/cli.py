"""Command-line entry point: ingest, pair, diagnose, eval, stats, export, serve.

Reports go to stdout as JSON (or a text table with --table); everything else —
warnings, skip reports, progress — goes to stderr. Exit codes: 0 success,
2 usage or input error, 1 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import corpusio, diagnostics, evaluation, pairing, topicmodel
from .datastore import (
    AnnotationStore,
    DatasetError,
    compute_stats,
    dumps_pqa,
    load_dataset,
    load_pqa,
    stats_to_dict,
)
from .lexmetrics import DEFAULT_B, DEFAULT_K1, METRICS
from .textproc import tokenize


class InputError(Exception):
    """Bad user input (missing/malformed files); exits with status 2."""


def _out_stream(path: str | None):
    return open(path, "w", encoding="utf-8") if path else sys.stdout


def _load_examples(path: str, fmt: str):
    try:
        dataset, warnings = load_dataset(path, fmt)
    except (DatasetError, OSError) as exc:
        raise InputError(str(exc)) from exc
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    return dataset


def cmd_ingest(args) -> int:
    try:
        docs = corpusio.load_documents(args.input, source=args.source)
    except (corpusio.CorpusError, OSError) as exc:
        raise InputError(str(exc)) from exc
    out = _out_stream(args.out)
    corpusio.write_documents_jsonl(docs, out)
    if out is not sys.stdout:
        out.close()
    print(f"ingested {len(docs)} documents", file=sys.stderr)
    return 0


def cmd_pair(args) -> int:
    try:
        news = corpusio.load_documents(args.news, source="news")
    except (corpusio.CorpusError, OSError) as exc:
        raise InputError(f"news corpus: {exc}") from exc
    if not news:
        raise InputError("empty news corpus")

    entities: list[str] = []
    for doc in news:
        entities.extend(e for e, _ in pairing.extract_entities(doc, args.entities_per_article))
    try:
        wiki_docs = corpusio.load_manifest_documents(args.wiki, entities, source="wiki")
    except (corpusio.CorpusError, OSError) as exc:
        raise InputError(f"wiki corpus: {exc}") from exc
    if not wiki_docs:
        raise InputError("empty wiki pool")

    pool = [f for d in wiki_docs for f in pairing.fragment(d, max_words=args.max_words)]
    if not pool:
        raise InputError("empty wiki pool")

    config = pairing.PairingConfig(
        entities_per_article=args.entities_per_article,
        k_neighbors=args.k,
        tfidf_weight=getattr(args, "lambda"),
        max_words=args.max_words,
        min_score=args.min_score,
        infer_iterations=args.infer_iterations,
        seed=args.seed,
    )
    lda_config = topicmodel.LdaConfig(
        num_topics=args.topics,
        iterations=args.lda_iterations,
        seed=args.seed,
    )
    corpus = [tokenize(d.text) for d in news] + [tokenize(f.text) for f in pool]
    model = topicmodel.train_lda(corpus, lda_config)
    result = pairing.pair_passages(news, pool, model, config)

    out = _out_stream(args.out)
    for pair in result.pairs:
        out.write(json.dumps(vars(pair).copy(), sort_keys=True) + "\n")
    if out is not sys.stdout:
        out.close()
    for skip in result.skipped:
        print(f"skipped {skip.news_id}: {skip.reason}", file=sys.stderr)
    print(f"paired {len(result.pairs)}/{len(news)} news documents", file=sys.stderr)
    return 0


def cmd_diagnose(args) -> int:
    dataset = _load_examples(args.dataset, args.format)
    if not dataset.items:
        raise InputError(f"{args.dataset}: dataset has no QA items")
    metrics = list(METRICS) if args.metric == "all" else [args.metric]
    reports = [
        diagnostics.retrieval_rate(dataset, m, k1=args.k1, b=args.b) for m in metrics
    ]
    payload = (
        diagnostics.render_report_table(reports)
        if args.table
        else diagnostics.render_report_json(reports)
    )
    out = _out_stream(args.out)
    out.write(payload + "\n")
    if out is not sys.stdout:
        out.close()
    print(f"dataset: {dataset.name} ({len(dataset.items)} items)", file=sys.stderr)
    return 0


def cmd_eval(args) -> int:
    dataset = _load_examples(args.dataset, args.format)
    if not dataset.items:
        raise InputError(f"{args.dataset}: dataset has no QA items")
    try:
        predictions = json.loads(Path(args.predictions).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{args.predictions}: {exc}") from exc
    if not isinstance(predictions, dict) or not all(
        isinstance(v, str) for v in predictions.values()
    ):
        raise InputError(f"{args.predictions}: expected a JSON object mapping qa_id to answer")

    report = evaluation.evaluate(dataset, predictions)
    categories = evaluation.categorize_errors(dataset, predictions, metric=args.metric)
    report = evaluation.with_categories(report, categories)
    for qa_id in report.missing:
        print(f"warning: no prediction for {qa_id}; scored 0", file=sys.stderr)
    payload = (
        evaluation.render_report_table(report)
        if args.table
        else evaluation.render_report_json(report)
    )
    out = _out_stream(args.out)
    out.write(payload + "\n")
    if out is not sys.stdout:
        out.close()
    return 0


def cmd_stats(args) -> int:
    try:
        ds = load_pqa(args.dataset)
        stats = compute_stats(ds)
    except (DatasetError, ValueError, OSError) as exc:
        raise InputError(str(exc)) from exc
    out = _out_stream(args.out)
    out.write(json.dumps(stats_to_dict(stats), indent=2, sort_keys=True) + "\n")
    if out is not sys.stdout:
        out.close()
    return 0


def cmd_export(args) -> int:
    store_dir = args.store or os.environ.get("PQA_STORE")
    if not store_dir:
        raise InputError("no store directory (use --store or set PQA_STORE)")
    try:
        store = AnnotationStore(store_dir)
    except DatasetError as exc:
        raise InputError(str(exc)) from exc
    out = _out_stream(args.out)
    out.write(dumps_pqa(store.dataset()) + "\n")
    if out is not sys.stdout:
        out.close()
    store.close()
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    store_dir = args.store or os.environ.get("PQA_STORE")
    if not store_dir:
        raise InputError("no store directory (use --store or set PQA_STORE)")
    dataset = None
    if args.dataset:
        try:
            dataset = load_pqa(args.dataset)
        except DatasetError as exc:
            raise InputError(str(exc)) from exc
    try:
        store = AnnotationStore(store_dir, dataset)
    except DatasetError as exc:
        raise InputError(str(exc)) from exc
    static_dir = args.static or _default_static_dir()
    app = create_app(store, static_dir=static_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _default_static_dir() -> Path | None:
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "static"
    return candidate if candidate.is_dir() else None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pqa", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="normalize a corpus into document JSON-lines")
    p.add_argument("--input", required=True, help="directory of .txt files or a .jsonl file")
    p.add_argument("--source", choices=["news", "wiki", "other"], default="other")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("pair", help="pair news articles with wiki passage fragments")
    p.add_argument("--news", required=True)
    p.add_argument("--wiki", required=True)
    p.add_argument("--entities-per-article", type=int, default=3)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--lambda", type=float, default=0.5, help="weight on tf-idf in the combined score")
    p.add_argument("--topics", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lda-iterations", type=int, default=200)
    p.add_argument("--infer-iterations", type=int, default=100)
    p.add_argument("--max-words", type=int, default=500)
    p.add_argument("--min-score", type=float, default=0.05)
    p.add_argument("--out")
    p.set_defaults(func=cmd_pair)

    p = sub.add_parser("diagnose", help="sentence-retrieval report for a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--metric", choices=list(METRICS) + ["all"], default="jaccard")
    p.add_argument("--format", choices=["auto", "squad", "pqa"], default="auto")
    p.add_argument("--k1", type=float, default=DEFAULT_K1)
    p.add_argument("--b", type=float, default=DEFAULT_B)
    p.add_argument("--table", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("eval", help="EM/F1 scoring of a predictions file")
    p.add_argument("--dataset", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--format", choices=["auto", "squad", "pqa"], default="auto")
    p.add_argument("--metric", choices=list(METRICS), default="jaccard",
                   help="metric used for error categorization")
    p.add_argument("--table", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("stats", help="dataset statistics")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("export", help="export a store's current dataset")
    p.add_argument("--store")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--store")
    p.add_argument("--dataset")
    p.add_argument("--static", help="directory of UI assets to serve at /ui")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 1
    except Exception as exc:  # noqa: BLE001 - contract: internal errors exit 1
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
