"""``revex`` command line.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 internal error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from revex import __version__, jsonio
from revex.config import PipelineConfig, load_config, with_overrides
from revex.corpusgen import POSITIVE, TrainingCorpus, build_gold_standard, load_queries, reference_summary
from revex.errors import ConfigError, DataError, SingleClassError
from revex.evalkit import evaluate, extract_sentences, load_gold, load_predictions, report_json, report_table
from revex.featurize import fit_feature_space
from revex.linsvm import LinearModel, train
from revex.modelsel import grid_search_C, write_trace
from revex.synth import SynthSpec, write_synthetic
from revex.textcore import load_document, load_documents

log = logging.getLogger("revex")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3
_METRIC_NAMES = {"recall": "recall_positive", "accuracy": "accuracy"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p, *, thresholds=False, grid=False):
    p.add_argument("--config", help="JSON config file; flags override it")
    p.add_argument("--seed", type=int)
    p.add_argument("--element-kind")
    if thresholds:
        p.add_argument("--alpha", type=float, help="positive band below the top score (default 0.2)")
        p.add_argument("--beta", type=float, help="maximum score of a negative (default 0.005)")
        p.add_argument("--min-match-floor", type=float)
    if grid:
        p.add_argument("--metric", choices=sorted(_METRIC_NAMES))
        p.add_argument("--k", type=int, help="cross-validation folds (default 10)")
        p.add_argument("--c-low", type=float)
        p.add_argument("--c-high", type=float)
        p.add_argument("--refinement-decimals", type=int)
        p.add_argument("--tolerance", type=float)
        p.add_argument("--max-iterations", type=int)
        p.add_argument("--trace", help="JSON-lines file for the grid-search trace")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="revex", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"revex {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build-corpus", help="label reference sentences from review records")
    _common(p, thresholds=True)
    p.add_argument("--reviews", help="review records JSON")
    p.add_argument("--articles", help="directory of <reference_id>.txt files")
    p.add_argument("--out", help="corpus JSON to write")

    p = sub.add_parser("train", help="train the SVM on a corpus")
    _common(p, grid=True)
    p.add_argument("--corpus")
    p.add_argument("--out", help="model JSON to write")
    p.add_argument("--C", dest="C", type=float)
    p.add_argument("--grid", action="store_true", help="choose C by cross-validated grid search")
    p.add_argument("--binary-features", action="store_true", default=None)

    p = sub.add_parser("select-model", help="grid-search C without writing a model")
    _common(p, grid=True)
    p.add_argument("--corpus")
    p.add_argument("--binary-features", action="store_true", default=None)

    p = sub.add_parser("extract", help="find data-element sentences in new articles")
    _common(p)
    p.add_argument("--model")
    p.add_argument("articles", nargs="*", help="article files or directories")
    p.add_argument("--out", help="predictions JSON to write")

    p = sub.add_parser("evaluate", help="score predictions against gold indices")
    _common(p)
    p.add_argument("--predictions", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--out", help="report JSON to write")
    p.add_argument("--table", help="plain-text report to write")

    p = sub.add_parser("synth", help="generate a synthetic review corpus")
    _common(p)
    p.add_argument("--out", required=True, help="output directory")
    defaults = SynthSpec()
    p.add_argument("--n-reviews", type=int, default=defaults.n_reviews)
    p.add_argument("--refs-per-review", type=int, default=defaults.refs_per_review)
    p.add_argument("--sentences-per-article", type=int, default=defaults.sentences_per_article)
    p.add_argument("--vocabulary-size", type=int, default=defaults.vocabulary_size)
    p.add_argument("--paraphrase-noise", type=float, default=defaults.paraphrase_noise)
    p.add_argument("--n-test-articles", type=int, default=defaults.n_test_articles)
    p.add_argument("--distractors-per-article", type=int, default=defaults.distractors_per_article)

    p = sub.add_parser("annotate", help="print an article's numbered sentences")
    p.add_argument("article")
    return parser


def _config(args) -> PipelineConfig:
    cfg = load_config(getattr(args, "config", None))
    top = {
        "seed": getattr(args, "seed", None),
        "element_kind": getattr(args, "element_kind", None),
        "alpha": getattr(args, "alpha", None),
        "beta": getattr(args, "beta", None),
        "min_match_floor": getattr(args, "min_match_floor", None),
        "binary_features": getattr(args, "binary_features", None),
    }
    metric = getattr(args, "metric", None)
    grid = {
        "metric": _METRIC_NAMES[metric] if metric else None,
        "k": getattr(args, "k", None),
        "c_low": getattr(args, "c_low", None),
        "c_high": getattr(args, "c_high", None),
        "refinement_decimals": getattr(args, "refinement_decimals", None),
        "tolerance": getattr(args, "tolerance", None),
        "max_iterations": getattr(args, "max_iterations", None),
    }
    return with_overrides(cfg, top, grid)


def _need(value, flag):
    if value is None:
        raise ConfigError(f"{flag} is required (flag or config file)")
    return value


def cmd_build_corpus(args, cfg: PipelineConfig) -> int:
    reviews = _need(args.reviews or cfg.reviews, "--reviews")
    articles = _need(args.articles or cfg.articles, "--articles")
    out = _need(args.out or cfg.corpus, "--out")
    queries = load_queries(reviews, cfg.element_kind)
    if not queries:
        raise DataError(f"no review records with element_kind {cfg.element_kind!r} in {reviews}")
    documents = load_documents(articles)
    corpus = build_gold_standard(queries, documents, cfg.alpha, cfg.beta, cfg.min_match_floor,
                                 element_kind=cfg.element_kind)
    corpus.save(out)
    print(f"element_kind={cfg.element_kind} alpha={cfg.alpha!r} beta={cfg.beta!r} "
          f"min_match_floor={cfg.min_match_floor!r}")
    print(f"{'reference':<24} {'positives':>9} {'negatives':>9}")
    for ref, n_pos, n_neg in reference_summary(corpus):
        print(f"{ref:<24} {n_pos:>9} {n_neg:>9}")
    print(f"{'total':<24} {len(corpus.positives):>9} {len(corpus.negatives):>9}")
    return EXIT_OK


def _corpus_matrix(path, cfg: PipelineConfig):
    corpus = TrainingCorpus.load(path)
    if not corpus.positives or not corpus.negatives:
        raise SingleClassError(f"corpus {path} has {len(corpus.positives)} positive and "
                               f"{len(corpus.negatives)} negative instances; need both")
    instances = corpus.instances
    space = fit_feature_space([i.sentence for i in instances], binary=cfg.binary_features)
    X = space.transform([i.sentence for i in instances])
    y = [1 if i.label == POSITIVE else -1 for i in instances]
    return corpus, space, X, y


def _select(X, y, cfg: PipelineConfig, trace_path):
    best, trace = grid_search_C(X, y, cfg.grid)
    if trace_path:
        write_trace(trace_path, trace)
    return best, trace


def cmd_select_model(args, cfg: PipelineConfig) -> int:
    corpus_path = _need(args.corpus or cfg.corpus, "--corpus")
    _, _, X, y = _corpus_matrix(corpus_path, cfg)
    best, trace = _select(X, y, cfg, args.trace)
    top = next(r for r in trace if r.C == best)
    print(f"best C = {best!r}  ({cfg.grid.metric} = {top.mean:.4f}, {len(trace)} evaluations)")
    return EXIT_OK


def cmd_train(args, cfg: PipelineConfig) -> int:
    corpus_path = _need(args.corpus or cfg.corpus, "--corpus")
    out = _need(args.out or cfg.model, "--out")
    if args.grid == (args.C is not None):
        raise ConfigError("give exactly one of --C or --grid")
    corpus, space, X, y = _corpus_matrix(corpus_path, cfg)
    meta = {}
    if args.grid:
        trace_path = args.trace or str(Path(out).with_suffix(".trace.jsonl"))
        C, trace = _select(X, y, cfg, trace_path)
        meta = {"selection": "grid", "metric": cfg.grid.metric, "k": cfg.grid.k,
                "refinement_decimals": cfg.grid.refinement_decimals,
                "trace": trace_path, "evaluations": len(trace)}
        print(f"grid search chose C = {C!r} after {len(trace)} evaluations")
    else:
        C = args.C
        meta = {"selection": "fixed"}
    model, report = train(X, y, C=C, tolerance=cfg.grid.tolerance,
                          max_iterations=cfg.grid.max_iterations, seed=cfg.seed,
                          feature_space=space, element_kind=corpus.element_kind)
    model.metadata.update(meta)
    model.metadata["objective"] = report.objective
    if not report.converged:
        print(f"warning: solver stopped with duality gap {report.duality_gap:.3g} "
              f"> tolerance {cfg.grid.tolerance:g}", file=sys.stderr)
    model.save(out)
    errors = int(((model.decision_function(X) > 0) != (np.asarray(y) > 0)).sum())
    print(f"trained on {len(y)} sentences ({len(corpus.positives)} positive), "
          f"{space.n_features} features, C = {C!r}, training errors = {errors}")
    return EXIT_OK


def _article_paths(items) -> list[Path]:
    paths = []
    for item in items:
        p = Path(item)
        if p.is_dir():
            paths.extend(sorted(p.glob("*.txt")))
        else:
            paths.append(p)
    return paths


def cmd_extract(args, cfg: PipelineConfig) -> int:
    model = LinearModel.load(_need(args.model or cfg.model, "--model"))
    items = args.articles or ([cfg.articles] if cfg.articles else [])
    paths = _article_paths(items)
    articles = []
    failures = 0
    for path in paths:
        try:
            doc = load_document(path)
        except (OSError, UnicodeDecodeError) as exc:
            print(f"warning: skipping {path}: {exc}", file=sys.stderr)
            failures += 1
            continue
        hits = extract_sentences(model, doc)
        articles.append({
            "article_id": doc.id,
            "candidates": [{"index": i, "margin": m, "text": doc.sentences[i].text} for i, m in hits],
        })
    articles.sort(key=lambda a: a["article_id"])
    payload = {"schema_version": jsonio.SCHEMA_VERSION, "element_kind": model.element_kind,
               "articles": articles}
    if args.out:
        jsonio.write_json(args.out, payload)
    for art in articles:
        print(f"== {art['article_id']} ({len(art['candidates'])} candidates)")
        for c in art["candidates"]:
            print(f"  [{c['index']:>3}] {c['margin']:+.3f}  {c['text']}")
    if paths and failures == len(paths):
        return EXIT_DATA
    return EXIT_OK


def cmd_evaluate(args, cfg: PipelineConfig) -> int:
    predictions = load_predictions(args.predictions)
    gold = load_gold(args.gold)
    results, agg = evaluate(predictions, gold)
    table = report_table(results, agg)
    if args.out:
        jsonio.write_json(args.out, report_json(results, agg))
    if args.table:
        jsonio.write_text_atomic(args.table, table)
    print(table, end="")
    return EXIT_OK


def cmd_synth(args, cfg: PipelineConfig) -> int:
    try:
        spec = SynthSpec(
            n_reviews=args.n_reviews, refs_per_review=args.refs_per_review,
            sentences_per_article=args.sentences_per_article, vocabulary_size=args.vocabulary_size,
            paraphrase_noise=args.paraphrase_noise, seed=cfg.seed,
            n_test_articles=args.n_test_articles, element_kind=cfg.element_kind,
            distractors_per_article=args.distractors_per_article,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    counts = write_synthetic(spec, args.out)
    print(f"wrote {counts['reviews']} review records, {counts['train_articles']} reference articles "
          f"and {counts['test_articles']} test articles to {args.out} (seed {spec.seed})")
    return EXIT_OK


def cmd_annotate(args, cfg) -> int:
    try:
        doc = load_document(args.article)
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read {args.article}: {exc}") from exc
    for s in doc.sentences:
        print(f"[{s.index}] {s.text}")
    return EXIT_OK


COMMANDS = {
    "build-corpus": cmd_build_corpus,
    "train": cmd_train,
    "select-model": cmd_select_model,
    "extract": cmd_extract,
    "evaluate": cmd_evaluate,
    "synth": cmd_synth,
    "annotate": cmd_annotate,
}


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args) if args.command != "annotate" else None
        return COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"revex: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"revex: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"revex: invalid value: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        log.debug("internal error", exc_info=True)
        print(f"revex: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
