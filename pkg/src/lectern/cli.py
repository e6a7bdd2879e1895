"""Command-line front end for the off-line pipeline and the service.

Subcommands: segment, index, query, lm-build, lm-eval, eval, asr-sim,
wer-sweep, synth, serve. All file formats are the ones documented on the
corresponding modules; query output in machine mode is one group per line,
`rank<TAB>score<TAB>lecture_id<TAB>start_ms<TAB>end_ms<TAB>unit_ids`.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import evaluation, lm, noise, retrieval, segmentation, synth
from .tokenizer import TokenizerConfig


def _tokenizer_from_args(args: argparse.Namespace) -> TokenizerConfig:
    stopwords: frozenset[str] = frozenset()
    if getattr(args, "stopwords", None):
        stopwords = frozenset(
            Path(args.stopwords).read_text(encoding="utf-8").split()
        )
    return TokenizerConfig(
        lowercase=getattr(args, "lowercase", False),
        stopwords=stopwords,
        mode=getattr(args, "token_mode", "whitespace"),
    )


def _params_from_args(args: argparse.Namespace) -> retrieval.ScoringParams:
    return retrieval.ScoringParams(
        K=args.K,
        b=args.b,
        idf_clamp=args.idf_clamp,
        formula_variant=args.variant,
    )


def _add_tokenizer_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lowercase", action="store_true", help="lowercase terms")
    parser.add_argument("--stopwords", help="file of stopwords, whitespace separated")
    parser.add_argument(
        "--token-mode",
        choices=["whitespace", "pre"],
        default="whitespace",
        help="'pre' treats input as already analyzed",
    )


def _add_scoring_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--K", type=float, default=2.0)
    parser.add_argument("--b", type=float, default=0.8)
    parser.add_argument("--idf-clamp", action="store_true",
                        help="drop negative-idf term contributions")
    parser.add_argument("--variant", choices=["paper", "standard"], default="paper")


def cmd_segment(args: argparse.Namespace) -> int:
    content = Path(args.input).read_text(encoding="utf-8")
    lecture_id = args.lecture_id or Path(args.input).stem
    if args.format == "timed":
        tokens = segmentation.parse_timed_tokens(content)
        units = segmentation.segment_units(tokens, args.pause_ms, lecture_id)
    else:
        units = segmentation.parse_unit_lines(content, lecture_id)
    Path(args.out).write_text(segmentation.format_unit_lines(units), encoding="utf-8")
    print(f"wrote {len(units)} units to {args.out}")
    return 0


def _units_arg(value: str) -> tuple[str | None, Path]:
    # Accept either PATH or LECTURE_ID=PATH.
    if "=" in value:
        name, _, path = value.partition("=")
        return name, Path(path)
    return None, Path(value)


def cmd_index(args: argparse.Namespace) -> int:
    tokenizer = _tokenizer_from_args(args)
    params = _params_from_args(args)
    passages = []
    for units_path in args.units:
        name, p = _units_arg(units_path)
        lecture_id = name or args.lecture_id or segmentation.infer_lecture_id(p)
        units = segmentation.parse_unit_lines(
            p.read_text(encoding="utf-8"), lecture_id
        )
        passages.extend(
            segmentation.generate_passages(
                units, args.nmax, tokenizer, first_passage_id=len(passages)
            )
        )
    index = retrieval.build_index(passages, params, tokenizer)
    retrieval.save_index(index, args.out)
    print(
        f"indexed {index.corpus_size} passages from {len(args.units)} "
        f"transcript(s), avgdl {index.avgdl:.2f}, saved to {args.out}"
    )
    return 0


def cmd_query(args: argparse.Namespace) -> int:
    index = retrieval.load_index(args.index)
    groups = retrieval.query_top_n(index, args.text, args.top, args.pool)
    if args.json:
        payload = [
            {
                "rank": rank,
                "score": g.score,
                "lecture_id": g.lecture_id,
                "start_ms": g.start_ms,
                "end_ms": g.end_ms,
                "unit_ids": list(g.unit_ids()),
            }
            for rank, g in enumerate(groups, start=1)
        ]
        print(json.dumps(payload, indent=2))
    else:
        sys.stdout.write(retrieval.format_groups_tsv(groups))
    return 0


def cmd_lm_build(args: argparse.Namespace) -> int:
    tokenizer = _tokenizer_from_args(args)
    corpus = lm.load_corpus(args.corpus)
    if args.select > 0:
        textbook = Path(args.textbook).read_text(encoding="utf-8")
        corpus = lm.select_corpus(
            corpus, textbook, args.select, _params_from_args(args), tokenizer
        )
        print(f"selected {len(corpus)} documents")
    vocab = lm.build_vocab(corpus, args.vocab, tokenizer)
    model = lm.train_trigram(corpus, vocab, tokenizer)
    lm.save_model(model, args.out)
    print(f"trained on {len(corpus)} documents, vocab {vocab.size}, saved to {args.out}")
    return 0


def cmd_lm_eval(args: argparse.Namespace) -> int:
    model = lm.load_model(args.model)
    tokens = Path(args.test).read_text(encoding="utf-8").split()
    oov = lm.oov_rate(model.vocab, tokens)
    pp = lm.perplexity(model, tokens)
    if args.json:
        print(json.dumps({"oov": oov, "pp": pp, "tokens": len(tokens)}))
    else:
        print(f"OOV={evaluation.fmt3(oov)} PP={pp:.3g}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    collection = evaluation.load_collection(args.collection)
    conditions = []
    for spec in json.loads(Path(args.conditions).read_text(encoding="utf-8")):
        model = lm.load_model(spec["model"]) if spec.get("model") else None
        conditions.append(
            evaluation.EvalCondition(spec["name"], spec["variant"], model)
        )
    top_ns = [int(n) for n in args.top.split(",")]
    report = evaluation.run_benchmark(
        collection,
        conditions,
        top_ns,
        n_max=args.nmax,
        tokenizer=_tokenizer_from_args(args),
    )
    if args.json:
        print(report.to_json())
    else:
        sys.stdout.write(report.render_table())
    return 0


def cmd_asr_sim(args: argparse.Namespace) -> int:
    p = Path(args.units)
    units = segmentation.parse_unit_lines(
        p.read_text(encoding="utf-8"),
        args.lecture_id or segmentation.infer_lecture_id(p),
    )
    confusion: tuple[str, ...] = ()
    if args.confusion:
        confusion = tuple(Path(args.confusion).read_text(encoding="utf-8").split())
    spec = noise.NoiseSpec(args.sub, args.del_rate, args.ins, args.seed, confusion)
    corrupted = noise.corrupt_transcript(units, spec)
    Path(args.out).write_text(
        segmentation.format_unit_lines(corrupted), encoding="utf-8"
    )
    ref = evaluation.lecture_tokens(units)
    hyp = evaluation.lecture_tokens(corrupted)
    print(
        f"wrote {len(corrupted)} units to {args.out}, "
        f"measured WER {evaluation.word_error_rate(ref, hyp):.3f}"
    )
    return 0


def cmd_wer_sweep(args: argparse.Namespace) -> int:
    collection = evaluation.load_collection(args.collection)
    targets = [float(t) for t in args.targets.split(",")]
    # Query sets: paragraph queries are the textbook paragraphs ('-p' ids),
    # keyword queries the '-k' ids, as produced by synth collections.
    long_queries = {q: t for q, t in collection.queries.items() if "-p" in q}
    short_queries = {q: t for q, t in collection.queries.items() if "-k" in q}
    query_sets = {}
    if long_queries:
        query_sets["paragraph"] = long_queries
    if short_queries:
        query_sets["keyword"] = short_queries
    if not query_sets:
        query_sets["all"] = dict(collection.queries)
    report = noise.wer_sweep(
        collection, targets, query_sets, seed=args.seed, n_seeds=args.seeds,
        top_n=args.top,
    )
    if args.out:
        Path(args.out).write_text(report.to_json(), encoding="utf-8")
    sys.stdout.write(report.render_table())
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    built = synth.synthetic_collection(
        n_lectures=args.lectures,
        units_per_lecture=args.units,
        queries_per_lecture=args.queries,
        seed=args.seed,
    )
    built.write(args.out)
    col = built.collection
    print(
        f"wrote {len(col.lectures)} lectures, {len(col.queries)} queries to {args.out}"
    )
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import ServiceConfig, serve

    units_paths = list(args.units or [])
    textbook_dir = args.textbooks
    if args.collection:
        root = Path(args.collection)
        for lecture_dir in sorted((root / "lectures").iterdir()):
            ref = lecture_dir / "reference.tsv"
            if ref.is_file():
                units_paths.append(str(ref))
        if textbook_dir is None and (root / "textbooks").is_dir():
            textbook_dir = str(root / "textbooks")
    config = ServiceConfig(
        index_path=args.index,
        units_paths=units_paths,
        textbook_dir=textbook_dir,
        media_base=args.media_base,
        default_top_n=args.top,
        default_pool_size=args.pool,
        static_dir=args.static,
        host=args.host,
        port=args.port,
    )
    serve(config)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lectern",
        description="Passage retrieval over timed lecture transcripts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", help="parse a transcript into speech units")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["timed", "units"], default="timed")
    p.add_argument("--pause-ms", type=int, default=segmentation.DEFAULT_PAUSE_MS)
    p.add_argument("--lecture-id", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("index", help="build a passage index from unit files")
    p.add_argument("--units", action="append", required=True,
                   help="units.tsv file or LECTURE_ID=path; repeat for several lectures")
    p.add_argument("--nmax", type=int, default=segmentation.DEFAULT_N_MAX)
    p.add_argument("--lecture-id", default=None,
                   help="override the lecture id (default: file stem)")
    p.add_argument("--out", required=True)
    _add_tokenizer_flags(p)
    _add_scoring_flags(p)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("query", help="rank passage groups for a text query")
    p.add_argument("--index", required=True)
    p.add_argument("--text", required=True)
    p.add_argument("--top", type=int, default=3)
    p.add_argument("--pool", type=int, default=retrieval.DEFAULT_POOL_SIZE)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("lm-build", help="select a subcorpus and train a trigram model")
    p.add_argument("--corpus", required=True, help="directory or doc_id<TAB>body file")
    p.add_argument("--textbook", help="query text for corpus selection")
    p.add_argument("--select", type=int, default=lm.DEFAULT_SELECT_K,
                   help="documents to select (0 = train on the whole corpus)")
    p.add_argument("--vocab", type=int, default=lm.DEFAULT_VOCAB_CAP)
    p.add_argument("--out", required=True)
    _add_tokenizer_flags(p)
    _add_scoring_flags(p)
    p.set_defaults(func=cmd_lm_build)

    p = sub.add_parser("lm-eval", help="OOV rate and perplexity of a test text")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_lm_eval)

    p = sub.add_parser("eval", help="run the benchmark over a test collection")
    p.add_argument("--collection", required=True)
    p.add_argument("--conditions", required=True,
                   help='JSON: [{"name", "variant", "model"?}, ...]')
    p.add_argument("--top", default="1,2,3")
    p.add_argument("--nmax", type=int, default=segmentation.DEFAULT_N_MAX)
    p.add_argument("--json", action="store_true")
    _add_tokenizer_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("asr-sim", help="inject word errors into a transcript")
    p.add_argument("--units", required=True)
    p.add_argument("--sub", type=float, default=0.0)
    p.add_argument("--del", type=float, default=0.0, dest="del_rate")
    p.add_argument("--ins", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--confusion", help="file of confusion-vocabulary terms")
    p.add_argument("--lecture-id", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_asr_sim)

    p = sub.add_parser("wer-sweep", help="retrieval robustness across error rates")
    p.add_argument("--collection", required=True)
    p.add_argument("--targets", default="0,.2,.4,.6")
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--top", type=int, default=3)
    p.add_argument("--out", default=None, help="write the JSON report here")
    p.set_defaults(func=cmd_wer_sweep)

    p = sub.add_parser("synth", help="generate a synthetic test collection")
    p.add_argument("--out", required=True)
    p.add_argument("--lectures", type=int, default=5)
    p.add_argument("--units", type=int, default=200)
    p.add_argument("--queries", type=int, default=8)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("serve", help="serve a built index over HTTP")
    p.add_argument("--index", default=os.environ.get("LECTERN_INDEX"),
                   help="index file (or LECTERN_INDEX)")
    p.add_argument("--units", action="append",
                   help="units.tsv exposing transcript snippets; repeatable")
    p.add_argument("--collection", help="collection dir to pull units/textbooks from")
    p.add_argument("--textbooks", help="directory of <lecture_id>.txt textbooks")
    p.add_argument("--media-base", default=None)
    p.add_argument("--static", default=None, help="directory with the built web UI")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int,
                   default=int(os.environ.get("LECTERN_PORT", "8000")))
    p.add_argument("--top", type=int, default=3)
    p.add_argument("--pool", type=int, default=retrieval.DEFAULT_POOL_SIZE)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "serve" and not args.index:
        parser.error("serve requires --index or LECTERN_INDEX")
    if args.command == "lm-build" and args.select > 0 and not args.textbook:
        parser.error("lm-build requires --textbook unless --select 0")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
