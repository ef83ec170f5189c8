"""Command-line entry points: select, datagen, eval, windows."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import datagen as dg
from .corpus import (
    CorpusExample,
    load_corpus,
    load_subtables,
    subtable_record,
    subtable_to_table,
    write_subtables,
)
from .errors import SubtabError
from .evaluation import RecordResult, corpus_report, exact_match, gold_table, score_selection
from .pipeline import PipelineConfig, select_subtable
from .representation import PromptTemplate, default_template, serialize_window
from .selectors import OracleSelector, RemoteSelector, RemoteSelectorConfig
from .windowing import WindowConfig, divide_table

logger = logging.getLogger("subtab")


def _window_config(args) -> WindowConfig:
    return WindowConfig(w=args.window, span_all_columns=args.span_all_columns)


def _template(args) -> PromptTemplate:
    if getattr(args, "template", None):
        return PromptTemplate.from_file(args.template)
    return default_template()


def _build_selector(args):
    if args.selector == "oracle":
        return OracleSelector()
    endpoint = args.endpoint or os.environ.get("SELECTOR_ENDPOINT")
    model = args.model or os.environ.get("SELECTOR_MODEL")
    api_key = args.api_key or os.environ.get("SELECTOR_API_KEY")
    if not endpoint or not model:
        raise SubtabError("remote selector needs --endpoint and --model (or SELECTOR_* env vars)")
    cfg = RemoteSelectorConfig(
        endpoint=endpoint,
        model=model,
        api_key=api_key,
        max_tokens=args.max_tokens,
        retries=args.retries,
        timeout=args.timeout,
    )
    return RemoteSelector(cfg, _template(args))


def _print_table(example: CorpusExample, table, trace, stream) -> None:
    print(
        f"# table_id={example.table_id} question_id={example.question_id} "
        f"converged={trace.converged} iterations={trace.iterations} "
        f"rows={table.n_rows} cols={table.n_cols}",
        file=stream,
    )
    if table.n_cols:
        print(" | ".join(table.headers), file=stream)
        for row in table.cells:
            print(" | ".join(row), file=stream)
    print("", file=stream)


def cmd_select(args) -> int:
    examples = load_corpus(args.corpus, lenient=args.lenient)
    selector = _build_selector(args)
    cfg = PipelineConfig(
        selector=selector,
        window=_window_config(args),
        max_iterations=args.max_iters,
        jobs=1,
        trace=args.trace,
    )

    def run(example: CorpusExample):
        annotation = example.annotation if args.selector == "oracle" else None
        return select_subtable(example.table, example.question, annotation, cfg)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(run, examples))
    else:
        outcomes = [run(e) for e in examples]

    records = []
    for example, (table, trace) in zip(examples, outcomes):
        if args.trace:
            for it in trace.records:
                logger.info(
                    "%s/%s iter=%d dims=%dx%d windows=%d union_cells=%d warnings=%d",
                    example.table_id,
                    example.question_id,
                    it.iteration,
                    it.input_rows,
                    it.input_cols,
                    it.n_windows,
                    it.union_cells,
                    it.parse_warnings,
                )
        record = subtable_record(
            example.table_id, example.question_id, table, trace.converged, trace.iterations
        )
        if trace.empty_result:
            record["empty_result"] = True
        records.append(record)

    if args.out:
        n = write_subtables(records, args.out)
        print(f"wrote {n} subtables to {args.out}", file=sys.stderr)
    else:
        for example, (table, trace) in zip(examples, outcomes):
            _print_table(example, table, trace, sys.stdout)
    return 0


def cmd_datagen(args) -> int:
    examples = load_corpus(args.corpus, lenient=args.lenient)
    cfg = _window_config(args)
    template = _template(args)

    pairs = []
    for example in examples:
        pairs.extend(
            dg.generate_pairs(
                example.table,
                example.question,
                example.annotation,
                cfg,
                template,
                table_id=example.table_id,
                question_id=example.question_id,
            )
        )
    raw_histogram = dg.bucket_histogram(pairs)

    if args.augment:
        pairs = dg.augment_same_value(pairs)
        print(f"augmentation changed {dg.augmented_fraction(pairs):.2%} of pairs", file=sys.stderr)

    if args.balance == "uniform":
        supply = dg.bucket_histogram(pairs)
        if args.per_bucket is not None:
            per_bucket = args.per_bucket
        else:
            spec_keys = dg.BucketSpec.uniform(args.window, 0).sorted_keys()
            per_bucket = min(supply.get(k, 0) for k in spec_keys)
        spec = dg.BucketSpec.uniform(args.window, per_bucket)
        pairs, balanced_histogram = dg.balance_pairs(pairs, spec, seed=args.seed)
    else:
        # Unbalanced output still drops zero-column targets: they are not
        # expressible training pairs.
        pairs = [p for p in pairs if p.n >= 1]
        balanced_histogram = dg.bucket_histogram(pairs)

    n = dg.write_pairs(pairs, args.out)
    print(f"wrote {n} pairs to {args.out}", file=sys.stderr)

    hist_path = args.histogram_out or str(Path(args.out).with_suffix(".hist.json"))
    Path(hist_path).write_text(
        json.dumps(dg.histogram_to_json(balanced_histogram), indent=2) + "\n", encoding="utf-8"
    )
    print(f"wrote bucket histogram to {hist_path}", file=sys.stderr)

    if not args.no_figures:
        from .figures import render_bucket_histogram

        fig_path = Path(args.out).with_suffix(".buckets.png")
        render_bucket_histogram(raw_histogram, balanced_histogram, fig_path)
        print(f"wrote {fig_path}", file=sys.stderr)
    return 0


def _load_answers(path: str) -> dict[str, str]:
    answers = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            record = json.loads(line)
            answers[str(record["question_id"])] = str(record["answer"])
    return answers


def cmd_eval(args) -> int:
    examples = {(e.table_id, e.question_id): e for e in load_corpus(args.corpus, lenient=args.lenient)}
    predictions = _load_answers(args.answers) if args.answers else {}

    results = []
    for record in load_subtables(args.subtables):
        key = (str(record["table_id"]), str(record["question_id"]))
        if key not in examples:
            if args.lenient:
                logger.warning("no corpus record for %s, skipping", key)
                continue
            raise SubtabError(f"no corpus record for table_id={key[0]} question_id={key[1]}")
        example = examples[key]
        predicted = subtable_to_table(record)
        gold = gold_table(example.table, example.annotation)
        score = score_selection(predicted, gold)
        em = None
        if key[1] in predictions:
            em = exact_match(predictions[key[1]], list(example.annotation.gold_answers))
        results.append(
            RecordResult(
                table_id=example.table_id,
                question_id=example.question_id,
                precision=score.precision,
                recall=score.recall,
                true_positive=score.true_positive,
                predicted_cells=score.predicted,
                gold_cells=score.gold,
                source_cells=example.table.n_cells,
                selected_cells=predicted.n_cells,
                reduction_ratio=predicted.n_cells / example.table.n_cells,
                converged=bool(record.get("converged", True)),
                iterations=int(record.get("iterations", 0)),
                n_target_columns=len(example.annotation.target_columns),
                n_answer_rows=len(gold.rows),
                em=em,
            )
        )

    if not results:
        raise SubtabError("nothing to evaluate")
    report = corpus_report(results)
    print(report.format_text())

    if args.out:
        Path(args.out).write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
        print(f"wrote {args.out}", file=sys.stderr)
        csv_path = args.csv_out or str(Path(args.out).with_suffix(".csv"))
        _write_results_csv(results, csv_path)
        print(f"wrote {csv_path}", file=sys.stderr)
        if not args.no_figures:
            from .figures import render_report_figures

            out_dir = Path(args.out).parent
            for path in render_report_figures(report, out_dir, stem=Path(args.out).stem):
                print(f"wrote {path}", file=sys.stderr)
    return 0


def _write_results_csv(results, path: str) -> None:
    import csv as _csv

    fields = [
        "table_id",
        "question_id",
        "precision",
        "recall",
        "true_positive",
        "predicted_cells",
        "gold_cells",
        "source_cells",
        "selected_cells",
        "reduction_ratio",
        "converged",
        "iterations",
        "n_target_columns",
        "n_answer_rows",
        "em",
    ]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = _csv.writer(fh)
        writer.writerow(fields)
        for r in results:
            writer.writerow([getattr(r, f) for f in fields])


def cmd_windows(args) -> int:
    examples = load_corpus(args.corpus, lenient=args.lenient)
    if args.record is not None:
        chosen = [e for e in examples if e.table_id == args.record or e.question_id == args.record]
        if not chosen:
            raise SubtabError(f"no record with table_id or question_id {args.record!r}")
    else:
        if not 0 <= args.index < len(examples):
            raise SubtabError(f"record index {args.index} out of range (corpus has {len(examples)})")
        chosen = [examples[args.index]]

    cfg = _window_config(args)
    for example in chosen:
        windows = divide_table(example.table, cfg)
        print(f"# table_id={example.table_id} question_id={example.question_id} windows={len(windows)}")
        for window in windows:
            print(f"window origin=({window.origin_row},{window.origin_col}) shape={window.shape}")
            print(serialize_window(window))
            print("")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subtab",
        description="Iterative windowed subtable selection for table question answering",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, window_default=4):
        p.add_argument("corpus", help="JSON-lines corpus file")
        p.add_argument("--window", type=int, default=window_default, help="window size w")
        p.add_argument(
            "--span-all-columns",
            action="store_true",
            help="windows cover every column (fixed row count)",
        )
        p.add_argument("--lenient", action="store_true", help="skip malformed corpus lines")

    p = sub.add_parser("select", help="run the selection pipeline over a corpus")
    add_common(p)
    p.add_argument("--selector", choices=["oracle", "remote"], default="oracle")
    p.add_argument("--endpoint", help="chat-completion endpoint URL (remote selector)")
    p.add_argument("--model", help="model name (remote selector)")
    p.add_argument("--api-key", help="bearer token (remote selector)")
    p.add_argument("--template", help="prompt template file with {question} and {table}")
    p.add_argument("--max-tokens", type=int, default=512)
    p.add_argument("--retries", type=int, default=2)
    p.add_argument("--timeout", type=float, default=30.0)
    p.add_argument("--max-iters", type=int, default=16)
    p.add_argument("--jobs", type=int, default=1, help="records processed in parallel")
    p.add_argument("--trace", action="store_true", help="log per-iteration statistics")
    p.add_argument("--out", help="write JSON-lines subtables here instead of stdout")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("datagen", help="generate selector training pairs")
    add_common(p)
    p.add_argument("--balance", choices=["uniform", "none"], default="none")
    p.add_argument(
        "--per-bucket",
        type=int,
        default=None,
        help="pairs per (m,n) bucket; default equalizes to the scarcest bucket",
    )
    p.add_argument("--augment", action="store_true", help="add same-value cells to targets")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--template", help="prompt template file")
    p.add_argument("--out", required=True, help="JSON-lines training pairs output")
    p.add_argument("--histogram-out", help="bucket histogram JSON (default: <out>.hist.json)")
    p.add_argument("--no-figures", action="store_true", help="skip the histogram figure")
    p.set_defaults(func=cmd_datagen)

    p = sub.add_parser("eval", help="score subtables against a corpus")
    add_common(p)
    p.add_argument("--subtables", required=True, help="JSON-lines output of the select command")
    p.add_argument("--answers", help="JSON-lines {question_id, answer} reader predictions")
    p.add_argument("--out", help="report JSON path (figures and CSV land next to it)")
    p.add_argument("--csv-out", help="per-record metrics CSV (default: <out>.csv)")
    p.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("windows", help="dump the windows of one corpus record")
    add_common(p)
    p.add_argument("--record", help="table_id or question_id to dump")
    p.add_argument("--index", type=int, default=0, help="record index when --record is absent")
    p.set_defaults(func=cmd_windows)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except SubtabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
