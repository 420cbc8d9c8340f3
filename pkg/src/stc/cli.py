"""``stc`` command line: chunk, stats, bench, eval, synth-maud.

Exit codes: 0 success, 2 unreadable input, 64 invalid flags, 65 malformed data.
"""

from __future__ import annotations

import argparse
import json
import logging
import statistics
import sys
from pathlib import Path

from . import __version__
from .baselines import RecursiveSplitConfig, run_baseline
from .chunk import read_manifest, write_manifest
from .chunker import chunk_document
from .errors import (
    DuplicateSheetError,
    EmptyCorpusError,
    EmptyInputError,
    MismatchedRunError,
    ParseError,
    RowWidthError,
    SampleSizeError,
    SchemaError,
)
from .ingestion import MaudColumns, TabularDocument, load_document, load_maud
from .metrics import ChunkReport, compare, format_table
from .retrieval import build_index, evaluate, evaluate_rankings, sample_queries
from .synth import maud_like_document, maud_like, records_to_csv
from .tokens import get_counter

EXIT_OK = 0
EXIT_NOINPUT = 2
EXIT_USAGE = 64
EXIT_DATAERR = 65

STRATEGY_CHOICES = ("stc", "recursive", "kv-recursive")

log = logging.getLogger("stc")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _add_chunking_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--budget", type=int, default=512, help="max tokens per chunk (default 512)")
    p.add_argument("--overlap", type=int, default=100, help="baseline window overlap in tokens (default 100)")
    p.add_argument("--token-scheme", choices=("word-punct", "chars4"), default="word-punct")
    p.add_argument("--delimiter", default=",", help="CSV delimiter")
    p.add_argument("--no-header", action="store_true", help="CSV has no header row")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stc", description="Structure-aware chunking for tabular documents.")
    parser.add_argument("--version", action="version", version=f"stc {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("chunk", help="chunk one document and write a JSONL manifest")
    p.add_argument("--input", required=True, help="CSV file or workbook .json")
    p.add_argument("--strategy", choices=STRATEGY_CHOICES, default="stc")
    p.add_argument("--output", help="manifest path (default: <input>.<strategy>.jsonl)")
    p.add_argument("--format", choices=("table", "json"), default="table")
    _add_chunking_flags(p)

    p = sub.add_parser("stats", help="compare chunk statistics across strategies")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="chunk this document with every strategy and compare")
    src.add_argument("--manifest", action="append", help="manifest written by 'stc chunk' (repeatable)")
    p.add_argument("--strategies", default="stc,recursive,kv-recursive")
    p.add_argument("--format", choices=("table", "json"), default="table")
    _add_chunking_flags(p)

    p = sub.add_parser("bench", help="time strategies over repeated runs")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="document to chunk")
    src.add_argument("--synthetic-rows", type=int, help="generate a MAUD-shaped corpus of N rows")
    p.add_argument("--seed", type=int, default=0, help="seed for --synthetic-rows")
    p.add_argument("--strategies", default="stc,recursive,kv-recursive")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--format", choices=("table", "json"), default="table")
    _add_chunking_flags(p)

    p = sub.add_parser("eval", help="BM25 retrieval evaluation of a manifest against MAUD queries")
    p.add_argument("--manifest", required=True)
    p.add_argument("--maud", required=True, help="MAUD-shaped CSV the manifest was built from")
    p.add_argument("--split", default="train", choices=("train", "val", "test"))
    p.add_argument("--n", type=int, default=1000, help="number of sampled queries")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cutoff", type=int, default=10)
    p.add_argument("--k1", type=float, default=1.2)
    p.add_argument("--b", type=float, default=0.75)
    p.add_argument("--ranked", help="JSONL of {query_id, chunk_ids} to score instead of BM25")
    p.add_argument("--output", help="write the EvalResult JSON here (default: stdout)")
    p.add_argument("--trace", help="write a per-query TSV trace here")
    for field in ("text", "question", "answer", "contract_name", "deal_point_category", "deal_point_type"):
        p.add_argument(f"--col-{field.replace('_', '-')}", default=field, help=f"column holding {field}")
    p.add_argument("--col-label", default=None, help="column holding the question label (default: question)")

    p = sub.add_parser("synth-maud", help="write a synthetic MAUD-shaped CSV")
    p.add_argument("--rows", type=int, default=25_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    return parser


def _scheme(args) -> str:
    return "word_punct" if args.token_scheme == "word-punct" else "chars_div_4"


def _validate_budget(args, strategies=("recursive",)) -> None:
    if args.budget < 1:
        raise UsageError(f"--budget must be >= 1 (got {args.budget})")
    # overlap only matters to the sliding-window baselines
    if any(s != "stc" for s in strategies) and not 0 <= args.overlap < args.budget:
        raise UsageError(f"--overlap must be >= 0 and below --budget (got {args.overlap} >= {args.budget})")


def _load(args) -> TabularDocument:
    return load_document(args.input, delimiter=args.delimiter, has_header=not args.no_header)


def _run(doc: TabularDocument, strategy: str, args):
    counter = get_counter(_scheme(args))
    strategy = strategy.replace("-", "_")
    if strategy == "stc":
        return chunk_document(doc, args.budget, counter)
    config = RecursiveSplitConfig(args.budget, args.overlap)
    return run_baseline(doc, strategy, config, counter)


def _strategies(spec: str) -> list[str]:
    names = [s.strip() for s in spec.split(",") if s.strip()]
    bad = [s for s in names if s not in STRATEGY_CHOICES]
    if bad or not names:
        raise UsageError(f"unknown strategy {bad[0] if bad else spec!r}; choose from {', '.join(STRATEGY_CHOICES)}")
    return names


def meta_path(manifest: str | Path) -> Path:
    return Path(str(manifest) + ".meta.json")


def cmd_chunk(args) -> int:
    _validate_budget(args, [args.strategy])
    doc = _load(args)
    chunks, rep = _run(doc, args.strategy, args)
    out = Path(args.output or f"{args.input}.{args.strategy.replace('-', '_')}.jsonl")
    write_manifest(chunks, out)
    meta = {"manifest": out.name, "overlap": args.overlap if args.strategy != "stc" else None, **rep.to_dict()}
    meta_path(out).write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    if args.format == "json":
        print(json.dumps(rep.to_dict(), indent=2))
    else:
        print(format_table([rep]))
        print(f"manifest: {out}")
    return EXIT_OK


def _report_from_manifest(path: str) -> ChunkReport:
    meta = meta_path(path)
    if not meta.exists():
        raise SchemaError(f"{path}: no sidecar {meta.name}; write manifests with 'stc chunk'")
    return ChunkReport.from_dict(json.loads(meta.read_text(encoding="utf-8")))


def cmd_stats(args) -> int:
    if args.manifest:
        reports = [_report_from_manifest(m) for m in args.manifest]
    else:
        strategies = _strategies(args.strategies)
        _validate_budget(args, strategies)
        doc = _load(args)
        reports = [_run(doc, s, args)[1] for s in strategies]
    if len(reports) == 1:
        text = json.dumps(reports[0].to_dict(), indent=2) if args.format == "json" else format_table(reports)
    else:
        table = compare(reports)
        text = table.to_json() if args.format == "json" else table.to_table()
    print(text)
    return EXIT_OK


def cmd_bench(args) -> int:
    strategies = _strategies(args.strategies)
    _validate_budget(args, strategies)
    if args.repeats < 1:
        raise UsageError("--repeats must be >= 1")
    if args.synthetic_rows is not None:
        if args.synthetic_rows < 1:
            raise UsageError("--synthetic-rows must be >= 1")
        doc, _ = maud_like_document(args.synthetic_rows, seed=args.seed, source_id=f"synthetic-{args.synthetic_rows}")
    else:
        doc = _load(args)
    results = {}
    for s in strategies:
        times = []
        last = None
        for _ in range(args.repeats):
            _, last = _run(doc, s, args)
            times.append(last.elapsed_ms)
        results[s] = {"median_ms": statistics.median(times), "runs_ms": times, "chunk_count": last.chunk_count}
    base = strategies[0]
    for s in strategies:
        m = results[s]["median_ms"]
        results[s]["speedup_of_" + base] = m / results[base]["median_ms"] if results[base]["median_ms"] else None
    noisy = args.repeats == 1
    if args.format == "json":
        print(json.dumps({"rows": doc.n_rows, "repeats": args.repeats, "noisy": noisy, "results": results}, indent=2))
    else:
        print(f"rows={doc.n_rows:,} repeats={args.repeats}" + ("  (single run: timings are noisy)" if noisy else ""))
        print(f"{'strategy':<14}{'median ms':>12}{'chunks':>10}{f'{base} speedup':>16}")
        for s in strategies:
            r = results[s]
            print(f"{s:<14}{r['median_ms']:>12,.1f}{r['chunk_count']:>10,}{r['speedup_of_' + base]:>15.2f}x")
    return EXIT_OK


def _read_rankings(path: str) -> dict[int, list[int]]:
    out = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                out[int(obj["query_id"])] = [int(c) for c in obj["chunk_ids"]]
            except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                raise SchemaError(f"{path}:{lineno}: expected {{query_id, chunk_ids}}") from None
    return out


def cmd_eval(args) -> int:
    if args.n < 0:
        raise UsageError("--n must be >= 0")
    if args.cutoff < 5:
        raise UsageError("--cutoff must be >= 5")
    chunks = read_manifest(args.manifest)
    columns = MaudColumns(
        text=args.col_text,
        question=args.col_question,
        answer=args.col_answer,
        contract_name=args.col_contract_name,
        deal_point_category=args.col_deal_point_category,
        deal_point_type=args.col_deal_point_type,
        question_label=args.col_label,
    )
    _, records = load_maud(args.maud, args.split, columns)
    try:
        queries = sample_queries(records, args.n, args.seed)
    except SampleSizeError as e:
        raise UsageError(str(e)) from None
    strategy = chunks[0].strategy if chunks else ""
    if args.ranked:
        rankings = _read_rankings(args.ranked)
        missing = [q.query_id for q in queries if q.query_id not in rankings]
        if missing:
            raise SchemaError(f"{args.ranked}: no ranking for query {missing[0]}")
        texts = {c.chunk_index: c.text for c in chunks}
        result = evaluate_rankings(rankings, texts, queries, args.cutoff)
        result.seed, result.strategy = args.seed, strategy
    else:
        index = build_index(chunks, k1=args.k1, b=args.b)
        result = evaluate(index, queries, args.cutoff, seed=args.seed, strategy=strategy)
    text = result.to_json()
    if args.output:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    if args.trace:
        Path(args.trace).write_text(result.trace_tsv(), encoding="utf-8")
    return EXIT_OK


def cmd_synth(args) -> int:
    if args.rows < 1:
        raise UsageError("--rows must be >= 1")
    Path(args.output).write_text(records_to_csv(maud_like(args.rows, args.seed)), encoding="utf-8")
    print(f"wrote {args.rows:,} rows to {args.output}")
    return EXIT_OK


COMMANDS = {"chunk": cmd_chunk, "stats": cmd_stats, "bench": cmd_bench, "eval": cmd_eval, "synth-maud": cmd_synth}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"stc: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, IsADirectoryError, PermissionError) as e:
        print(f"stc: cannot read {e.filename}: {e.strerror}", file=sys.stderr)
        return EXIT_NOINPUT
    except (ParseError, SchemaError, RowWidthError, DuplicateSheetError, EmptyInputError, EmptyCorpusError,
            MismatchedRunError) as e:
        print(f"stc: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_DATAERR


if __name__ == "__main__":
    sys.exit(main())
