"""Command-line entry point for relative select indexes and their benchmarks."""

from __future__ import annotations

import argparse
from dataclasses import asdict
import json
import logging
from pathlib import Path
import sys
from typing import Any, Dict, Iterable, List, Sequence, Tuple

from relsel import (
    BenchSettings,
    BwtConvention,
    IndexConfig,
    common_subsequence,
    edit_distance,
    load_settings,
)
from relsel.alignment import Alignment, edit_stats
from relsel.bench import (
    QUERY_KINDS,
    answer_digest,
    format_table,
    make_queries,
    report_records,
    run_bench,
    run_queries,
    time_queries,
)
from relsel.boss import boss_matrix, relative_edge_bwt
from relsel.bwt import bwt_of, inverse_bwt, printable
from relsel.config import SENTINEL, SPARSE_ENCODINGS
from relsel.container import IndexMode, build_index, component_sizes, open_index, save_index
from relsel.errors import InvalidInputError, RelSelError, UnsupportedQueryError
from relsel.mutate import mutate, read_sequence, write_fasta
from relsel.relative import RelativeSelect, build_relative
from relsel.sequence import build_sequence

logger = logging.getLogger("relsel.cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
Records = List[Dict[str, Any]]


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    parser = _Parser(description="Select queries on a sequence stored relative to a similar one")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log build and timing details")
    parser.add_argument("--config", type=Path, help="Settings JSON (default: next to the launcher)")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text", help="Output format")

    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = commands.add_parser("mutate", parents=[common], help="Generate a random pair of similar sequences")
    _add_pair_options(p)
    p.add_argument("--out1", type=Path, required=True, help="FASTA file for the reference")
    p.add_argument("--out2", type=Path, required=True, help="FASTA file for the mutated copy")
    p.add_argument("--alignment", type=Path, help="Binary file for the true alignment")

    p = commands.add_parser("build", parents=[common], help="Build and save an index of TARGET")
    p.add_argument("target", type=Path, help="Sequence to index (FASTA or raw)")
    p.add_argument("--reference", type=Path, help="Reference sequence for relative modes")
    p.add_argument("--alignment", type=Path, help="Alignment of the texts written by 'mutate'")
    p.add_argument("--mode", choices=[m.value for m in IndexMode], help="Index mode")
    p.add_argument("--share-markers", action="store_true", help="Store B, B' and D once")
    _add_encoding_option(p)
    p.add_argument("-o", "--output", type=Path, required=True, help="Index file to write")

    p = commands.add_parser("query", parents=[common], help="Run random queries on a saved index")
    p.add_argument("index", type=Path, help="Index file written by 'build'")
    p.add_argument("--kind", choices=QUERY_KINDS, default="psi", help="Query kind (default: psi)")
    p.add_argument("--queries", type=int, help="Number of queries")
    p.add_argument("--seed", type=int, help="Query seed")
    p.add_argument("--batches", type=int, help="Timing batches")
    p.add_argument("--threads", type=int, help="Threads for timing runs")

    p = commands.add_parser("bench", parents=[common], help="Compare index modes on a mutated pair")
    _add_pair_options(p)
    p.add_argument("--queries", type=int, help="Queries per kind")
    p.add_argument("--batches", type=int, help="Timing batches")
    p.add_argument("--threads", type=int, help="Threads for timing runs")
    _add_encoding_option(p)
    p.add_argument("--modes", nargs="+", choices=[m.value for m in IndexMode], help="Modes to compare")
    p.add_argument("--kinds", nargs="+", choices=QUERY_KINDS, default=["lf", "psi", "psi-binary"])
    p.add_argument(
        "--ref-extra", dest="reference_extra", type=int,
        help="Also time relative modes against a reference with this many extra random characters",
    )

    p = commands.add_parser("bwt", parents=[common], help="Burrows-Wheeler transform of a text")
    p.add_argument("text", nargs="?", help="Text ('$' marks the sentinel with --inverse)")
    p.add_argument("--file", type=Path, help="Read the text from a file instead")
    p.add_argument(
        "--convention", choices=[c.value for c in BwtConvention], default=BwtConvention.SENTINEL.value
    )
    p.add_argument("--inverse", action="store_true", help="Invert a sentinel BWT")

    p = commands.add_parser("boss", parents=[common], help="Sorted edge matrix of a de Bruijn graph")
    p.add_argument("text", help="Text without '$'")
    p.add_argument("--k", type=int, help="Graph order")
    p.add_argument("--compare", metavar="TEXT2", help="Second text to compare edge-BWTs with")

    p = commands.add_parser("dump", parents=[common], help="Show index components or marker vectors")
    p.add_argument("index", type=Path, nargs="?", help="Index file written by 'build'")
    p.add_argument("--strings", nargs=2, metavar=("S1", "S2"), help="Show markers for two strings")
    return parser.parse_args(argv)


def _add_pair_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, help="Random seed")
    p.add_argument("--length", type=int, help="Reference length")
    p.add_argument("--sub-rate", dest="sub_rate", type=float, help="Substitution rate")
    p.add_argument("--indel-rate", dest="indel_rate", type=float, help="Insertion/deletion rate")


def _add_encoding_option(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--encoding", choices=SPARSE_ENCODINGS, help="Serialized layout of sparse bit vectors"
    )


def resolve_settings(args: argparse.Namespace) -> BenchSettings:
    """Settings file values overridden by any option given on the command line."""

    settings = load_settings(args.config)
    names = (
        "seed", "length", "sub_rate", "indel_rate", "queries",
        "batches", "threads", "k", "encoding", "reference_extra",
    )
    for name in names:
        value = getattr(args, name, None)
        if value is not None:
            setattr(settings, name, value)
    if getattr(args, "mode", None):
        settings.mode = args.mode
    return settings


def summarise_markers(rel: RelativeSelect, s2: bytes) -> List[Tuple[str, str]]:
    """Marker vectors and D as ``(name, value)`` rows, per character in byte order."""

    alphabet = sorted(set(rel.reference.alphabet) | set(s2))
    rows = [("B", rel.sub.marks.to_string())]
    rows.extend((f"B_{chr(x)}", rel.sub.symbol_marks.get(x).to_string()) for x in alphabet)
    rows.append(("B'", rel.sup.marks.to_string()))
    if rel.sup.symbol_marks is not None:
        rows.extend((f"B'_{chr(x)}", rel.sup.symbol_marks.get(x).to_string()) for x in alphabet)
    rows.append(("D", rel.sup.new_chars.text().decode("latin-1")))
    return rows


def _emit(args: argparse.Namespace, records: Iterable[Dict[str, Any]], text: str) -> None:
    if args.format == "json":
        for record in records:
            print(json.dumps(record, sort_keys=True))
    else:
        print(text)


def _table(rows: Iterable[Tuple[str, Any]]) -> str:
    rows = list(rows)
    width = max((len(name) for name, _ in rows), default=0)
    return "\n".join(f"{name.ljust(width)}  {value}" for name, value in rows)


def cmd_mutate(args: argparse.Namespace) -> int:
    s = resolve_settings(args)
    pair = mutate(s.seed, s.length, s.sub_rate, s.indel_rate)
    write_fasta(args.out1, f"reference seed={s.seed}", pair.text1)
    write_fasta(args.out2, f"mutated seed={s.seed} sub={s.sub_rate} indel={s.indel_rate}", pair.text2)
    if args.alignment:
        args.alignment.write_bytes(pair.alignment.to_bytes())
    record = {"seed": s.seed, **asdict(edit_stats(pair.alignment))}
    _emit(args, [record], _table(record.items()))
    return EXIT_OK


def cmd_build(args: argparse.Namespace) -> int:
    s = resolve_settings(args)
    mode = IndexMode(s.mode)
    config = IndexConfig(share_markers=args.share_markers, sparse_encoding=s.encoding)
    target = read_sequence(args.target)
    reference = read_sequence(args.reference) if args.reference else None
    alignment = None
    if args.alignment:
        try:
            alignment = Alignment.from_bytes(args.alignment.read_bytes())
        except OSError as exc:
            raise InvalidInputError(f"cannot read alignment {args.alignment}: {exc}") from exc
    index = build_index(mode, reference, target, text_alignment=alignment, config=config)
    params = {"target": str(args.target), "reference": str(args.reference) if args.reference else None}
    save_index(args.output, index, params, config=config)
    sizes = component_sizes(index, config=config)
    _emit(args, [{"mode": mode.value, **sizes}], _table([("mode", mode.value), *sizes.items()]))
    return EXIT_OK


def cmd_query(args: argparse.Namespace) -> int:
    s = resolve_settings(args)
    index, meta = open_index(args.index)
    queries = make_queries(index, args.kind, s.queries, s.seed)
    digest = answer_digest(run_queries(index, args.kind, queries))
    ns = time_queries(index, args.kind, queries, batches=s.batches, threads=s.threads)
    record = {
        "mode": meta["mode"],
        "kind": args.kind,
        "queries": len(queries),
        "digest": digest,
        "ns_per_query": round(ns, 1),
    }
    _emit(args, [record], _table(record.items()))
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    s = resolve_settings(args)
    modes = args.modes or [m.value for m in IndexMode]
    report = run_bench(s, modes=modes, kinds=args.kinds)
    _emit(args, report_records(report), format_table(report))
    return EXIT_OK


def _text_argument(args: argparse.Namespace) -> bytes:
    if args.file:
        return read_sequence(args.file)
    if args.text is None:
        raise InvalidInputError("give a text or --file")
    return args.text.encode("latin-1")


def cmd_bwt(args: argparse.Namespace) -> int:
    text = _text_argument(args)
    if args.inverse:
        result = inverse_bwt(text.replace(b"$", bytes([SENTINEL]))).decode("latin-1")
    else:
        result = printable(bwt_of(text, BwtConvention(args.convention)))
    _emit(args, [{"inverse" if args.inverse else "bwt": result}], result)
    return EXIT_OK


def cmd_boss(args: argparse.Namespace) -> int:
    k = args.k if args.k is not None else load_settings(args.config).k
    rows = boss_matrix(args.text, k)
    records: Records = [{"row": r, "source": src, "label": label} for r, src, label in rows]
    lines = [f"{r:>3}) {src} {label}" for r, src, label in rows]
    if args.compare:
        comparison = relative_edge_bwt(args.text, args.compare, k)
        summary = {
            "edge_bwt1": comparison.bwt1.decode("latin-1"),
            "edge_bwt2": comparison.bwt2.decode("latin-1"),
            "levenshtein": comparison.stats.levenshtein,
            "d_indel": comparison.stats.d_indel,
        }
        records.append(summary)
        lines.append(_table(summary.items()))
    _emit(args, records, "\n".join(lines))
    return EXIT_OK


def cmd_dump(args: argparse.Namespace) -> int:
    if args.strings:
        s1, s2 = (s.encode("latin-1") for s in args.strings)
        alignment = common_subsequence(s1, s2)
        rel = build_relative(build_sequence(s1), s2, alignment)
        rows = [
            ("S1", s1.decode("latin-1")),
            ("S2", s2.decode("latin-1")),
            ("C", alignment.common(s1).decode("latin-1")),
            *summarise_markers(rel, s2),
            ("levenshtein", str(edit_distance(s1, s2))),
        ]
        _emit(args, [{"name": n, "value": v} for n, v in rows], _table(rows))
        return EXIT_OK
    if args.index is None:
        raise UnsupportedQueryError("give an index file or --strings S1 S2")
    index, meta = open_index(args.index)
    sizes = component_sizes(index)
    _emit(args, [{**meta, **sizes}], _table([*meta.items(), *sizes.items()]))
    return EXIT_OK


COMMANDS = {
    "mutate": cmd_mutate,
    "build": cmd_build,
    "query": cmd_query,
    "bench": cmd_bench,
    "bwt": cmd_bwt,
    "boss": cmd_boss,
    "dump": cmd_dump,
}


def run_cli(args: argparse.Namespace) -> int:
    return COMMANDS[args.command](args)


def main(argv: Sequence[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return run_cli(args)
    except UnsupportedQueryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RelSelError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
