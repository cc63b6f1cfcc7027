"""Query generation, answer digests, timing and reports for index modes."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
import hashlib
import logging
import statistics
import time
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .alignment import Alignment
from .config import DEFAULT_CONFIG, BenchSettings, IndexConfig
from .container import AnyIndex, IndexMode, build_index, component_sizes
from .errors import AnswerMismatchError, InvalidInputError, UnsupportedQueryError
from .mutate import MutatedPair, mutate, random_text

logger = logging.getLogger(__name__)

QUERY_KINDS = ("lf", "psi", "psi-binary", "select", "rank", "access")
WARMUP_QUERIES = 1000

Query = Tuple[int, ...]


def make_queries(index: AnyIndex, kind: str, count: int, seed: int) -> List[Query]:
    """Random valid queries that depend only on the indexed BWT.

    Symbols are drawn through random rows, so every select query names an
    existing occurrence and the stream is the same for every mode.
    """

    if kind not in QUERY_KINDS:
        raise InvalidInputError(f"unknown query kind {kind!r}")
    if count < 0:
        raise InvalidInputError("query count must be non-negative")
    n = len(index)
    rng = np.random.default_rng(seed)
    rows = rng.integers(1, n + 1, size=count).tolist()
    if kind in ("lf", "psi", "psi-binary", "access"):
        return [(r,) for r in rows]
    symbols = [index.row_symbol(r) for r in rows]
    if kind == "select":
        return [(c, r - index.carr[c]) for c, r in zip(symbols, rows)]
    prefixes = rng.integers(0, n + 1, size=count).tolist()
    return list(zip(symbols, prefixes))


def query_function(index: AnyIndex, kind: str) -> Callable[..., int]:
    if kind == "select" and not getattr(index, "supports_select", True):
        raise UnsupportedQueryError("this index mode has no select support")
    try:
        return {
            "lf": index.lf,
            "psi": index.psi,
            "psi-binary": index.psi_binary,
            "select": index.select,
            "rank": index.rank,
            "access": index.access,
        }[kind]
    except KeyError as exc:
        raise InvalidInputError(f"unknown query kind {kind!r}") from exc


def run_queries(index: AnyIndex, kind: str, queries: Sequence[Query]) -> List[int]:
    fn = query_function(index, kind)
    return [fn(*q) for q in queries]


def answer_digest(answers: Sequence[int]) -> str:
    """blake2b over the answers as little-endian 64-bit words; empty for no answers."""

    if not len(answers):
        return ""
    words = np.asarray(answers, dtype=np.uint64).astype("<u8")
    return hashlib.blake2b(words.tobytes(), digest_size=16).hexdigest()


def _run_sharded(
    fn: Callable[..., int], queries: Sequence[Query], pool: ThreadPoolExecutor, threads: int
) -> List[int]:
    step = -(-len(queries) // threads)
    shards = [queries[i : i + step] for i in range(0, len(queries), step)]
    answers: List[int] = []
    for part in pool.map(lambda shard: [fn(*q) for q in shard], shards):
        answers.extend(part)
    return answers


def timed_answers(
    index: AnyIndex,
    kind: str,
    queries: Sequence[Query],
    *,
    batches: int = 5,
    threads: int = 1,
) -> Tuple[List[int], float]:
    """Answers in query order and the median nanoseconds per query.

    The queries are cut into ``batches`` equal slices after a warm-up and
    each slice is timed while its answers are collected.
    """

    if not queries:
        return [], 0.0
    fn = query_function(index, kind)
    for q in queries[:WARMUP_QUERIES]:
        fn(*q)
    batches = max(1, min(batches, len(queries)))
    bounds = np.linspace(0, len(queries), batches + 1).astype(int).tolist()
    answers: List[int] = []
    samples: List[float] = []
    with ThreadPoolExecutor(max_workers=max(threads, 1)) as pool:
        for lo, hi in zip(bounds, bounds[1:]):
            batch = queries[lo:hi]
            start = time.perf_counter_ns()
            if threads > 1:
                part = _run_sharded(fn, batch, pool, threads)
            else:
                part = [fn(*q) for q in batch]
            samples.append((time.perf_counter_ns() - start) / len(batch))
            answers.extend(part)
    return answers, float(statistics.median(samples))


def time_queries(
    index: AnyIndex,
    kind: str,
    queries: Sequence[Query],
    *,
    batches: int = 5,
    threads: int = 1,
) -> float:
    """Median nanoseconds per query over ``batches`` equal slices after a warm-up."""

    return timed_answers(index, kind, queries, batches=batches, threads=threads)[1]


@dataclass
class BenchRow:
    mode: str
    kind: str
    queries: int
    ns_per_query: Optional[float]
    digest: Optional[str]


@dataclass
class BenchReport:
    seed: int
    length: int
    sub_rate: float
    indel_rate: float
    reference_extra: int = 0
    sizes: Dict[str, Dict[str, int]] = field(default_factory=dict)
    rows: List[BenchRow] = field(default_factory=list)

    def latency(self, mode: str, kind: str) -> Optional[float]:
        for row in self.rows:
            if row.mode == mode and row.kind == kind:
                return row.ns_per_query
        return None


def check_digests(rows: Sequence[BenchRow]) -> None:
    """Raise unless every supported mode agrees on each query kind's digest.

    Psi and binary-search Psi must agree with each other as well.
    """

    groups: Dict[str, List[BenchRow]] = {}
    for row in rows:
        if row.digest is not None:
            key = "psi" if row.kind == "psi-binary" else row.kind
            groups.setdefault(key, []).append(row)
    for kind, members in groups.items():
        digests = {r.digest for r in members}
        if len(digests) > 1:
            detail = ", ".join(f"{r.mode}/{r.kind}={r.digest}" for r in members)
            raise AnswerMismatchError(f"answers differ for {kind}: {detail}")


def _reference_variants(
    settings: BenchSettings, mode: str, pair: MutatedPair
) -> Iterator[Tuple[str, bytes, Alignment]]:
    """The plain reference and, for relative modes, one with an extra block appended."""

    mode = IndexMode(mode).value
    yield mode, pair.text1, pair.alignment
    if settings.reference_extra > 0 and mode != IndexMode.PLAIN.value:
        extra = random_text(np.random.default_rng(settings.seed + 1), settings.reference_extra)
        # appended reference characters stay unmatched, the pairs are unchanged
        alignment = Alignment(pair.alignment.n1 + len(extra), pair.alignment.n2, pair.alignment.matches)
        yield f"{mode}@ref+{settings.reference_extra}", pair.text1 + extra, alignment


def run_bench(
    settings: BenchSettings,
    *,
    modes: Sequence[str] = tuple(m.value for m in IndexMode),
    kinds: Sequence[str] = ("lf", "psi", "psi-binary"),
    config: IndexConfig = DEFAULT_CONFIG,
) -> BenchReport:
    """Build every mode over one mutated pair, time the queries, gate on digests.

    Timings are attached to the report only once every mode's answers
    agree.
    """

    config = replace(config, sparse_encoding=settings.encoding)
    pair = mutate(settings.seed, settings.length, settings.sub_rate, settings.indel_rate)
    report = BenchReport(
        settings.seed, settings.length, settings.sub_rate, settings.indel_rate, settings.reference_extra
    )
    indexes: Dict[str, AnyIndex] = {}
    for mode in modes:
        for label, reference, alignment in _reference_variants(settings, mode, pair):
            started = time.perf_counter()
            index = build_index(mode, reference, pair.text2, text_alignment=alignment, config=config)
            indexes[label] = index
            report.sizes[label] = component_sizes(index, config=config)
            logger.info(
                "built %s in %.1fs: %d bytes",
                label, time.perf_counter() - started, report.sizes[label]["total"],
            )

    timings: List[Tuple[BenchRow, float]] = []
    for kind in kinds:
        for label, index in indexes.items():
            queries = make_queries(index, kind, settings.queries, settings.seed)
            try:
                answers, ns = timed_answers(
                    index, kind, queries, batches=settings.batches, threads=settings.threads
                )
                if settings.threads > 1:
                    answers = run_queries(index, kind, queries)
            except UnsupportedQueryError:
                logger.info("%s does not answer %s queries", label, kind)
                report.rows.append(BenchRow(label, kind, 0, None, None))
                continue
            row = BenchRow(label, kind, len(queries), None, answer_digest(answers))
            report.rows.append(row)
            timings.append((row, ns))
    check_digests(report.rows)

    for row, ns in timings:
        row.ns_per_query = ns
        logger.info("%s %s: %.0f ns/query", row.mode, row.kind, ns)
    return report


def format_table(report: BenchReport) -> str:
    """One line per mode: bytes without and with the reference, then ns/query per kind."""

    kinds = list(dict.fromkeys(row.kind for row in report.rows))
    modes = list(dict.fromkeys([*report.sizes, *(row.mode for row in report.rows)]))
    header = ["mode", "bytes", "with ref", *(f"{k} ns" for k in kinds)]
    lines = [header]
    for mode in modes:
        sizes = report.sizes.get(mode, {})
        cells = [mode, str(sizes.get("own", "-")), str(sizes.get("total", "-"))]
        for kind in kinds:
            value = report.latency(mode, kind)
            cells.append("-" if value is None else f"{value:.0f}")
        lines.append(cells)
    widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
    return "\n".join(
        "  ".join(cell.ljust(width) for cell, width in zip(line, widths)).rstrip()
        for line in lines
    )


def report_records(report: BenchReport) -> Iterator[Dict[str, Any]]:
    """Flat records for line-delimited JSON output."""

    yield {
        "record": "params",
        "seed": report.seed,
        "length": report.length,
        "sub_rate": report.sub_rate,
        "indel_rate": report.indel_rate,
        "reference_extra": report.reference_extra,
    }
    for mode, sizes in report.sizes.items():
        yield {"record": "size", "mode": mode, **sizes}
    for row in report.rows:
        yield {"record": "query", **asdict(row)}
