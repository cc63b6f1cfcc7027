from dataclasses import replace
import json

import pytest

from conftest import GOLDEN_T1, GOLDEN_T2
from relsel.bench import (
    BenchReport,
    BenchRow,
    answer_digest,
    check_digests,
    format_table,
    make_queries,
    report_records,
    run_bench,
    run_queries,
    time_queries,
    timed_answers,
)
from relsel.config import BenchSettings
from relsel.container import IndexMode, build_index
from relsel.errors import AnswerMismatchError, InvalidInputError, UnsupportedQueryError

SMALL = BenchSettings(seed=9, length=3000, sub_rate=0.01, indel_rate=0.002, queries=400, batches=3)


@pytest.fixture(scope="module")
def indexes():
    return {mode: build_index(mode, GOLDEN_T1, GOLDEN_T2) for mode in IndexMode}


def test_queries_are_valid_and_mode_independent(indexes):
    plain = indexes[IndexMode.PLAIN]
    for kind in ("lf", "psi", "select", "rank", "access"):
        queries = make_queries(plain, kind, 200, seed=1)
        assert queries == make_queries(indexes[IndexMode.RELATIVE_SELECT], kind, 200, seed=1)
        run_queries(plain, kind, queries)


def test_digests_agree_across_modes(indexes):
    digests = set()
    for mode, index in indexes.items():
        queries = make_queries(index, "psi", 300, seed=2)
        digests.add(answer_digest(run_queries(index, "psi", queries)))
        digests.add(answer_digest(run_queries(index, "psi-binary", queries)))
    assert len(digests) == 1


def test_toy_answers_follow_the_lf_formula(indexes):
    index = indexes[IndexMode.RELATIVE_SELECT]
    queries = make_queries(index, "lf", 50, seed=3)
    for (i,), answer in zip(queries, run_queries(index, "lf", queries)):
        c = index.access(i)
        assert answer == index.carr[c] + index.rank(c, i)


def test_empty_digest():
    assert answer_digest([]) == ""
    assert len(answer_digest([1, 2, 3])) == 32


def test_select_unsupported_without_markers(indexes):
    index = indexes[IndexMode.RELATIVE]
    with pytest.raises(UnsupportedQueryError):
        run_queries(index, "select", make_queries(index, "select", 5, seed=0))
    with pytest.raises(InvalidInputError):
        make_queries(index, "locate", 5, seed=0)


def test_timing_is_positive(indexes):
    index = indexes[IndexMode.PLAIN]
    queries = make_queries(index, "psi", 100, seed=4)
    assert time_queries(index, "psi", queries, batches=5) > 0
    assert time_queries(index, "psi", queries, batches=2, threads=3) > 0
    assert time_queries(index, "psi", [], batches=5) == 0.0


def test_check_digests_flags_mismatch():
    rows = [BenchRow("a", "psi", 1, None, "x"), BenchRow("b", "psi-binary", 1, None, "y")]
    with pytest.raises(AnswerMismatchError):
        check_digests(rows)
    check_digests([BenchRow("a", "select", 0, None, None), BenchRow("b", "select", 1, None, "x")])


def test_run_bench_small():
    report = run_bench(SMALL, kinds=("lf", "psi", "psi-binary", "select"))
    assert set(report.sizes) == {m.value for m in IndexMode}
    assert report.latency("relative-fm", "select") is None
    assert report.latency("plain-fm", "psi") > 0
    plain = report.sizes["plain-fm"]["total"]
    assert report.sizes["relative-fm"]["total"] < report.sizes["relative-fm+select"]["total"]
    assert plain > 0
    table = format_table(report)
    assert table.splitlines()[0].split()[:2] == ["mode", "bytes"]
    assert len(table.splitlines()) == 4
    records = [json.loads(json.dumps(r)) for r in report_records(report)]
    assert records[0]["record"] == "params"
    assert sum(r["record"] == "query" for r in records) == 12


def test_single_run_table():
    report = BenchReport(1, 10, 0.0, 0.0, sizes={"plain-fm": {"own": 99, "total": 99}})
    report.rows.append(BenchRow("plain-fm", "lf", 10, 123.4, "abc"))
    lines = format_table(report).splitlines()
    assert len(lines) == 2
    assert lines[1].split() == ["plain-fm", "99", "99", "123"]


def test_timed_answers_keep_query_order(indexes):
    index = indexes[IndexMode.RELATIVE_SELECT]
    queries = make_queries(index, "lf", 120, seed=5)
    expected = run_queries(index, "lf", queries)
    for threads in (1, 4):
        answers, ns = timed_answers(index, "lf", queries, batches=3, threads=threads)
        assert answers == expected
        assert ns > 0


def test_reference_with_extra_block():
    settings = replace(SMALL, reference_extra=500)
    report = run_bench(settings, modes=("plain-fm", "relative-fm+select"), kinds=("psi",))
    assert set(report.sizes) == {"plain-fm", "relative-fm+select", "relative-fm+select@ref+500"}
    base = report.sizes["relative-fm+select"]
    extended = report.sizes["relative-fm+select@ref+500"]
    assert extended["total"] > base["total"]
    assert extended["own"] >= base["own"]
    assert report.latency("relative-fm+select@ref+500", "psi") > 0
    assert {r.digest for r in report.rows} == {report.rows[0].digest}
    assert next(report_records(report))["reference_extra"] == 500
