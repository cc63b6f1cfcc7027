"""Desk-scale space and timing checks; run with ``pytest -m slow``."""

import os
import time

import numpy as np
import pytest

from relsel.config import BenchSettings, IndexConfig
from relsel.fm import build_fm_index, build_relative_fm
from relsel.mutate import mutate
from relsel.relative import build_relative
from relsel.sequence import build_sequence
from relsel.bench import run_bench

pytestmark = pytest.mark.slow

LENGTH = 1_000_000
# fixed-width positions keep the marker size proportional to the edit count
FIXED = IndexConfig(sparse_encoding="positions")


def test_marker_size_scales_linearly_with_edits():
    targets = [100, 1_000, 10_000, 100_000]
    edits, sizes = [], []
    for d in targets:
        # every substitution removes one character from each side of C
        pair = mutate(17, LENGTH, d / (2 * LENGTH), 0.0)
        rel = build_relative(build_sequence(pair.text1), pair.text2, pair.alignment, config=FIXED)
        edits.append(pair.alignment.d_indel)
        sizes.append(rel.marker_nbytes())
    assert sizes == sorted(sizes)
    slope = np.polyfit(np.log(edits), np.log(sizes), 1)[0]
    assert 0.8 <= slope <= 1.3
    per_edit = np.array(sizes) / np.array(edits)
    assert per_edit.max() / per_edit.min() <= 3


def test_relative_index_direction():
    settings = BenchSettings(
        seed=5, length=200_000, sub_rate=0.001, indel_rate=0.0002, queries=3_000, batches=5
    )
    report = run_bench(settings, kinds=("lf", "psi", "psi-binary"))
    plain = report.sizes["plain-fm"]["own"]
    assert report.sizes["relative-fm+select"]["own"] < plain
    assert report.sizes["relative-fm"]["own"] < report.sizes["relative-fm+select"]["own"]
    rel_psi = report.latency("relative-fm+select", "psi")
    rel_binary = report.latency("relative-fm+select", "psi-binary")
    assert rel_binary >= 2 * rel_psi
    assert report.latency("plain-fm", "psi") < rel_psi


def test_unaligned_build_at_one_megabase():
    pair = mutate(5, LENGTH, 0.001, 0.0002)
    rel = build_relative_fm(pair.text1, pair.text2)
    plain = build_fm_index(pair.text2)
    assert len(rel) == len(plain)
    for i in np.random.default_rng(8).integers(1, len(plain) + 1, size=2000).tolist():
        assert rel.lf(i) == plain.lf(i)
        assert rel.psi(i) == plain.psi(i)


FULL_LENGTH = int(os.environ.get("RELSEL_BENCH_LENGTH", 10_000_000))
FULL_QUERIES = int(os.environ.get("RELSEL_BENCH_QUERIES", 1_000_000))
FULL_BUDGET_SECONDS = 30 * 60


def test_relative_index_direction_full_scale():
    settings = BenchSettings(
        seed=5, length=FULL_LENGTH, sub_rate=0.001, indel_rate=0.0002, queries=FULL_QUERIES, batches=5
    )
    started = time.perf_counter()
    report = run_bench(settings, modes=("plain-fm", "relative-fm+select"))
    assert time.perf_counter() - started < FULL_BUDGET_SECONDS
    assert report.sizes["relative-fm+select"]["own"] < report.sizes["plain-fm"]["own"]
    rel_psi = report.latency("relative-fm+select", "psi")
    assert report.latency("relative-fm+select", "psi-binary") >= 2 * rel_psi
    assert report.latency("plain-fm", "psi") < rel_psi
