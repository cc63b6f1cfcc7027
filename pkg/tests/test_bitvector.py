import numpy as np
import pytest

from relsel.bitvector import (
    BitVector,
    DenseBitVector,
    EliasFanoBitVector,
    SparseBitVector,
    build_bitvector,
)
from relsel.config import IndexConfig
from relsel.errors import InvalidInputError, NotFoundError, RangeError

SMALL_BLOCKS = IndexConfig(rank_block_bits=64)
ELIAS_FANO = IndexConfig(rank_block_bits=64, sparse_encoding="elias-fano")


def test_golden_marker_vector():
    v = build_bitvector("0001000000010101")
    assert len(v) == 16
    assert v.popcount == 4
    assert v.rank0(13) == 11


def test_golden_select_examples():
    assert build_bitvector("10100").select0(2) == 4
    assert build_bitvector("010000000001010").select1(3) == 14


def test_empty_and_saturated():
    empty = build_bitvector([])
    assert (len(empty), empty.popcount, empty.rank1(0)) == (0, 0, 0)
    full = build_bitvector([1] * 8)
    assert full.popcount == 8
    assert full.rank0(8) == 0
    assert full.select1(8) == 8


def test_errors_are_distinct():
    v = build_bitvector("0110")
    with pytest.raises(RangeError):
        v.rank1(5)
    with pytest.raises(RangeError):
        v.access(0)
    with pytest.raises(NotFoundError):
        v.select1(3)
    with pytest.raises(NotFoundError):
        v.select0(0)
    with pytest.raises(InvalidInputError):
        build_bitvector("012")


def _assert_matches_scan(v: BitVector, bits: np.ndarray) -> None:
    n = bits.size
    ones = np.concatenate(([0], np.cumsum(bits)))
    for i in range(n + 1):
        assert v.rank1(i) == ones[i]
        assert v.rank0(i) == i - ones[i]
    for polarity in (0, 1):
        positions = np.flatnonzero(bits == polarity) + 1
        for j, pos in enumerate(positions, start=1):
            assert v.select(polarity, j) == pos
        assert v.count(polarity) == positions.size
    assert v.to_bits().tolist() == bits.astype(int).tolist()


@pytest.mark.parametrize("sparse", [False, True])
def test_layouts_agree_with_linear_scan(rng, sparse):
    for _ in range(120):
        n = int(rng.integers(0, 700))
        bits = rng.random(n) < float(rng.uniform(0, 1))
        v = build_bitvector(bits, config=SMALL_BLOCKS, sparse=sparse)
        assert isinstance(v, SparseBitVector if sparse else DenseBitVector)
        _assert_matches_scan(v, bits)


@pytest.mark.slow
@pytest.mark.parametrize(
    "config, sparse, layout",
    [
        (SMALL_BLOCKS, False, DenseBitVector),
        (SMALL_BLOCKS, True, SparseBitVector),
        (ELIAS_FANO, True, EliasFanoBitVector),
    ],
)
def test_thousand_vectors_up_to_4096_bits(rng, config, sparse, layout):
    for _ in range(1000):
        n = int(rng.integers(0, 4097))
        bits = rng.random(n) < float(rng.uniform(0, 1))
        v = build_bitvector(bits, config=config, sparse=sparse)
        assert isinstance(v, layout)
        _assert_matches_scan(v, bits)


def test_duality_across_block_boundaries():
    bits = np.zeros(1000, dtype=bool)
    bits[[0, 63, 64, 127, 128, 511, 512, 999]] = True
    v = build_bitvector(bits, config=SMALL_BLOCKS, sparse=False)
    for j in range(1, v.popcount + 1):
        assert v.rank1(v.select1(j)) == j
    for i in range(1, 1001):
        assert v.select(v.access(i), v.rank(v.access(i), i)) == i


def test_density_heuristic_picks_sparse_for_rare_bits():
    rare = np.zeros(1024, dtype=bool)
    rare[::100] = True
    assert isinstance(build_bitvector(rare), SparseBitVector)
    assert isinstance(build_bitvector(~rare), SparseBitVector)
    assert isinstance(build_bitvector(np.arange(64) % 2 == 0), DenseBitVector)


def test_sparse_payload_stores_the_minority_polarity():
    rare = np.zeros(1024, dtype=bool)
    rare[::100] = True
    for bits, polarity in ((rare, 1), (~rare, 0)):
        payload = build_bitvector(bits).to_bytes()
        assert payload[9] == polarity
        assert int.from_bytes(payload[11:19], "little") == 11
        assert BitVector.from_bytes(payload).to_bits().tolist() == bits.astype(int).tolist()


@pytest.mark.parametrize("sparse", [False, True])
def test_serialization_preserves_answers(sparse):
    v = build_bitvector("0001000000010101", sparse=sparse)
    payload = v.to_bytes()
    assert payload[8] == (1 if sparse else 0)
    back = BitVector.from_bytes(payload)
    assert back == v
    assert back.select1(4) == 16
    assert v.nbytes == len(payload)


def test_corrupt_payload_rejected():
    payload = build_bitvector("0110", sparse=False).to_bytes()
    with pytest.raises(InvalidInputError):
        BitVector.from_bytes(payload[:-1])
    with pytest.raises(InvalidInputError):
        BitVector.from_bytes(payload[:8] + b"\x07" + payload[9:])


def test_elias_fano_payload_layout():
    v = build_bitvector("0001000000010101", config=ELIAS_FANO, sparse=True)
    assert isinstance(v, EliasFanoBitVector)
    payload = v.to_bytes()
    assert payload[8] == 3
    # low width 2: one byte of low bits, nine unary bits in two bytes
    assert payload[9:11] == bytes([1, 2])
    assert len(payload) == 9 + 10 + 1 + 2
    back = BitVector.from_bytes(payload)
    assert isinstance(back, EliasFanoBitVector)
    assert back == v
    assert back.select1(3) == 14
    assert len(payload) < build_bitvector("0001000000010101", sparse=True).nbytes


def test_elias_fano_round_trips_random_vectors(rng):
    for _ in range(60):
        n = int(rng.integers(0, 3000))
        bits = rng.random(n) < float(rng.uniform(0, 0.2))
        v = build_bitvector(bits, config=ELIAS_FANO, sparse=True)
        back = BitVector.from_bytes(v.to_bytes(), config=ELIAS_FANO)
        assert back.to_bits().tolist() == bits.astype(int).tolist()


def test_elias_fano_stays_small_for_long_sparse_vectors():
    bits = np.zeros(1_000_000, dtype=bool)
    assert build_bitvector(bits, config=ELIAS_FANO).nbytes == 9 + 10 + 1
    bits[::100_000] = True
    v = build_bitvector(bits, config=ELIAS_FANO)
    assert v.nbytes == 9 + 10 + 20 + 4
    assert v.nbytes < build_bitvector(bits).nbytes


def test_elias_fano_corruption_rejected():
    payload = build_bitvector("0001000000010101", config=ELIAS_FANO, sparse=True).to_bytes()
    with pytest.raises(InvalidInputError):
        BitVector.from_bytes(payload[:-1])
    with pytest.raises(InvalidInputError):
        BitVector.from_bytes(payload[:-2] + b"\xff\x01")
