import numpy as np
import pytest

from conftest import GOLDEN_S1, GOLDEN_S2, GOLDEN_T1, GOLDEN_T2, oracle_pairs
from relsel.bwt import (
    BwtConvention,
    build_suffix_array,
    bwt_of,
    inverse_bwt,
    printable,
)
from relsel.config import IndexConfig
from relsel.errors import InvalidInputError

DOUBLING = IndexConfig(naive_sa_limit=0)


def test_banana():
    assert printable(bwt_of(b"banana")) == "annb$aa"
    assert build_suffix_array(b"banana").positions.tolist() == [7, 6, 4, 2, 1, 5, 3]


def test_empty_text():
    assert build_suffix_array(b"").positions.tolist() == [1]
    assert printable(bwt_of(b"")) == "$"
    assert inverse_bwt(b"\x00") == b""


def test_stripped_convention_reproduces_golden_strings():
    assert bwt_of(GOLDEN_T1, BwtConvention.STRIPPED) == GOLDEN_S1
    assert bwt_of(GOLDEN_T2, BwtConvention.STRIPPED) == GOLDEN_S2
    assert printable(bwt_of(GOLDEN_T1)) == "TCTGCGTAA$AAGGTGC"


def test_cyclic_convention_does_not():
    assert bwt_of(GOLDEN_T1, BwtConvention.CYCLIC) == b"CTGCGTAATAGATGGC"
    assert bwt_of(GOLDEN_T1, BwtConvention.CYCLIC) != GOLDEN_S1


def test_sentinel_in_text_rejected():
    with pytest.raises(InvalidInputError):
        build_suffix_array(b"AC\x00GT")


def test_doubling_matches_naive_sort(rng):
    for _ in range(oracle_pairs(60)):
        n = int(rng.integers(0, 257))
        alphabet = b"AC" if rng.random() < 0.3 else b"ACGT"
        text = bytes(rng.choice(list(alphabet), size=n).tolist())
        naive = build_suffix_array(text)
        fast = build_suffix_array(text, config=DOUBLING)
        assert fast.positions.tolist() == naive.positions.tolist()
        terminated = text + b"\x00"
        suffixes = [terminated[p - 1 :] for p in naive.positions.tolist()]
        assert suffixes == sorted(suffixes)


def test_inverse_round_trip(rng):
    for _ in range(oracle_pairs(200)):
        n = int(rng.integers(0, 200))
        text = bytes(rng.choice(list(b"ACGT"), size=n).tolist())
        assert inverse_bwt(bwt_of(text)) == text
    long_text = b"ACGTTGCAAT" * 900
    assert inverse_bwt(bwt_of(long_text, config=DOUBLING)) == long_text


def test_inverse_rejects_malformed():
    with pytest.raises(InvalidInputError):
        inverse_bwt(b"ACGT")
    with pytest.raises(InvalidInputError):
        inverse_bwt(b"A\x00\x00")
    # two cycles: "A$" rows and a detached "BB" loop
    with pytest.raises(InvalidInputError):
        inverse_bwt(b"\x00BAB")


def test_inverse_suffix_array():
    sa = build_suffix_array(b"banana")
    isa = sa.inverse()
    assert np.array_equal(sa.positions[isa - 1], np.arange(1, 8))
