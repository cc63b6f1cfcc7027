"""Shared fixtures and naive oracles."""

from __future__ import annotations

import os
from typing import List, Tuple

import numpy as np
import pytest

# BWTs (sentinel dropped) of GCACTTAGAGGTCAGT and GCACTAGACGTCAGT
GOLDEN_S1 = b"TCTGCGTAAAAGGTGC"
GOLDEN_S2 = b"TGCTCGTAAAACGCG"
GOLDEN_T1 = b"GCACTTAGAGGTCAGT"
GOLDEN_T2 = b"GCACTAGACGTCAGT"


def oracle_pairs(default: int = 60) -> int:
    """Size of the random oracle suites; RELSEL_ORACLE_PAIRS raises it."""

    return int(os.environ.get("RELSEL_ORACLE_PAIRS", default))


def naive_rank(text: bytes, x: int, i: int) -> int:
    return text[:i].count(bytes([x]))


def naive_select(text: bytes, x: int, j: int) -> int:
    seen = 0
    for pos, char in enumerate(text, start=1):
        if char == x:
            seen += 1
            if seen == j:
                return pos
    raise LookupError


def naive_positions(text: bytes, x: int) -> List[int]:
    return [pos for pos, char in enumerate(text, start=1) if char == x]


def random_pair(rng: np.random.Generator, max_len: int = 2048) -> Tuple[bytes, bytes]:
    from relsel.mutate import mutate_text, random_text

    length = int(rng.integers(0, max_len + 1))
    text1 = random_text(rng, length)
    text2, _ = mutate_text(rng, text1, float(rng.uniform(0, 0.2)), float(rng.uniform(0, 0.1)))
    return text1, text2


@pytest.fixture
def golden_strings() -> Tuple[bytes, bytes]:
    return GOLDEN_S1, GOLDEN_S2


@pytest.fixture
def golden_texts() -> Tuple[bytes, bytes]:
    return GOLDEN_T1, GOLDEN_T2


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
