"""Suffix arrays and Burrows-Wheeler transforms.

The production convention appends the sentinel byte 0x00, which sorts
before every other character. Two display conventions exist for comparing
against BWTs printed without a sentinel: ``STRIPPED`` drops the sentinel
from the production BWT and ``CYCLIC`` sorts the plain rotations.
"""

from __future__ import annotations

from dataclasses import dataclass
import enum
import logging

import numpy as np

from .config import DEFAULT_CONFIG, SENTINEL, IndexConfig
from .errors import InvalidInputError
from .sequence import TextLike, as_byte_array

logger = logging.getLogger(__name__)


class BwtConvention(str, enum.Enum):
    SENTINEL = "sentinel"
    STRIPPED = "stripped"
    CYCLIC = "cyclic"


@dataclass(frozen=True, eq=False)
class SuffixArray:
    """Sorted suffixes of ``text + sentinel`` as 1-based start positions."""

    text: bytes
    positions: np.ndarray

    def __post_init__(self) -> None:
        if self.positions.size != len(self.text) + 1:
            raise InvalidInputError(
                f"suffix array of {len(self.text)} characters needs {len(self.text) + 1} rows"
            )

    def __len__(self) -> int:
        return int(self.positions.size)

    def inverse(self) -> np.ndarray:
        """``isa[p - 1]`` is the 1-based row of the suffix starting at p."""

        isa = np.empty(self.positions.size, dtype=np.int64)
        isa[self.positions - 1] = np.arange(1, self.positions.size + 1, dtype=np.int64)
        return isa

    def bwt(self) -> bytes:
        data = np.frombuffer(self.text + bytes([SENTINEL]), dtype=np.uint8)
        # the row starting at position 1 wraps to the sentinel at the end
        return data[self.positions - 2].tobytes()


def _check_text(data: np.ndarray) -> None:
    if data.size and np.any(data == SENTINEL):
        raise InvalidInputError("text must not contain the sentinel byte 0x00")


def _rotation_order(codes: np.ndarray) -> np.ndarray:
    """0-based start indices of the cyclic rotations of ``codes`` in sorted order.

    Prefix doubling: each round sorts by (rank of the first k characters,
    rank of the following k), until every rank is distinct or the compared
    prefix spans the whole string.
    """

    n = codes.size
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    index = np.arange(n, dtype=np.int64)
    order = np.argsort(codes, kind="stable")
    sorted_codes = codes[order]
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.concatenate(([0], np.cumsum(sorted_codes[1:] != sorted_codes[:-1])))
    k = 1
    while rank.max() < n - 1 and k < n:
        second = rank[(index + k) % n]
        order = np.lexsort((second, rank))
        first_sorted, second_sorted = rank[order], second[order]
        changed = (first_sorted[1:] != first_sorted[:-1]) | (second_sorted[1:] != second_sorted[:-1])
        rank = np.empty(n, dtype=np.int64)
        rank[order] = np.concatenate(([0], np.cumsum(changed)))
        k *= 2
    return order.astype(np.int64)


def build_suffix_array(
    text: TextLike, *, config: IndexConfig = DEFAULT_CONFIG
) -> SuffixArray:
    """Suffix array of ``text`` with the sentinel appended internally."""

    data = as_byte_array(text)
    _check_text(data)
    raw = data.tobytes()
    terminated = raw + bytes([SENTINEL])
    if data.size < config.naive_sa_limit:
        order = np.array(
            sorted(range(len(terminated)), key=lambda i: terminated[i:]), dtype=np.int64
        )
    else:
        order = _rotation_order(np.frombuffer(terminated, dtype=np.uint8).astype(np.int64))
    logger.debug("suffix array over %d characters", data.size)
    return SuffixArray(raw, order + 1)


def bwt_of(
    text: TextLike,
    convention: BwtConvention = BwtConvention.SENTINEL,
    *,
    config: IndexConfig = DEFAULT_CONFIG,
) -> bytes:
    convention = BwtConvention(convention)
    if convention is BwtConvention.CYCLIC:
        data = as_byte_array(text)
        _check_text(data)
        order = _rotation_order(data.astype(np.int64))
        return data[(order - 1) % max(data.size, 1)].tobytes()
    bwt = build_suffix_array(text, config=config).bwt()
    if convention is BwtConvention.STRIPPED:
        return bwt.replace(bytes([SENTINEL]), b"")
    return bwt


def inverse_bwt(bwt: TextLike) -> bytes:
    """Recover the text from a sentinel BWT."""

    data = as_byte_array(bwt)
    sentinels = int(np.count_nonzero(data == SENTINEL))
    if sentinels != 1:
        raise InvalidInputError(f"a sentinel BWT holds exactly one 0x00 byte, found {sentinels}")
    lf = np.empty(data.size, dtype=np.int64)
    lf[np.argsort(data, kind="stable")] = np.arange(data.size, dtype=np.int64)
    column = data.tolist()
    steps = lf.tolist()
    out = bytearray()
    row = 0
    for _ in range(data.size - 1):
        char = column[row]
        if char == SENTINEL:
            raise InvalidInputError("BWT does not describe a single cycle")
        out.append(char)
        row = steps[row]
    if column[row] != SENTINEL:
        raise InvalidInputError("BWT does not describe a single cycle")
    out.reverse()
    return bytes(out)


def printable(bwt: bytes) -> str:
    """Render a BWT with the sentinel shown as ``$``."""

    return bwt.replace(bytes([SENTINEL]), b"$").decode("latin-1")
