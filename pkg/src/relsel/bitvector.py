"""Bit vectors with rank and select in both polarities.

Positions and occurrence ranks are 1-based; ``rank`` takes a prefix length
``0..n``. Two layouts share one interface:

- ``DenseBitVector`` keeps the bits in a ``bitarray`` and samples the number
  of 1s every ``rank_block_bits`` bits;
- ``SparseBitVector`` stores only the sorted positions of the minority bit;
  ``EliasFanoBitVector`` keeps the same positions but serializes them
  compactly (``IndexConfig.sparse_encoding = "elias-fano"``).

``build_bitvector`` picks the sparse layout when the minority bit density is
below ``IndexConfig.sparse_threshold``.

Serialized layout (little-endian)::

    <Q length  <B tag
    tag 0: <Q popcount, packed bit bytes (bit i of the vector is bit i%8 of byte i//8)
    tag 1: <B stored polarity, <B position width (4|8), <Q count, positions
    tag 3: <B stored polarity, <B low width l, <Q count, low bits (count*l),
           unary high bits (count + (n >> l) + 1), each padded to a byte
"""

from __future__ import annotations

import struct
from typing import ClassVar, Iterable, Union

import numpy as np
from bitarray import bitarray
from bitarray.util import count_n

from .config import DEFAULT_CONFIG, IndexConfig
from .errors import (
    InvalidInputError,
    NotFoundError,
    check_position,
    check_prefix,
)

BitsLike = Union[str, bytes, bitarray, np.ndarray, Iterable[int]]


def as_bool_array(bits: BitsLike) -> np.ndarray:
    """Normalise a bit source into a numpy bool array."""

    if isinstance(bits, np.ndarray):
        arr = bits
    elif isinstance(bits, bitarray):
        return np.frombuffer(bits.unpack(), dtype=np.uint8).astype(bool)
    elif isinstance(bits, str):
        arr = np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")
    else:
        arr = np.asarray(list(bits))
    if arr.size == 0:
        return np.zeros(0, dtype=bool)
    if arr.dtype != bool and not np.all((arr == 0) | (arr == 1)):
        raise InvalidInputError("bits must be 0 or 1")
    return arr.astype(bool).ravel()


def _check_polarity(polarity: int) -> None:
    if polarity not in (0, 1):
        raise InvalidInputError(f"polarity must be 0 or 1, got {polarity!r}")


class BitVector:
    """Immutable bit vector; see the module docstring for conventions."""

    TAG: ClassVar[int] = -1
    _HEADER: ClassVar[struct.Struct] = struct.Struct("<QB")

    def __init__(self, length: int, popcount: int) -> None:
        self._length = length
        self._popcount = popcount

    def __len__(self) -> int:
        return self._length

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(n={self._length}, popcount={self._popcount})"
        )

    @property
    def popcount(self) -> int:
        return self._popcount

    def count(self, polarity: int) -> int:
        _check_polarity(polarity)
        return self._popcount if polarity else self._length - self._popcount

    # -- queries ----------------------------------------------------------------
    def rank(self, polarity: int, i: int) -> int:
        """Number of ``polarity`` bits among positions 1..i."""

        _check_polarity(polarity)
        check_prefix(i, self._length)
        ones = self._rank1(i)
        return ones if polarity else i - ones

    def rank0(self, i: int) -> int:
        return self.rank(0, i)

    def rank1(self, i: int) -> int:
        return self.rank(1, i)

    def select(self, polarity: int, j: int) -> int:
        """1-based position of the j-th ``polarity`` bit."""

        total = self.count(polarity)
        if not 1 <= j <= total:
            raise NotFoundError(
                f"select{polarity}({j}) but only {total} such bit(s)"
            )
        return self._select(polarity, j)

    def select0(self, j: int) -> int:
        return self.select(0, j)

    def select1(self, j: int) -> int:
        return self.select(1, j)

    def access(self, i: int) -> int:
        check_position(i, self._length)
        return self._access(i)

    def to_bits(self) -> np.ndarray:
        """Return the bits as a numpy uint8 array of 0/1."""

        raise NotImplementedError

    def to_string(self) -> str:
        return self.to_bits().astype(np.uint8).tobytes().translate(
            bytes.maketrans(b"\x00\x01", b"01")
        ).decode("ascii")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return len(self) == len(other) and bool(
            np.array_equal(self.to_bits(), other.to_bits())
        )

    __hash__ = None  # type: ignore[assignment]

    # -- layout hooks -----------------------------------------------------------
    def _rank1(self, i: int) -> int:
        raise NotImplementedError

    def _select(self, polarity: int, j: int) -> int:
        raise NotImplementedError

    def _access(self, i: int) -> int:
        raise NotImplementedError

    # -- serialization ------------------------------------------------------------
    def to_bytes(self) -> bytes:
        return self._HEADER.pack(self._length, self.TAG) + self._payload()

    def _payload(self) -> bytes:
        raise NotImplementedError

    @property
    def nbytes(self) -> int:
        return len(self.to_bytes())

    @classmethod
    def from_bytes(
        cls, payload: bytes, *, config: IndexConfig = DEFAULT_CONFIG
    ) -> "BitVector":
        if len(payload) < cls._HEADER.size:
            raise InvalidInputError("bit vector payload too short")
        length, tag = cls._HEADER.unpack_from(payload, 0)
        body = payload[cls._HEADER.size :]
        if tag == DenseBitVector.TAG:
            return DenseBitVector._from_payload(length, body, config)
        for layout in (SparseBitVector, EliasFanoBitVector):
            if tag == layout.TAG:
                return layout._from_payload(length, body)
        raise InvalidInputError(f"unknown bit vector tag {tag}")


class DenseBitVector(BitVector):
    """Bit-packed vector with sampled rank blocks."""

    TAG: ClassVar[int] = 0
    _POPCOUNT: ClassVar[struct.Struct] = struct.Struct("<Q")

    def __init__(self, bits: bitarray, block_bits: int) -> None:
        arr = np.frombuffer(bits.unpack(), dtype=np.uint8)
        super().__init__(len(bits), int(arr.sum()))
        self._bits = bits
        self._shift = block_bits.bit_length() - 1
        self._block = block_bits

        n = len(bits)
        blocks = -(-n // block_bits)
        padded = np.zeros(blocks * block_bits, dtype=np.int64)
        padded[:n] = arr
        per_block = padded.reshape(blocks, block_bits).sum(axis=1) if blocks else padded
        ones = np.zeros(blocks + 1, dtype=np.int64)
        np.cumsum(per_block, out=ones[1:])
        starts = np.minimum(np.arange(blocks + 1, dtype=np.int64) * block_bits, n)
        self._ones_np = ones
        self._zeros_np = starts - ones
        self._ones = ones.tolist()

    @classmethod
    def from_bools(cls, arr: np.ndarray, block_bits: int) -> "DenseBitVector":
        bits = bitarray(endian="little")
        bits.pack(arr.astype(bool).tobytes())
        return cls(bits, block_bits)

    def _rank1(self, i: int) -> int:
        block = i >> self._shift
        start = block << self._shift
        if start == i:
            return self._ones[block]
        return self._ones[block] + self._bits.count(1, start, i)

    def _select(self, polarity: int, j: int) -> int:
        samples = self._ones_np if polarity else self._zeros_np
        block = int(np.searchsorted(samples, j, side="left")) - 1
        start = block << self._shift
        chunk = self._bits[start : min(start + self._block, self._length)]
        if not polarity:
            chunk.invert()
        return start + count_n(chunk, j - int(samples[block]))

    def _access(self, i: int) -> int:
        return self._bits[i - 1]

    def to_bits(self) -> np.ndarray:
        return np.frombuffer(self._bits.unpack(), dtype=np.uint8).copy()

    def _payload(self) -> bytes:
        return self._POPCOUNT.pack(self._popcount) + self._bits.tobytes()

    @classmethod
    def _from_payload(
        cls, length: int, body: bytes, config: IndexConfig
    ) -> "DenseBitVector":
        need = cls._POPCOUNT.size + (length + 7) // 8
        if len(body) != need:
            raise InvalidInputError(
                f"dense bit vector of {length} bits needs {need} payload bytes, got {len(body)}"
            )
        (popcount,) = cls._POPCOUNT.unpack_from(body, 0)
        bits = bitarray(endian="little")
        bits.frombytes(body[cls._POPCOUNT.size :])
        del bits[length:]
        vector = cls(bits, config.rank_block_bits)
        if vector.popcount != popcount:
            raise InvalidInputError("dense bit vector popcount mismatch")
        return vector


class SparseBitVector(BitVector):
    """Stores the sorted 1-based positions of the minority bit."""

    TAG: ClassVar[int] = 1
    _META: ClassVar[struct.Struct] = struct.Struct("<BBQ")

    def __init__(self, length: int, positions: np.ndarray, polarity: int) -> None:
        _check_polarity(polarity)
        positions = np.asarray(positions, dtype=np.int64)
        stored = positions.size
        super().__init__(length, stored if polarity else length - stored)
        self._polarity = polarity
        self._positions = positions
        self._positions_list = positions.tolist()
        # other-polarity bits preceding each stored position
        self._gaps = positions - 1 - np.arange(stored, dtype=np.int64)

    @classmethod
    def from_bools(cls, arr: np.ndarray, polarity: int) -> "SparseBitVector":
        target = arr if polarity else ~arr
        return cls(arr.size, np.flatnonzero(target) + 1, polarity)

    def _stored_rank(self, i: int) -> int:
        return int(np.searchsorted(self._positions, i, side="right"))

    def _rank1(self, i: int) -> int:
        stored = self._stored_rank(i)
        return stored if self._polarity else i - stored

    def _select(self, polarity: int, j: int) -> int:
        if polarity == self._polarity:
            return self._positions_list[j - 1]
        return j + int(np.searchsorted(self._gaps, j, side="left"))

    def _access(self, i: int) -> int:
        idx = int(np.searchsorted(self._positions, i, side="left"))
        hit = idx < len(self._positions_list) and self._positions_list[idx] == i
        return self._polarity if hit else 1 - self._polarity

    def to_bits(self) -> np.ndarray:
        fill = 1 - self._polarity
        out = np.full(self._length, fill, dtype=np.uint8)
        out[self._positions - 1] = self._polarity
        return out

    def _payload(self) -> bytes:
        width = 4 if self._length < (1 << 32) else 8
        dtype = "<u4" if width == 4 else "<u8"
        meta = self._META.pack(self._polarity, width, len(self._positions_list))
        return meta + self._positions.astype(dtype).tobytes()

    @classmethod
    def _from_payload(cls, length: int, body: bytes) -> "SparseBitVector":
        if len(body) < cls._META.size:
            raise InvalidInputError("sparse bit vector payload too short")
        polarity, width, count = cls._META.unpack_from(body, 0)
        if width not in (4, 8):
            raise InvalidInputError(f"invalid position width {width}")
        data = body[cls._META.size :]
        if len(data) != width * count:
            raise InvalidInputError("sparse bit vector position table truncated")
        positions = np.frombuffer(data, dtype="<u4" if width == 4 else "<u8")
        return cls(length, _checked_positions(positions, length), polarity)


class EliasFanoBitVector(SparseBitVector):
    """Sparse vector whose positions serialize in Elias-Fano form.

    Each position ``p - 1`` splits into ``low_bits`` low bits, packed at a
    fixed width, and a high part written in unary. The payload costs about
    ``2 + log2(n / m)`` bits per stored position.
    """

    TAG: ClassVar[int] = 3

    @staticmethod
    def _low_bits(length: int, count: int) -> int:
        if count == 0:
            return length.bit_length()
        return max(0, (length // count).bit_length() - 1)

    def _payload(self) -> bytes:
        values = self._positions - 1
        count = values.size
        width = self._low_bits(self._length, count)

        lows = (values[:, None] >> np.arange(width, dtype=np.int64)) & 1
        low_bits = bitarray(endian="little")
        low_bits.pack(lows.astype(bool).tobytes())

        upper = np.zeros(count + (self._length >> width) + 1, dtype=bool)
        upper[(values >> width) + np.arange(count, dtype=np.int64)] = True
        high_bits = bitarray(endian="little")
        high_bits.pack(upper.tobytes())

        meta = self._META.pack(self._polarity, width, count)
        return meta + low_bits.tobytes() + high_bits.tobytes()

    @classmethod
    def _from_payload(cls, length: int, body: bytes) -> "EliasFanoBitVector":
        if len(body) < cls._META.size:
            raise InvalidInputError("sparse bit vector payload too short")
        polarity, width, count = cls._META.unpack_from(body, 0)
        if count > length:
            raise InvalidInputError(f"{count} positions cannot fit in {length} bits")
        upper_len = count + (length >> width) + 1
        low_nbytes = (count * width + 7) // 8
        high_nbytes = (upper_len + 7) // 8
        data = body[cls._META.size :]
        if len(data) != low_nbytes + high_nbytes:
            raise InvalidInputError(
                f"Elias-Fano payload needs {low_nbytes + high_nbytes} bytes, got {len(data)}"
            )

        lows = _unpack_bits(data[:low_nbytes], count * width).reshape(count, width)
        low_values = (lows.astype(np.int64) << np.arange(width, dtype=np.int64)).sum(axis=1)
        upper = np.flatnonzero(_unpack_bits(data[low_nbytes:], upper_len))
        if upper.size != count:
            raise InvalidInputError("Elias-Fano upper bits disagree with the count")
        highs = upper - np.arange(count, dtype=np.int64)
        positions = ((highs << width) | low_values) + 1
        return cls(length, _checked_positions(positions, length), polarity)


def _unpack_bits(data: bytes, nbits: int) -> np.ndarray:
    bits = bitarray(endian="little")
    bits.frombytes(data)
    return np.frombuffer(bits.unpack(), dtype=np.uint8)[:nbits]


def _checked_positions(positions: np.ndarray, length: int) -> np.ndarray:
    positions = positions.astype(np.int64)
    if positions.size and (
        positions[0] < 1 or positions[-1] > length or np.any(np.diff(positions) <= 0)
    ):
        raise InvalidInputError("sparse positions must be strictly increasing in 1..n")
    return positions


def build_bitvector(
    bits: BitsLike,
    *,
    config: IndexConfig = DEFAULT_CONFIG,
    sparse: bool | None = None,
) -> BitVector:
    """Build a queryable bit vector over exactly ``bits``.

    ``sparse`` forces a layout; ``None`` applies the density heuristic.
    """

    arr = as_bool_array(bits)
    n = arr.size
    ones = int(np.count_nonzero(arr))
    minority = 1 if ones <= n - ones else 0
    if sparse is None:
        sparse = n > 0 and min(ones, n - ones) / n < config.sparse_threshold
    if sparse:
        layout = SPARSE_LAYOUTS[config.sparse_encoding]
        return layout.from_bools(arr, minority)
    return DenseBitVector.from_bools(arr, config.rank_block_bits)


SPARSE_LAYOUTS = {"positions": SparseBitVector, "elias-fano": EliasFanoBitVector}
EMPTY_BITVECTOR = build_bitvector([])
