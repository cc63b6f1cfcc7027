"""Strings over a small byte alphabet with access, rank and select.

The alphabet (ascending byte order, so the 0x00 sentinel sorts first) is
split in halves recursively; every internal node of that balanced
decomposition keeps one ``BitVector`` telling which half each of its
characters falls into. Queries walk O(log sigma) levels.
"""

from __future__ import annotations

from dataclasses import dataclass
import logging
import struct
from typing import ClassVar, Dict, List, Optional, Tuple, Union

import numpy as np

from .bitvector import BitVector, build_bitvector
from .config import DEFAULT_CONFIG, MAX_ALPHABET, IndexConfig
from .errors import (
    InvalidInputError,
    NotFoundError,
    UnsupportedAlphabetError,
    check_position,
    check_prefix,
)
from .framing import pack_frames, unpack_frames

logger = logging.getLogger(__name__)

Symbol = Union[int, bytes, str]
TextLike = Union[bytes, bytearray, memoryview, str, np.ndarray]


def symbol_code(x: Symbol) -> int:
    """Return the byte value of a character given as int, bytes or str."""

    if isinstance(x, (bytes, bytearray)):
        if len(x) != 1:
            raise InvalidInputError(f"expected a single character, got {x!r}")
        return x[0]
    if isinstance(x, str):
        if len(x) != 1 or ord(x) > 0xFF:
            raise InvalidInputError(f"expected a single byte character, got {x!r}")
        return ord(x)
    code = int(x)
    if not 0 <= code <= 0xFF:
        raise InvalidInputError(f"character code {code} outside 0-255")
    return code


def as_byte_array(text: TextLike) -> np.ndarray:
    if isinstance(text, np.ndarray):
        return text.astype(np.uint8, copy=False).ravel()
    if isinstance(text, str):
        text = text.encode("latin-1")
    return np.frombuffer(bytes(text), dtype=np.uint8)


@dataclass(eq=False)
class _Node:
    bits: BitVector
    left: Optional["_Node"]
    right: Optional["_Node"]


class IndexedSequence:
    """Immutable indexed string; positions are 1-based."""

    TAG: ClassVar[int] = 2
    _HEADER: ClassVar[struct.Struct] = struct.Struct("<QBB")

    def __init__(
        self, length: int, alphabet: bytes, root: Optional[_Node]
    ) -> None:
        self._length = length
        self._alphabet = alphabet
        self._sigma = len(alphabet)
        self._root = root
        self._code_rank = [-1] * 256
        for rank, code in enumerate(alphabet):
            self._code_rank[code] = rank
        self._occ: Dict[int, int] = {
            code: self._rank_code(rank, length) for rank, code in enumerate(alphabet)
        }

    def __len__(self) -> int:
        return self._length

    def __repr__(self) -> str:
        return f"IndexedSequence(n={self._length}, alphabet={self._alphabet!r})"

    @property
    def alphabet(self) -> bytes:
        return self._alphabet

    def occ(self, x: Symbol) -> int:
        return self._occ.get(symbol_code(x), 0)

    def counts(self) -> Dict[int, int]:
        return dict(self._occ)

    # -- queries ----------------------------------------------------------------
    def access(self, i: int) -> int:
        """Byte value of the i-th character."""

        check_position(i, self._length)
        node, lo, hi = self._root, 0, self._sigma
        while hi - lo > 1:
            assert node is not None
            mid = (lo + hi) // 2
            bit = node.bits.access(i)
            i = node.bits.rank(bit, i)
            if bit:
                node, lo = node.right, mid
            else:
                node, hi = node.left, mid
        return self._alphabet[lo]

    def rank(self, x: Symbol, i: int) -> int:
        """Occurrences of ``x`` among positions 1..i; 0 for foreign characters."""

        check_prefix(i, self._length)
        rank = self._code_rank[symbol_code(x)]
        if rank < 0:
            return 0
        return self._rank_code(rank, i)

    def _rank_code(self, rank: int, i: int) -> int:
        node, lo, hi = self._root, 0, self._sigma
        while hi - lo > 1 and i:
            assert node is not None
            mid = (lo + hi) // 2
            if rank >= mid:
                i = node.bits.rank1(i)
                node, lo = node.right, mid
            else:
                i = node.bits.rank0(i)
                node, hi = node.left, mid
        return i

    def select(self, x: Symbol, j: int) -> int:
        """1-based position of the j-th occurrence of ``x``."""

        code = symbol_code(x)
        total = self._occ.get(code, 0)
        if not 1 <= j <= total:
            raise NotFoundError(
                f"select({chr(code)!r}, {j}) but only {total} occurrence(s)"
            )
        rank = self._code_rank[code]
        path: List[Tuple[_Node, int]] = []
        node, lo, hi = self._root, 0, self._sigma
        while hi - lo > 1:
            assert node is not None
            mid = (lo + hi) // 2
            bit = 1 if rank >= mid else 0
            path.append((node, bit))
            if bit:
                node, lo = node.right, mid
            else:
                node, hi = node.left, mid
        for node, bit in reversed(path):
            j = node.bits.select(bit, j)
        return j

    def text(self) -> bytes:
        """Materialise the indexed string."""

        codes = self._expand(self._root, 0, self._sigma, self._length)
        return np.frombuffer(self._alphabet, dtype=np.uint8)[codes].tobytes() if self._sigma else b""

    def _expand(self, node: Optional[_Node], lo: int, hi: int, n: int) -> np.ndarray:
        if hi - lo <= 1:
            return np.full(n, lo, dtype=np.int64)
        assert node is not None
        mid = (lo + hi) // 2
        mask = node.bits.to_bits().astype(bool)
        out = np.empty(n, dtype=np.int64)
        out[~mask] = self._expand(node.left, lo, mid, int(n - mask.sum()))
        out[mask] = self._expand(node.right, mid, hi, int(mask.sum()))
        return out

    def nodes(self) -> List[BitVector]:
        """Decomposition bit vectors in pre-order."""

        out: List[BitVector] = []
        self._collect(self._root, 0, self._sigma, out)
        return out

    def _collect(self, node: Optional[_Node], lo: int, hi: int, out: List[BitVector]) -> None:
        if hi - lo <= 1:
            return
        assert node is not None
        mid = (lo + hi) // 2
        out.append(node.bits)
        self._collect(node.left, lo, mid, out)
        self._collect(node.right, mid, hi, out)

    # -- serialization ------------------------------------------------------------
    def to_bytes(self) -> bytes:
        header = self._HEADER.pack(self._length, self.TAG, self._sigma)
        return header + self._alphabet + pack_frames(bv.to_bytes() for bv in self.nodes())

    @property
    def nbytes(self) -> int:
        return len(self.to_bytes())

    @classmethod
    def from_bytes(
        cls, payload: bytes, *, config: IndexConfig = DEFAULT_CONFIG
    ) -> "IndexedSequence":
        if len(payload) < cls._HEADER.size:
            raise InvalidInputError("sequence payload too short")
        length, tag, sigma = cls._HEADER.unpack_from(payload, 0)
        if tag != cls.TAG:
            raise InvalidInputError(f"expected sequence tag {cls.TAG}, got {tag}")
        offset = cls._HEADER.size
        alphabet = bytes(payload[offset : offset + sigma])
        if len(alphabet) != sigma or list(alphabet) != sorted(set(alphabet)):
            raise InvalidInputError("sequence alphabet table is corrupt")
        vectors = iter(
            [BitVector.from_bytes(f, config=config) for f in unpack_frames(payload, offset + sigma)]
        )

        def rebuild(lo: int, hi: int) -> Optional[_Node]:
            if hi - lo <= 1:
                return None
            try:
                bits = next(vectors)
            except StopIteration as exc:
                raise InvalidInputError("sequence is missing decomposition nodes") from exc
            mid = (lo + hi) // 2
            left = rebuild(lo, mid)
            right = rebuild(mid, hi)
            return _Node(bits, left, right)

        root = rebuild(0, sigma)
        if root is not None and len(root.bits) != length:
            raise InvalidInputError("sequence root length mismatch")
        return cls(length, alphabet, root)


def _build_node(
    codes: np.ndarray, lo: int, hi: int, config: IndexConfig
) -> Optional[_Node]:
    if hi - lo <= 1:
        return None
    mid = (lo + hi) // 2
    mask = codes >= mid
    bits = build_bitvector(mask, config=config)
    left = _build_node(codes[~mask], lo, mid, config)
    right = _build_node(codes[mask], mid, hi, config)
    return _Node(bits, left, right)


def build_sequence(
    text: TextLike, *, config: IndexConfig = DEFAULT_CONFIG
) -> IndexedSequence:
    """Index ``text`` for access/rank/select."""

    data = as_byte_array(text)
    present = np.flatnonzero(np.bincount(data, minlength=256))
    if present.size > MAX_ALPHABET:
        raise UnsupportedAlphabetError(
            f"{present.size} distinct symbols, at most {MAX_ALPHABET} supported"
        )
    alphabet = bytes(present.astype(np.uint8).tolist())
    lookup = np.full(256, -1, dtype=np.int64)
    lookup[present] = np.arange(present.size)
    codes = lookup[data]
    root = _build_node(codes, 0, len(alphabet), config)
    logger.debug("indexed %d characters over %d symbols", data.size, len(alphabet))
    return IndexedSequence(int(data.size), alphabet, root)
