"""FM-index query layer: C array, LF and Psi over plain and relative BWTs."""

from __future__ import annotations

from bisect import bisect_left
import logging
import struct
from typing import Dict, Mapping, Optional

import numpy as np

from .alignment import Alignment, chain_pairs, common_subsequence
from .bwt import SuffixArray, build_suffix_array
from .config import DEFAULT_CONFIG, IndexConfig
from .errors import InvalidInputError, UnsupportedQueryError, check_position
from .relative import RelativeSelect, build_relative
from .sequence import IndexedSequence, Symbol, TextLike, build_sequence

logger = logging.getLogger(__name__)

_CARR_ENTRY = struct.Struct("<BQ")


def c_array(counts: Mapping[int, int]) -> Dict[int, int]:
    """Number of characters smaller than each character, in byte order."""

    carr: Dict[int, int] = {}
    total = 0
    for code in sorted(counts):
        if counts[code]:
            carr[code] = total
            total += counts[code]
    return carr


def pack_carr(carr: Mapping[int, int]) -> bytes:
    return struct.pack("<B", len(carr)) + b"".join(
        _CARR_ENTRY.pack(code, start) for code, start in sorted(carr.items())
    )


def unpack_carr(payload: bytes) -> Dict[int, int]:
    if not payload or len(payload) != 1 + payload[0] * _CARR_ENTRY.size:
        raise InvalidInputError("C array payload has the wrong size")
    return dict(_CARR_ENTRY.iter_unpack(payload[1:]))


class _RowIndex:
    """Shared LF/Psi logic over anything with access, rank and a C array."""

    carr: Dict[int, int]

    def _init_rows(self, carr: Dict[int, int]) -> None:
        self.carr = carr
        self._codes = sorted(carr)
        self._starts = [carr[c] for c in self._codes]

    def __len__(self) -> int:
        raise NotImplementedError

    def access(self, i: int) -> int:
        raise NotImplementedError

    def rank(self, x: Symbol, i: int) -> int:
        raise NotImplementedError

    def row_symbol(self, i: int) -> int:
        """The character c with ``carr[c] < i <= carr[c] + occ(c)``."""

        check_position(i, len(self))
        return self._codes[bisect_left(self._starts, i) - 1]

    def lf(self, i: int) -> int:
        c = self.access(i)
        return self.carr[c] + self.rank(c, i)

    def psi_binary(self, i: int) -> int:
        """Psi by binary search over rank, for indexes without select."""

        c = self.row_symbol(i)
        j = i - self.carr[c]
        lo, hi = 1, len(self)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.rank(c, mid) >= j:
                hi = mid
            else:
                lo = mid + 1
        return lo


class FMIndex(_RowIndex):
    """BWT stored as an indexed sequence plus its C array."""

    def __init__(self, bwt: IndexedSequence) -> None:
        self.bwt = bwt
        self._init_rows(c_array(bwt.counts()))

    def __len__(self) -> int:
        return len(self.bwt)

    def access(self, i: int) -> int:
        return self.bwt.access(i)

    def rank(self, x: Symbol, i: int) -> int:
        return self.bwt.rank(x, i)

    def select(self, x: Symbol, i: int) -> int:
        return self.bwt.select(x, i)

    def psi(self, i: int) -> int:
        c = self.row_symbol(i)
        return self.bwt.select(c, i - self.carr[c])

    def to_bytes(self) -> bytes:
        return self.bwt.to_bytes()

    @property
    def nbytes(self) -> int:
        return self.bwt.nbytes

    @classmethod
    def from_bytes(cls, payload: bytes, *, config: IndexConfig = DEFAULT_CONFIG) -> "FMIndex":
        return cls(IndexedSequence.from_bytes(payload, config=config))


def build_fm_index(
    text: TextLike,
    *,
    suffix_array: Optional[SuffixArray] = None,
    config: IndexConfig = DEFAULT_CONFIG,
) -> FMIndex:
    sa = suffix_array or build_suffix_array(text, config=config)
    index = FMIndex(build_sequence(sa.bwt(), config=config))
    logger.info("FM-index over %d rows, alphabet %r", len(index), index.bwt.alphabet)
    return index


class RelativeFMIndex(_RowIndex):
    """LF and Psi on a target BWT stored relative to a reference FM-index."""

    def __init__(self, reference: FMIndex, rel: RelativeSelect) -> None:
        if rel.reference is not reference.bwt:
            raise InvalidInputError("relative markers were built against another reference")
        self.reference = reference
        self.rel = rel
        self._init_rows(c_array(rel.counts()))

    def __len__(self) -> int:
        return len(self.rel)

    @property
    def supports_select(self) -> bool:
        return self.rel.supports_select

    @property
    def d_indel(self) -> int:
        return len(self.reference) + len(self) - 2 * self.rel.c_length

    def access(self, i: int) -> int:
        return self.rel.access(i)

    def rank(self, x: Symbol, i: int) -> int:
        return self.rel.rank(x, i)

    def select(self, x: Symbol, i: int) -> int:
        if not self.supports_select:
            raise UnsupportedQueryError("relative index was built without select markers")
        return self.rel.select(x, i)

    def psi(self, i: int) -> int:
        if not self.supports_select:
            return self.psi_binary(i)
        c = self.row_symbol(i)
        return self.rel.select(c, i - self.carr[c])


def project_text_alignment(sa1: SuffixArray, sa2: SuffixArray, a: Alignment) -> Alignment:
    """Common subsequence of two BWTs induced by an alignment of their texts.

    A text match (p, q) pairs the BWT rows of the suffixes starting at p+1
    and q+1, which both hold the matched character; the rows of the full
    texts pair the two sentinels. A longest chain increasing in both rows is
    kept.
    """

    if a.n1 != len(sa1.text) or a.n2 != len(sa2.text):
        raise InvalidInputError("text alignment does not cover the suffix arrays' texts")
    isa1, isa2 = sa1.inverse(), sa2.inverse()
    rows1 = np.concatenate((isa1[:1], isa1[a.matches[:, 0]]))
    rows2 = np.concatenate((isa2[:1], isa2[a.matches[:, 1]]))
    return chain_pairs(rows1, rows2, len(sa1), len(sa2))


def build_relative_fm(
    t1: TextLike,
    t2: TextLike,
    *,
    text_alignment: Optional[Alignment] = None,
    with_select: bool = True,
    config: IndexConfig = DEFAULT_CONFIG,
) -> RelativeFMIndex:
    """Reference FM-index over ``t1`` with ``t2``'s BWT stored relative to it.

    Without ``text_alignment`` the texts are aligned first and that
    alignment is projected onto the BWT rows.
    """

    sa1 = build_suffix_array(t1, config=config)
    sa2 = build_suffix_array(t2, config=config)
    reference = build_fm_index(t1, suffix_array=sa1, config=config)
    bwt2 = sa2.bwt()
    if text_alignment is None:
        text_alignment = common_subsequence(sa1.text, sa2.text, config=config)
    alignment = project_text_alignment(sa1, sa2, text_alignment)
    rel = build_relative(reference.bwt, bwt2, alignment, with_select=with_select, config=config)
    index = RelativeFMIndex(reference, rel)
    logger.info(
        "relative FM-index: %d rows, BWT d_indel=%d, select=%s",
        len(index), index.d_indel, with_select,
    )
    return index
