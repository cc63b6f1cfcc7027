"""Select, rank and access on S2 through an index over a similar S1.

A common subsequence C of S1 and S2 splits the work in two layers:

- ``SubsequenceSelect`` answers select on C through S1 using B (S1
  characters missing from C) and one B_x per character (occurrences of x in
  S1 missing from C):
  ``C.select_x(i) = B.rank0(S1.select_x(B_x.select0(i)))``;
- ``SupersequenceSelect`` answers select on S2 through any select oracle on
  C using B' (S2 characters missing from C), B'_x and the sequence D of
  those characters:
  ``S2.select_x(i) = B'.select0(C.select_x(B'_x.rank0(i)))`` when
  ``B'_x[i] = 0``, else ``B'.select1(D.select_x(B'_x.rank1(i)))``.

``RelativeSelect`` stacks the two, so C is never stored.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import logging
import struct
from typing import Callable, ClassVar, Dict, List, Mapping, Optional, Tuple

import numpy as np

from .alignment import Alignment, marker_masks
from .bitvector import EMPTY_BITVECTOR, BitsLike, BitVector, as_bool_array, build_bitvector
from .config import DEFAULT_CONFIG, IndexConfig
from .errors import (
    InvalidInputError,
    NotFoundError,
    UnsupportedQueryError,
    check_position,
    check_prefix,
)
from .framing import pack_frames, unpack_frames
from .sequence import IndexedSequence, Symbol, TextLike, as_byte_array, build_sequence, symbol_code

logger = logging.getLogger(__name__)

SelectOracle = Callable[[Symbol, int], int]


@dataclass(frozen=True, eq=False)
class SymbolMarks:
    """One marker vector per alphabet character, in alphabet order."""

    alphabet: bytes
    vectors: Tuple[BitVector, ...]
    _slot: List[int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if len(self.alphabet) != len(self.vectors):
            raise InvalidInputError("one marker vector per alphabet character required")
        slot = [-1] * 256
        for index, code in enumerate(self.alphabet):
            slot[code] = index
        object.__setattr__(self, "_slot", slot)

    def get(self, x: Symbol) -> BitVector:
        index = self._slot[symbol_code(x)]
        return self.vectors[index] if index >= 0 else EMPTY_BITVECTOR

    @property
    def popcount(self) -> int:
        return sum(v.popcount for v in self.vectors)

    def items(self) -> List[Tuple[int, BitVector]]:
        return list(zip(self.alphabet, self.vectors))

    def to_bytes(self) -> bytes:
        return (
            struct.pack("<B", len(self.alphabet))
            + self.alphabet
            + pack_frames(v.to_bytes() for v in self.vectors)
        )

    @classmethod
    def from_bytes(cls, payload: bytes, *, config: IndexConfig = DEFAULT_CONFIG) -> "SymbolMarks":
        if not payload:
            raise InvalidInputError("empty marker table")
        sigma = payload[0]
        alphabet = bytes(payload[1 : 1 + sigma])
        vectors = tuple(
            BitVector.from_bytes(f, config=config) for f in unpack_frames(payload, 1 + sigma)
        )
        return cls(alphabet, vectors)


def _split_marks(
    codes: np.ndarray, mask: np.ndarray, alphabet: bytes, config: IndexConfig
) -> SymbolMarks:
    vectors = tuple(
        build_bitvector(mask[codes == code], config=config) for code in alphabet
    )
    return SymbolMarks(alphabet, vectors)


@dataclass(frozen=True, eq=False)
class SubsequenceSelect:
    """Select on C answered through select on S1."""

    marks: BitVector
    symbol_marks: SymbolMarks

    @property
    def c_length(self) -> int:
        return self.marks.count(0)

    def occ(self, x: Symbol) -> int:
        return self.symbol_marks.get(x).count(0)

    def select(self, s1: IndexedSequence, x: Symbol, i: int) -> int:
        """Position in C of the i-th ``x`` of C."""

        marks_x = self.symbol_marks.get(x)
        total = marks_x.count(0)
        if not 1 <= i <= total:
            raise NotFoundError(f"C has {total} occurrence(s) of {x!r}, asked for {i}")
        return self.marks.rank0(s1.select(x, marks_x.select0(i)))


def build_subsequence(
    s1: IndexedSequence, mask1: BitsLike, *, config: IndexConfig = DEFAULT_CONFIG
) -> SubsequenceSelect:
    mask = as_bool_array(mask1)
    if mask.size != len(s1):
        raise InvalidInputError(
            f"mask over S1 has {mask.size} bits, S1 has {len(s1)} characters"
        )
    codes = np.frombuffer(s1.text(), dtype=np.uint8)
    return SubsequenceSelect(
        build_bitvector(mask, config=config),
        _split_marks(codes, mask, s1.alphabet, config),
    )


@dataclass(frozen=True, eq=False)
class SupersequenceSelect:
    """Select on S2 answered through a select oracle on C."""

    marks: BitVector
    symbol_marks: Optional[SymbolMarks]
    new_chars: IndexedSequence

    def occ(self, x: Symbol) -> int:
        if self.symbol_marks is None:
            raise UnsupportedQueryError("built without per-character markers")
        return len(self.symbol_marks.get(x))

    def select(self, base_select: SelectOracle, x: Symbol, i: int) -> int:
        """Position in S2 of the i-th ``x``."""

        if self.symbol_marks is None:
            raise UnsupportedQueryError("select needs per-character markers over S2")
        marks_x = self.symbol_marks.get(x)
        if not 1 <= i <= len(marks_x):
            raise NotFoundError(
                f"S2 has {len(marks_x)} occurrence(s) of {x!r}, asked for {i}"
            )
        if marks_x.access(i):
            return self.marks.select1(self.new_chars.select(x, marks_x.rank1(i)))
        return self.marks.select0(base_select(x, marks_x.rank0(i)))


def build_supersequence(
    c_occ: Mapping[int, int],
    s2: TextLike,
    mask2: BitsLike,
    *,
    with_select: bool = True,
    config: IndexConfig = DEFAULT_CONFIG,
) -> SupersequenceSelect:
    data = as_byte_array(s2)
    mask = as_bool_array(mask2)
    if mask.size != data.size:
        raise InvalidInputError(
            f"mask over S2 has {mask.size} bits, S2 has {data.size} characters"
        )
    kept = np.bincount(data[~mask], minlength=256)
    for code in set(np.flatnonzero(kept).tolist()) | {symbol_code(c) for c in c_occ}:
        if int(kept[code]) != c_occ.get(code, 0):
            raise InvalidInputError(
                f"unmarked S2 characters hold {int(kept[code])} x {chr(code)!r}, "
                f"C holds {c_occ.get(code, 0)}"
            )
    symbol_marks = None
    if with_select:
        alphabet = bytes(np.flatnonzero(np.bincount(data, minlength=256)).tolist())
        symbol_marks = _split_marks(data, mask, alphabet, config)
    return SupersequenceSelect(
        build_bitvector(mask, config=config),
        symbol_marks,
        build_sequence(data[mask], config=config),
    )


class RelativeSelect:
    """Access, rank and select on S2 stored relative to S1's index."""

    _HEADER: ClassVar[struct.Struct] = struct.Struct("<QQQ")

    def __init__(
        self,
        reference: IndexedSequence,
        sub: SubsequenceSelect,
        sup: SupersequenceSelect,
    ) -> None:
        if sub.c_length != sup.marks.count(0):
            raise InvalidInputError(
                f"S1 side keeps {sub.c_length} characters, S2 side {sup.marks.count(0)}"
            )
        if len(sub.marks) != len(reference):
            raise InvalidInputError("S1 markers do not cover the reference")
        self.reference = reference
        self.sub = sub
        self.sup = sup

    def __len__(self) -> int:
        return len(self.sup.marks)

    @property
    def supports_select(self) -> bool:
        return self.sup.symbol_marks is not None

    @property
    def c_length(self) -> int:
        return self.sub.c_length

    def counts(self) -> Dict[int, int]:
        """Occurrences per character in S2."""

        out: Dict[int, int] = {}
        for code, marks in self.sub.symbol_marks.items():
            if marks.count(0):
                out[code] = marks.count(0)
        for code, count in self.sup.new_chars.counts().items():
            out[code] = out.get(code, 0) + count
        return dict(sorted(out.items()))

    # -- queries ----------------------------------------------------------------
    def c_select(self, x: Symbol, i: int) -> int:
        return self.sub.select(self.reference, x, i)

    def select(
        self, x: Symbol, i: int, *, base_select: Optional[SelectOracle] = None
    ) -> int:
        """Position in S2 of the i-th ``x``; C is virtual unless ``base_select`` is given."""

        return self.sup.select(base_select or self.c_select, x, i)

    def access(self, i: int) -> int:
        check_position(i, len(self))
        marks = self.sup.marks
        if marks.access(i):
            return self.sup.new_chars.access(marks.rank1(i))
        return self.reference.access(self.sub.marks.select0(marks.rank0(i)))

    def rank(self, x: Symbol, i: int) -> int:
        """Occurrences of ``x`` among S2's first i characters."""

        check_prefix(i, len(self))
        marks = self.sup.marks
        in_c = marks.rank0(i)
        common = 0
        if in_c:
            s1_pos = self.sub.marks.select0(in_c)
            common = self.sub.symbol_marks.get(x).rank0(self.reference.rank(x, s1_pos))
        return common + self.sup.new_chars.rank(x, marks.rank1(i))

    # -- test support ---------------------------------------------------------------
    def materialize_c(self) -> bytes:
        text = np.frombuffer(self.reference.text(), dtype=np.uint8)
        keep = ~self.sub.marks.to_bits().astype(bool)
        return text[keep].tobytes()

    # -- serialization ------------------------------------------------------------
    def components(self) -> Dict[str, bytes]:
        """Serialized markers by name; per-character tables are omitted when absent."""

        parts = {
            "header": self._HEADER.pack(len(self.reference), len(self), self.c_length),
            "B": self.sub.marks.to_bytes(),
            "Bx": self.sub.symbol_marks.to_bytes(),
            "Bp": self.sup.marks.to_bytes(),
            "D": self.sup.new_chars.to_bytes(),
        }
        if self.sup.symbol_marks is not None:
            parts["Bpx"] = self.sup.symbol_marks.to_bytes()
        return parts

    def marker_nbytes(self) -> int:
        return sum(len(p) for p in self.components().values())

    def to_bytes(self) -> bytes:
        parts = self.components()
        return pack_frames(
            [parts["header"], parts["B"], parts["Bx"], parts["Bp"], parts.get("Bpx", b""), parts["D"]]
        )

    @classmethod
    def from_components(
        cls,
        reference: IndexedSequence,
        parts: Mapping[str, bytes],
        *,
        config: IndexConfig = DEFAULT_CONFIG,
    ) -> "RelativeSelect":
        try:
            n1, n2, len_c = cls._HEADER.unpack(parts["header"])
            sub = SubsequenceSelect(
                BitVector.from_bytes(parts["B"], config=config),
                SymbolMarks.from_bytes(parts["Bx"], config=config),
            )
            bpx = parts.get("Bpx") or b""
            sup = SupersequenceSelect(
                BitVector.from_bytes(parts["Bp"], config=config),
                SymbolMarks.from_bytes(bpx, config=config) if bpx else None,
                IndexedSequence.from_bytes(parts["D"], config=config),
            )
        except (KeyError, struct.error) as exc:
            raise InvalidInputError(f"incomplete relative select markers: {exc}") from exc
        if n1 != len(reference) or n2 != len(sup.marks) or len_c != sub.c_length:
            raise InvalidInputError("relative select header disagrees with its markers")
        return cls(reference, sub, sup)

    @classmethod
    def from_bytes(
        cls, payload: bytes, reference: IndexedSequence, *, config: IndexConfig = DEFAULT_CONFIG
    ) -> "RelativeSelect":
        frames = unpack_frames(payload)
        if len(frames) != 6:
            raise InvalidInputError(f"expected 6 relative select frames, got {len(frames)}")
        names = ("header", "B", "Bx", "Bp", "Bpx", "D")
        return cls.from_components(reference, dict(zip(names, frames)), config=config)


def build_relative(
    s1: IndexedSequence,
    s2: TextLike,
    a: Alignment,
    *,
    with_select: bool = True,
    config: IndexConfig = DEFAULT_CONFIG,
) -> RelativeSelect:
    """Compose both layers for S2 relative to ``s1`` along alignment ``a``."""

    data = as_byte_array(s2)
    if a.n1 != len(s1) or a.n2 != data.size:
        raise InvalidInputError(
            f"alignment covers ({a.n1}, {a.n2}) characters, inputs have ({len(s1)}, {data.size})"
        )
    a.check_against(s1.text(), data)
    mask1, mask2 = marker_masks(a)
    sub = build_subsequence(s1, mask1, config=config)
    c_occ = {code: marks.count(0) for code, marks in sub.symbol_marks.items()}
    sup = build_supersequence(c_occ, data, mask2, with_select=with_select, config=config)
    relative = RelativeSelect(s1, sub, sup)
    logger.info(
        "relative markers: |S1|=%d |S2|=%d |C|=%d |D|=%d",
        len(s1), data.size, relative.c_length, len(sup.new_chars),
    )
    return relative
