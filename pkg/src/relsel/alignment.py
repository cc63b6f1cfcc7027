"""Common subsequences and edit statistics between two strings.

``common_subsequence`` returns a longest common subsequence as 1-based match
pairs. Small inputs use a quadratic table with a fixed traceback order
(match, then diagonal, then skip a character of ``s1``), which makes the
embedding reproducible; larger inputs use the greedy O(ND) diff.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
import logging
import struct
from typing import ClassVar, List, Sequence, Tuple

import numpy as np

from .config import DEFAULT_CONFIG, IndexConfig
from .errors import InvalidInputError, ResourceLimitError
from .sequence import TextLike, as_byte_array

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Alignment:
    """Strictly increasing 1-based match pairs ``(p in S1, q in S2)``."""

    n1: int
    n2: int
    matches: np.ndarray

    _HEADER: ClassVar[struct.Struct] = struct.Struct("<QQQ")

    def __post_init__(self) -> None:
        matches = np.asarray(self.matches, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, "matches", matches)
        if self.n1 < 0 or self.n2 < 0:
            raise InvalidInputError("sequence lengths must be non-negative")
        if matches.size:
            p, q = matches[:, 0], matches[:, 1]
            if p[0] < 1 or q[0] < 1 or p[-1] > self.n1 or q[-1] > self.n2:
                raise InvalidInputError("match pair outside the sequences")
            if np.any(np.diff(p) <= 0) or np.any(np.diff(q) <= 0):
                raise InvalidInputError("match pairs must strictly increase in both coordinates")

    @property
    def len_c(self) -> int:
        return int(self.matches.shape[0])

    @property
    def d_indel(self) -> int:
        return self.n1 + self.n2 - 2 * self.len_c

    def check_against(self, s1: TextLike, s2: TextLike) -> None:
        """Raise unless every pair matches equal characters of ``s1``/``s2``."""

        a, b = as_byte_array(s1), as_byte_array(s2)
        if a.size != self.n1 or b.size != self.n2:
            raise InvalidInputError(
                f"alignment is for lengths ({self.n1}, {self.n2}), got ({a.size}, {b.size})"
            )
        if self.len_c and np.any(a[self.matches[:, 0] - 1] != b[self.matches[:, 1] - 1]):
            raise InvalidInputError("alignment pairs unequal characters")

    def common(self, s1: TextLike) -> bytes:
        """The common subsequence C spelled from ``s1``."""

        return as_byte_array(s1)[self.matches[:, 0] - 1].tobytes()

    # -- serialization ------------------------------------------------------------
    def to_bytes(self) -> bytes:
        header = self._HEADER.pack(self.n1, self.n2, self.len_c)
        gaps = np.diff(self.matches, axis=0, prepend=0)
        if gaps.size and int(gaps.max()) > 0xFFFFFFFF:
            raise ResourceLimitError("alignment gap does not fit the 32-bit serialized form")
        return header + gaps.astype("<u4").tobytes()

    @classmethod
    def from_bytes(cls, payload: bytes) -> "Alignment":
        if len(payload) < cls._HEADER.size:
            raise InvalidInputError("alignment payload too short")
        n1, n2, len_c = cls._HEADER.unpack_from(payload, 0)
        body = payload[cls._HEADER.size :]
        if len(body) != len_c * 8:
            raise InvalidInputError(
                f"alignment with {len_c} pairs needs {len_c * 8} bytes, got {len(body)}"
            )
        gaps = np.frombuffer(body, dtype="<u4").astype(np.int64).reshape(-1, 2)
        return cls(n1, n2, np.cumsum(gaps, axis=0))


@dataclass(frozen=True)
class EditStats:
    n1: int
    n2: int
    len_c: int
    d_indel: int
    levenshtein: int | None = None


def edit_stats(a: Alignment, levenshtein: int | None = None) -> EditStats:
    return EditStats(a.n1, a.n2, a.len_c, a.d_indel, levenshtein)


def marker_masks(a: Alignment) -> Tuple[np.ndarray, np.ndarray]:
    """Bits over S1 and S2 set where a character is not part of C."""

    mask1 = np.ones(a.n1, dtype=bool)
    mask2 = np.ones(a.n2, dtype=bool)
    mask1[a.matches[:, 0] - 1] = False
    mask2[a.matches[:, 1] - 1] = False
    return mask1, mask2


def common_subsequence(
    s1: TextLike, s2: TextLike, *, config: IndexConfig = DEFAULT_CONFIG
) -> Alignment:
    """Longest common subsequence of ``s1`` and ``s2``."""

    a, b = as_byte_array(s1), as_byte_array(s2)
    n1, n2 = a.size, b.size
    if n1 == 0 or n2 == 0:
        return Alignment(n1, n2, np.zeros((0, 2), dtype=np.int64))
    if n1 * n2 <= config.lcs_cell_budget:
        pairs = _lcs_table(a, b)
    else:
        pairs = _greedy_diff(a.tobytes(), b.tobytes(), config.max_diff_edits)
    pairs.reverse()
    alignment = Alignment(n1, n2, np.array(pairs, dtype=np.int64).reshape(-1, 2))
    logger.debug(
        "aligned %d x %d characters: len_c=%d d_indel=%d",
        n1, n2, alignment.len_c, alignment.d_indel,
    )
    return alignment


def _lcs_table(a: np.ndarray, b: np.ndarray) -> List[Tuple[int, int]]:
    n1, n2 = a.size, b.size
    table = np.zeros((n1 + 1, n2 + 1), dtype=np.int32)
    for i in range(1, n1 + 1):
        prev = table[i - 1]
        best = np.maximum(prev[1:], prev[:-1] + (b == a[i - 1]))
        np.maximum.accumulate(best, out=table[i, 1:])

    pairs: List[Tuple[int, int]] = []
    i, j = n1, n2
    while i > 0 and j > 0:
        here = table[i, j]
        if a[i - 1] == b[j - 1]:
            pairs.append((i, j))
            i -= 1
            j -= 1
        elif table[i - 1, j - 1] == here:
            i -= 1
            j -= 1
        elif table[i - 1, j] == here:
            i -= 1
        else:
            j -= 1
    return pairs


def _common_prefix(a: bytes, b: bytes, x: int, y: int) -> int:
    """Length of the common prefix of ``a[x:]`` and ``b[y:]``."""

    limit = min(len(a) - x, len(b) - y)
    if limit <= 0 or a[x] != b[y]:
        return 0
    known, step = 0, 16
    while known < limit:
        window = min(step, limit - known)
        if a[x + known : x + known + window] == b[y + known : y + known + window]:
            known += window
            step *= 2
            continue
        lo, hi = 0, window
        base_a, base_b = x + known, y + known
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if a[base_a + lo : base_a + mid] == b[base_b + lo : base_b + mid]:
                lo = mid
            else:
                hi = mid
        return known + lo
    return known


def _greedy_diff(a: bytes, b: bytes, max_edits: int) -> List[Tuple[int, int]]:
    n, m = len(a), len(b)
    limit = min(max_edits, n + m)
    offset = limit + 1
    v = [0] * (2 * limit + 3)
    trace: List[List[int]] = []

    for d in range(limit + 1):
        trace.append(v[offset - d : offset + d + 1])
        for k in range(-d, d + 1, 2):
            if k == -d or (k != d and v[offset + k - 1] < v[offset + k + 1]):
                x = v[offset + k + 1]
            else:
                x = v[offset + k - 1] + 1
            x += _common_prefix(a, b, x, x - k)
            v[offset + k] = x
            if x >= n and x - k >= m:
                return _backtrack(trace, n, m)
    raise ResourceLimitError(
        f"strings differ by more than {limit} insertions/deletions"
    )


def _backtrack(trace: Sequence[List[int]], n: int, m: int) -> List[Tuple[int, int]]:
    pairs: List[Tuple[int, int]] = []
    x, y = n, m
    for d in range(len(trace) - 1, 0, -1):
        snap = trace[d]
        k = x - y
        if k == -d or (k != d and snap[k - 1 + d] < snap[k + 1 + d]):
            prev_k = k + 1
        else:
            prev_k = k - 1
        prev_x = snap[prev_k + d]
        prev_y = prev_x - prev_k
        while x > prev_x and y > prev_y:
            pairs.append((x, y))
            x -= 1
            y -= 1
        x, y = prev_x, prev_y
    while x > 0 and y > 0:
        pairs.append((x, y))
        x -= 1
        y -= 1
    return pairs


def chain_pairs(r1: np.ndarray, r2: np.ndarray, n1: int, n2: int) -> Alignment:
    """Keep a longest chain of pairs increasing in both coordinates.

    Pairs must already match equal characters; the result is therefore a
    valid (not necessarily longest) common subsequence.
    """

    r1 = np.asarray(r1, dtype=np.int64)
    r2 = np.asarray(r2, dtype=np.int64)
    order = np.argsort(r1, kind="stable")
    xs = r1[order].tolist()
    ys = r2[order].tolist()

    tails: List[int] = []
    tail_at: List[int] = []
    back = [-1] * len(ys)
    for idx, y in enumerate(ys):
        pos = bisect_left(tails, y)
        if pos == len(tails):
            tails.append(y)
            tail_at.append(idx)
        else:
            tails[pos] = y
            tail_at[pos] = idx
        back[idx] = tail_at[pos - 1] if pos else -1

    chain: List[int] = []
    idx = tail_at[-1] if tail_at else -1
    while idx >= 0:
        chain.append(idx)
        idx = back[idx]
    chain.reverse()
    pairs = np.array([(xs[c], ys[c]) for c in chain], dtype=np.int64).reshape(-1, 2)
    logger.debug("chained %d of %d candidate pairs", len(chain), len(ys))
    return Alignment(n1, n2, pairs)


def _shared_run(a: np.ndarray, b: np.ndarray) -> int:
    limit = min(a.size, b.size)
    differ = np.flatnonzero(a[:limit] != b[:limit])
    return int(differ[0]) if differ.size else limit


def edit_distance(
    s1: TextLike, s2: TextLike, *, config: IndexConfig = DEFAULT_CONFIG
) -> int:
    """Unit-cost Levenshtein distance."""

    a, b = as_byte_array(s1), as_byte_array(s2)
    head = _shared_run(a, b)
    a, b = a[head:], b[head:]
    tail = _shared_run(a[::-1], b[::-1])
    a, b = a[: a.size - tail], b[: b.size - tail]

    n1, n2 = a.size, b.size
    if n1 == 0 or n2 == 0:
        return int(n1 + n2)
    if n1 * n2 > config.edit_cell_budget:
        raise ResourceLimitError(
            f"edit distance table of {n1}x{n2} cells exceeds budget {config.edit_cell_budget}"
        )
    cols = np.arange(n2 + 1, dtype=np.int64)
    prev = cols.copy()
    row = np.empty(n2 + 1, dtype=np.int64)
    for i in range(1, n1 + 1):
        row[0] = i
        np.minimum(prev[1:] + 1, prev[:-1] + (b != a[i - 1]), out=row[1:])
        prev = np.minimum.accumulate(row - cols) + cols
    return int(prev[-1])
