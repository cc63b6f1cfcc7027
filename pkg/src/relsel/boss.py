"""Edge-BWTs of order-k de Bruijn graphs.

Every distinct (k+1)-mer of the text is an edge from its first k characters
to its last. A chain of dummy edges whose sources are padded with ``$``
leads into the first k-mer, and one ``$``-labelled edge leaves the last.
Sorting the edges right-to-left by source, ties by label, and reading off
the labels gives the edge-BWT.
"""

from __future__ import annotations

from dataclasses import dataclass
import logging
from typing import List, Tuple

from .alignment import Alignment, EditStats, common_subsequence, edit_distance, edit_stats
from .config import DEFAULT_CONFIG, IndexConfig
from .errors import InvalidInputError
from .relative import RelativeSelect, build_relative
from .sequence import TextLike, as_byte_array, build_sequence

logger = logging.getLogger(__name__)

DUMMY = ord("$")


@dataclass(frozen=True)
class Edge:
    source: bytes
    label: int

    def sort_key(self) -> Tuple[bytes, int]:
        return self.source[::-1], self.label

    def __str__(self) -> str:
        return f"{self.source.decode('latin-1')} {chr(self.label)}"


@dataclass(frozen=True)
class EdgeList:
    k: int
    edges: Tuple[Edge, ...]
    is_sorted: bool = False

    def __len__(self) -> int:
        return len(self.edges)

    def labels(self) -> bytes:
        return bytes(e.label for e in self.edges)


def build_edges(text: TextLike, k: int) -> EdgeList:
    data = as_byte_array(text).tobytes()
    if k < 1:
        raise InvalidInputError(f"graph order must be at least 1, got {k}")
    if len(data) < k:
        raise InvalidInputError(f"text of {len(data)} characters is shorter than k={k}")
    if DUMMY in data:
        raise InvalidInputError("text must not contain the dummy symbol '$'")

    pad = bytes([DUMMY])
    edges = [Edge(pad * (k - t) + data[:t], data[t]) for t in range(k)]
    edges.extend(Edge(data[i : i + k], data[i + k]) for i in range(len(data) - k))
    edges.append(Edge(data[len(data) - k :], DUMMY))
    unique = tuple(dict.fromkeys(edges))
    logger.debug("order-%d graph: %d distinct edges", k, len(unique))
    return EdgeList(k, unique)


def sort_edges(edges: EdgeList) -> EdgeList:
    if edges.is_sorted:
        return edges
    return EdgeList(edges.k, tuple(sorted(edges.edges, key=Edge.sort_key)), is_sorted=True)


def edge_bwt(text: TextLike, k: int) -> bytes:
    return sort_edges(build_edges(text, k)).labels()


def boss_matrix(text: TextLike, k: int) -> List[Tuple[int, str, str]]:
    """Numbered ``(row, source, label)`` rows of the sorted edge matrix."""

    ordered = sort_edges(build_edges(text, k))
    return [
        (row, e.source.decode("latin-1"), chr(e.label))
        for row, e in enumerate(ordered.edges, start=1)
    ]


@dataclass(frozen=True, eq=False)
class EdgeBwtComparison:
    bwt1: bytes
    bwt2: bytes
    alignment: Alignment
    relative: RelativeSelect
    stats: EditStats


def relative_edge_bwt(
    text1: TextLike, text2: TextLike, k: int, *, config: IndexConfig = DEFAULT_CONFIG
) -> EdgeBwtComparison:
    """Select on the second edge-BWT answered through the first."""

    bwt1, bwt2 = edge_bwt(text1, k), edge_bwt(text2, k)
    alignment = common_subsequence(bwt1, bwt2, config=config)
    relative = build_relative(build_sequence(bwt1, config=config), bwt2, alignment, config=config)
    stats = edit_stats(alignment, edit_distance(bwt1, bwt2, config=config))
    logger.info(
        "edge-BWTs of %d and %d edges: levenshtein=%s d_indel=%d",
        len(bwt1), len(bwt2), stats.levenshtein, stats.d_indel,
    )
    return EdgeBwtComparison(bwt1, bwt2, alignment, relative, stats)
