"""Select, rank and access on a sequence stored relative to a similar one."""

from .alignment import Alignment, common_subsequence, edit_distance, edit_stats, marker_masks
from .bitvector import BitVector, build_bitvector
from .boss import boss_matrix, build_edges, edge_bwt, relative_edge_bwt, sort_edges
from .bwt import BwtConvention, build_suffix_array, bwt_of, inverse_bwt, printable
from .config import BenchSettings, IndexConfig, load_settings, save_settings
from .container import IndexMode, build_index, load_index, dump_index
from .errors import RelSelError
from .fm import FMIndex, RelativeFMIndex, build_fm_index, build_relative_fm
from .mutate import MutatedPair, mutate
from .relative import (
    RelativeSelect,
    SubsequenceSelect,
    SupersequenceSelect,
    build_relative,
    build_subsequence,
    build_supersequence,
)
from .sequence import IndexedSequence, build_sequence

__all__ = [
    "Alignment",
    "BenchSettings",
    "BitVector",
    "BwtConvention",
    "FMIndex",
    "IndexConfig",
    "IndexMode",
    "IndexedSequence",
    "MutatedPair",
    "RelSelError",
    "RelativeFMIndex",
    "RelativeSelect",
    "SubsequenceSelect",
    "SupersequenceSelect",
    "boss_matrix",
    "build_bitvector",
    "build_edges",
    "build_fm_index",
    "build_index",
    "build_relative",
    "build_relative_fm",
    "build_sequence",
    "build_subsequence",
    "build_suffix_array",
    "build_supersequence",
    "bwt_of",
    "common_subsequence",
    "dump_index",
    "edge_bwt",
    "edit_distance",
    "edit_stats",
    "inverse_bwt",
    "load_index",
    "load_settings",
    "marker_masks",
    "mutate",
    "printable",
    "relative_edge_bwt",
    "save_settings",
    "sort_edges",
]
