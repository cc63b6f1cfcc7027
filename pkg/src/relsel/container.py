"""Versioned on-disk container for plain and relative FM-indexes.

Layout (little-endian)::

    "RSEL"  <H version  <H section count
    per section: <4s tag  <Q payload length  payload

``META`` holds the mode and build parameters as JSON. A plain index stores
its BWT in ``FMIX``. A relative index stores the reference BWT in ``RREF``,
the rank markers (header, B, Bx, B', D) in ``RSEL`` and the target C array
in ``CAR2``; with select support ``RSLX`` adds B'x followed by its own copy
of B, B' and D unless the markers are shared.
"""

from __future__ import annotations

import enum
import json
import logging
from pathlib import Path
import struct
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from .alignment import Alignment
from .config import DEFAULT_CONFIG, IndexConfig
from .errors import InvalidInputError
from .fm import FMIndex, RelativeFMIndex, build_fm_index, build_relative_fm, pack_carr, unpack_carr
from .framing import pack_frames, unpack_frames
from .relative import RelativeSelect
from .sequence import TextLike

logger = logging.getLogger(__name__)

MAGIC = b"RSEL"
VERSION = 1
_HEADER = struct.Struct("<4sHH")
_SECTION = struct.Struct("<4sQ")

AnyIndex = Union[FMIndex, RelativeFMIndex]


class IndexMode(str, enum.Enum):
    PLAIN = "plain-fm"
    RELATIVE = "relative-fm"
    RELATIVE_SELECT = "relative-fm+select"


def build_index(
    mode: Union[IndexMode, str],
    t1: Optional[TextLike],
    t2: TextLike,
    *,
    text_alignment: Optional[Alignment] = None,
    config: IndexConfig = DEFAULT_CONFIG,
) -> AnyIndex:
    """Index ``t2``, relative to ``t1`` unless the mode is plain."""

    mode = IndexMode(mode)
    if mode is IndexMode.PLAIN:
        return build_fm_index(t2, config=config)
    if t1 is None:
        raise InvalidInputError(f"mode {mode.value} needs a reference text")
    return build_relative_fm(
        t1,
        t2,
        text_alignment=text_alignment,
        with_select=mode is IndexMode.RELATIVE_SELECT,
        config=config,
    )


def mode_of(index: AnyIndex) -> IndexMode:
    if isinstance(index, FMIndex):
        return IndexMode.PLAIN
    return IndexMode.RELATIVE_SELECT if index.supports_select else IndexMode.RELATIVE


def _sections(
    index: AnyIndex, params: Mapping[str, Any], config: IndexConfig
) -> List[Tuple[bytes, bytes]]:
    mode = mode_of(index)
    meta = {
        "mode": mode.value,
        "rows": len(index),
        "share_markers": config.share_markers,
        **params,
    }
    sections = [(b"META", json.dumps(meta, sort_keys=True).encode("utf-8"))]
    if isinstance(index, FMIndex):
        sections.append((b"FMIX", index.to_bytes()))
        return sections
    parts = index.rel.components()
    sections.append((b"RREF", index.reference.to_bytes()))
    sections.append(
        (b"RSEL", pack_frames([parts["header"], parts["B"], parts["Bx"], parts["Bp"], parts["D"]]))
    )
    if "Bpx" in parts:
        shared = [] if config.share_markers else [parts["B"], parts["Bp"], parts["D"]]
        sections.append((b"RSLX", pack_frames([parts["Bpx"], *shared])))
    sections.append((b"CAR2", pack_carr(index.carr)))
    return sections


def dump_index(
    index: AnyIndex,
    params: Optional[Mapping[str, Any]] = None,
    *,
    config: IndexConfig = DEFAULT_CONFIG,
) -> bytes:
    sections = _sections(index, params or {}, config)
    out = bytearray(_HEADER.pack(MAGIC, VERSION, len(sections)))
    for tag, payload in sections:
        out += _SECTION.pack(tag, len(payload))
        out += payload
    return bytes(out)


def read_sections(payload: bytes) -> Dict[bytes, bytes]:
    if len(payload) < _HEADER.size:
        raise InvalidInputError("index file too short for its header")
    magic, version, count = _HEADER.unpack_from(payload, 0)
    if magic != MAGIC:
        raise InvalidInputError(f"not an index file (magic {magic!r})")
    if version != VERSION:
        raise InvalidInputError(f"unsupported index version {version}")
    sections: Dict[bytes, bytes] = {}
    offset = _HEADER.size
    for _ in range(count):
        if offset + _SECTION.size > len(payload):
            raise InvalidInputError("truncated section header")
        tag, length = _SECTION.unpack_from(payload, offset)
        offset += _SECTION.size
        if offset + length > len(payload):
            raise InvalidInputError(f"section {tag!r} runs past the end of the file")
        sections[tag] = payload[offset : offset + length]
        offset += length
    if offset != len(payload):
        raise InvalidInputError("trailing bytes after the last section")
    return sections


def load_index(
    payload: bytes, *, config: IndexConfig = DEFAULT_CONFIG
) -> Tuple[AnyIndex, Dict[str, Any]]:
    """Rebuild an index and its metadata from ``dump_index`` output."""

    sections = read_sections(payload)
    try:
        meta = json.loads(sections[b"META"])
        mode = IndexMode(meta["mode"])
    except (KeyError, ValueError) as exc:
        raise InvalidInputError(f"index metadata is missing or corrupt: {exc}") from exc

    if mode is IndexMode.PLAIN:
        return FMIndex.from_bytes(_require(sections, b"FMIX"), config=config), meta

    reference = FMIndex.from_bytes(_require(sections, b"RREF"), config=config)
    rank_part = unpack_frames(_require(sections, b"RSEL"))
    if len(rank_part) != 5:
        raise InvalidInputError(f"rank markers hold {len(rank_part)} frames, expected 5")
    parts = dict(zip(("header", "B", "Bx", "Bp", "D"), rank_part))
    if mode is IndexMode.RELATIVE_SELECT:
        select_part = unpack_frames(_require(sections, b"RSLX"))
        if len(select_part) not in (1, 4):
            raise InvalidInputError(f"select markers hold {len(select_part)} frames")
        if len(select_part) == 4 and select_part[1:] != [parts["B"], parts["Bp"], parts["D"]]:
            raise InvalidInputError("select markers disagree with the rank markers")
        parts["Bpx"] = select_part[0]
    rel = RelativeSelect.from_components(reference.bwt, parts, config=config)
    index = RelativeFMIndex(reference, rel)
    if unpack_carr(_require(sections, b"CAR2")) != index.carr:
        raise InvalidInputError("stored C array disagrees with the relative markers")
    return index, meta


def _require(sections: Mapping[bytes, bytes], tag: bytes) -> bytes:
    try:
        return sections[tag]
    except KeyError as exc:
        raise InvalidInputError(f"index file lacks the {tag.decode()} section") from exc


def component_sizes(
    index: AnyIndex, *, config: IndexConfig = DEFAULT_CONFIG
) -> Dict[str, int]:
    """Serialized byte counts per section, per relative marker and in total.

    ``own`` leaves out the reference section, which a relative index shares
    with whatever else indexes the reference.
    """

    sections = _sections(index, {}, config)
    sizes = {tag.decode(): len(payload) for tag, payload in sections}
    if isinstance(index, RelativeFMIndex):
        parts = index.rel.components()
        for name, part in parts.items():
            sizes[f"marker.{name}"] = len(part)
        sizes["markers"] = sum(len(part) for part in parts.values())
    sizes["total"] = _HEADER.size + sum(_SECTION.size + len(payload) for _, payload in sections)
    sizes["own"] = sizes["total"] - (_SECTION.size + sizes["RREF"] if "RREF" in sizes else 0)
    return sizes


def save_index(
    path: Union[str, Path],
    index: AnyIndex,
    params: Optional[Mapping[str, Any]] = None,
    *,
    config: IndexConfig = DEFAULT_CONFIG,
) -> int:
    payload = dump_index(index, params, config=config)
    try:
        Path(path).write_bytes(payload)
    except OSError as exc:
        raise InvalidInputError(f"cannot write index file {path}: {exc}") from exc
    logger.info("wrote %s (%d bytes)", path, len(payload))
    return len(payload)


def open_index(
    path: Union[str, Path], *, config: IndexConfig = DEFAULT_CONFIG
) -> Tuple[AnyIndex, Dict[str, Any]]:
    try:
        payload = Path(path).read_bytes()
    except OSError as exc:
        raise InvalidInputError(f"cannot read index file {path}: {exc}") from exc
    return load_index(payload, config=config)
