"""Length-prefixed framing used by every serialized structure."""

from __future__ import annotations

import struct
from typing import Iterable, List

from .errors import InvalidInputError

_FRAME = struct.Struct("<Q")


def pack_frames(payloads: Iterable[bytes]) -> bytes:
    return b"".join(_FRAME.pack(len(p)) + p for p in payloads)


def unpack_frames(payload: bytes, offset: int = 0) -> List[bytes]:
    """Split ``payload[offset:]`` into its framed parts."""

    frames = []
    view = memoryview(payload)
    while offset < len(payload):
        if offset + _FRAME.size > len(payload):
            raise InvalidInputError("truncated frame header")
        (size,) = _FRAME.unpack_from(payload, offset)
        offset += _FRAME.size
        if offset + size > len(payload):
            raise InvalidInputError(
                f"frame of {size} bytes overruns payload at offset {offset}"
            )
        frames.append(bytes(view[offset : offset + size]))
        offset += size
    return frames
