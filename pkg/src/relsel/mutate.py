"""Seeded generation of similar sequence pairs, plus sequence file input."""

from __future__ import annotations

from dataclasses import dataclass
import logging
from pathlib import Path
from typing import Tuple, Union

import numpy as np

from .alignment import Alignment
from .errors import InvalidInputError
from .sequence import TextLike, as_byte_array

logger = logging.getLogger(__name__)

DNA = b"ACGT"
_FASTA_TABLE = bytes(
    ord(chr(b).upper()) if chr(b).upper() in "ACGT" else ord("N") for b in range(256)
)


@dataclass(frozen=True, eq=False)
class MutatedPair:
    """A random text, its mutated copy and the alignment of kept characters."""

    text1: bytes
    text2: bytes
    alignment: Alignment
    seed: int
    sub_rate: float
    indel_rate: float


def _check_rates(sub_rate: float, indel_rate: float) -> None:
    for name, rate in (("substitution", sub_rate), ("indel", indel_rate)):
        if not 0.0 <= rate <= 1.0:
            raise InvalidInputError(f"{name} rate must lie in [0, 1], got {rate}")
    if sub_rate + indel_rate > 1.0:
        raise InvalidInputError("substitution and indel rates together exceed 1")


def random_text(rng: np.random.Generator, length: int, alphabet: bytes = DNA) -> bytes:
    if length < 0:
        raise InvalidInputError(f"length must be non-negative, got {length}")
    table = np.frombuffer(alphabet, dtype=np.uint8)
    return table[rng.integers(0, table.size, size=length)].tobytes()


def mutate_text(
    rng: np.random.Generator,
    text: TextLike,
    sub_rate: float,
    indel_rate: float,
    alphabet: bytes = DNA,
) -> Tuple[bytes, Alignment]:
    """Apply per-position substitutions, insertions and deletions.

    Each position independently becomes an indel with probability
    ``indel_rate`` (a fair coin picks deletion or insertion before it) or a
    substitution with probability ``sub_rate``. Kept characters and the
    originals following an insertion form the returned alignment.
    """

    _check_rates(sub_rate, indel_rate)
    data = as_byte_array(text)
    n = data.size
    table = np.frombuffer(alphabet, dtype=np.uint8)
    sigma = table.size
    # draw every array at full size so the stream does not depend on the rates
    event = rng.random(n)
    coin = rng.random(n)
    shift = rng.integers(1, sigma, size=n) if sigma > 1 else np.zeros(n, dtype=np.int64)
    inserted = table[rng.integers(0, sigma, size=n)]

    indel = event < indel_rate
    deleted = indel & (coin < 0.5)
    insert = indel & ~deleted
    substituted = ~indel & (event < indel_rate + sub_rate)

    lookup = np.zeros(256, dtype=np.int64)
    lookup[table] = np.arange(sigma)
    replaced = table[(lookup[data] + shift) % sigma]

    widths = np.ones(n, dtype=np.int64)
    widths[deleted] = 0
    widths[insert] = 2
    ends = np.cumsum(widths)
    out = np.empty(int(ends[-1]) if n else 0, dtype=np.uint8)
    present = widths > 0
    out[ends[present] - 1] = np.where(substituted, replaced, data)[present]
    out[ends[insert] - 2] = inserted[insert]

    kept = np.flatnonzero(present & ~substituted)
    matches = np.column_stack((kept + 1, ends[kept]))
    alignment = Alignment(n, out.size, matches)
    logger.debug(
        "mutated %d characters: %d substitutions, %d insertions, %d deletions",
        n, int(substituted.sum()), int(insert.sum()), int(deleted.sum()),
    )
    return out.tobytes(), alignment


def mutate(
    seed: int, length: int, sub_rate: float, indel_rate: float, alphabet: bytes = DNA
) -> MutatedPair:
    _check_rates(sub_rate, indel_rate)
    rng = np.random.default_rng(seed)
    text1 = random_text(rng, length, alphabet)
    text2, alignment = mutate_text(rng, text1, sub_rate, indel_rate, alphabet)
    logger.info(
        "pair seed=%d: |t1|=%d |t2|=%d kept=%d", seed, len(text1), len(text2), alignment.len_c
    )
    return MutatedPair(text1, text2, alignment, seed, sub_rate, indel_rate)


PathLike = Union[str, Path]


def parse_fasta(raw: bytes) -> bytes:
    """Sequence lines of a FASTA file, uppercased, with non-ACGT mapped to N."""

    body = b"".join(
        line.strip() for line in raw.splitlines() if line[:1] not in (b">", b";")
    )
    return body.translate(_FASTA_TABLE)


def read_sequence(path: PathLike) -> bytes:
    """Read FASTA when the file starts with a header, raw bytes otherwise."""

    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise InvalidInputError(f"cannot read sequence file {path}: {exc}") from exc
    if raw.lstrip()[:1] in (b">", b";"):
        return parse_fasta(raw)
    return raw.rstrip(b"\r\n")


def write_fasta(path: PathLike, name: str, text: bytes, width: int = 60) -> None:
    lines = [b">" + name.encode("ascii")]
    lines.extend(text[i : i + width] for i in range(0, len(text), width))
    Path(path).write_bytes(b"\n".join(lines) + b"\n")
