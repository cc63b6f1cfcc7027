"""Configuration objects for index construction and the benchmark CLI."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
import json
import logging
from pathlib import Path
import sys
from typing import Dict, Optional

logger = logging.getLogger(__name__)

SETTINGS_FILENAME = "relsel_settings.json"
MAX_ALPHABET = 64
SENTINEL = 0x00
SPARSE_ENCODINGS = ("positions", "elias-fano")


@dataclass(frozen=True)
class IndexConfig:
    """Tuning knobs shared by the succinct structures."""

    rank_block_bits: int = 512
    sparse_threshold: float = 1 / 16
    lcs_cell_budget: int = 1 << 24
    edit_cell_budget: int = 400_000_000
    max_diff_edits: int = 8192
    naive_sa_limit: int = 4096
    share_markers: bool = False
    sparse_encoding: str = "positions"

    def __post_init__(self) -> None:
        block = self.rank_block_bits
        if block < 64 or block & (block - 1):
            raise ValueError("rank_block_bits must be a power of two >= 64")
        if not (0.0 <= self.sparse_threshold <= 0.5):
            raise ValueError("sparse_threshold must be in range 0-0.5")
        if self.lcs_cell_budget <= 0:
            raise ValueError("lcs_cell_budget must be positive")
        if self.edit_cell_budget <= 0:
            raise ValueError("edit_cell_budget must be positive")
        if self.max_diff_edits < 0:
            raise ValueError("max_diff_edits must be non-negative")
        if self.naive_sa_limit < 0:
            raise ValueError("naive_sa_limit must be non-negative")
        if self.sparse_encoding not in SPARSE_ENCODINGS:
            raise ValueError(f"sparse_encoding must be one of {SPARSE_ENCODINGS}")

    def as_kwargs(self) -> Dict[str, object]:
        """Return the configuration as keyword arguments."""

        return asdict(self)


DEFAULT_CONFIG = IndexConfig()


@dataclass
class BenchSettings:
    seed: int = 42
    length: int = 10_000_000
    sub_rate: float = 0.001
    indel_rate: float = 0.0002
    queries: int = 1_000_000
    batches: int = 5
    threads: int = 1
    k: int = 3
    mode: str = "relative-fm+select"
    encoding: str = "elias-fano"
    reference_extra: int = 0


def get_settings_path() -> Path:
    base = Path(sys.argv[0]).resolve().parent
    return base / SETTINGS_FILENAME


def load_settings(path: Optional[Path] = None) -> BenchSettings:
    path = path or get_settings_path()
    try:
        with path.open("r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, ValueError):
        logger.debug("no usable settings at %s, using defaults", path)
        data = {}
    if not isinstance(data, dict):
        data = {}

    values = {}
    for field in fields(BenchSettings):
        if field.name in data:
            kind = type(getattr(BenchSettings, field.name))
            try:
                values[field.name] = kind(data[field.name])
            except (TypeError, ValueError):
                logger.warning("ignoring setting %s=%r", field.name, data[field.name])
    return BenchSettings(**values)


def save_settings(settings: BenchSettings, path: Optional[Path] = None) -> None:
    path = path or get_settings_path()
    with path.open("w", encoding="utf-8") as f:
        json.dump(asdict(settings), f, indent=2)
    logger.info("settings written to %s", path)
