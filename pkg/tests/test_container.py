import struct

import pytest

from conftest import GOLDEN_T1, GOLDEN_T2
from relsel.config import IndexConfig
from relsel.container import (
    IndexMode,
    build_index,
    component_sizes,
    dump_index,
    load_index,
    mode_of,
    open_index,
    read_sections,
    save_index,
)
from relsel.errors import InvalidInputError
from relsel.fm import FMIndex, RelativeFMIndex
from relsel.mutate import mutate


@pytest.mark.parametrize("mode", list(IndexMode))
def test_round_trip_preserves_answers(mode):
    index = build_index(mode, GOLDEN_T1, GOLDEN_T2)
    assert mode_of(index) is mode
    back, meta = load_index(dump_index(index, {"seed": 5}))
    assert meta["mode"] == mode.value
    assert meta["seed"] == 5
    assert isinstance(back, FMIndex if mode is IndexMode.PLAIN else RelativeFMIndex)
    for i in range(1, len(index) + 1):
        assert back.lf(i) == index.lf(i)
        assert back.psi(i) == index.psi(i)


def test_section_layout():
    index = build_index(IndexMode.RELATIVE_SELECT, GOLDEN_T1, GOLDEN_T2)
    payload = dump_index(index)
    assert payload[:4] == b"RSEL"
    assert struct.unpack_from("<H", payload, 4) == (1,)
    assert list(read_sections(payload)) == [b"META", b"RREF", b"RSEL", b"RSLX", b"CAR2"]
    plain = dump_index(build_index(IndexMode.PLAIN, None, GOLDEN_T2))
    assert list(read_sections(plain)) == [b"META", b"FMIX"]


def test_shared_markers_are_smaller():
    pair = mutate(4, 3000, 0.01, 0.002)
    index = build_index(IndexMode.RELATIVE_SELECT, pair.text1, pair.text2, text_alignment=pair.alignment)
    shared = IndexConfig(share_markers=True)
    separate = component_sizes(index)
    together = component_sizes(index, config=shared)
    assert together["RSLX"] < separate["RSLX"]
    assert together["total"] < separate["total"]
    back, meta = load_index(dump_index(index, config=shared))
    assert meta["share_markers"] is True
    assert back.select("A", 1) == index.select("A", 1)


def test_component_sizes_report_markers():
    index = build_index(IndexMode.RELATIVE, GOLDEN_T1, GOLDEN_T2)
    sizes = component_sizes(index)
    assert "marker.Bpx" not in sizes
    assert sizes["markers"] == index.rel.marker_nbytes()
    assert sizes["total"] == len(dump_index(index))


def test_corrupt_files_rejected():
    payload = dump_index(build_index(IndexMode.PLAIN, None, GOLDEN_T2))
    with pytest.raises(InvalidInputError):
        load_index(b"NOPE" + payload[4:])
    with pytest.raises(InvalidInputError):
        load_index(payload[:-3])
    with pytest.raises(InvalidInputError):
        load_index(payload + b"\x00")
    relative = dump_index(build_index(IndexMode.RELATIVE, GOLDEN_T1, GOLDEN_T2))
    with pytest.raises(InvalidInputError):
        load_index(relative.replace(b"CAR2", b"CARX"))


def test_relative_mode_needs_reference():
    with pytest.raises(InvalidInputError):
        build_index(IndexMode.RELATIVE, None, GOLDEN_T2)


def test_save_and_open(tmp_path):
    index = build_index("relative-fm+select", GOLDEN_T1, GOLDEN_T2)
    path = tmp_path / "pair.rsel"
    size = save_index(path, index)
    assert path.stat().st_size == size
    back, _ = open_index(path)
    assert back.select("C", 1) == index.select("C", 1)
    with pytest.raises(InvalidInputError):
        open_index(tmp_path / "missing.rsel")


def test_elias_fano_markers_load_and_shrink_the_index():
    pair = mutate(8, 5000, 0.002, 0.0005)
    packed = IndexConfig(sparse_encoding="elias-fano")
    index = build_index(
        IndexMode.RELATIVE_SELECT, pair.text1, pair.text2, text_alignment=pair.alignment, config=packed
    )
    fixed = build_index(IndexMode.RELATIVE_SELECT, pair.text1, pair.text2, text_alignment=pair.alignment)
    assert component_sizes(index)["own"] < component_sizes(fixed)["own"]
    back, _ = load_index(dump_index(index))
    for i in range(1, len(index) + 1, 37):
        assert back.psi(i) == fixed.psi(i)
