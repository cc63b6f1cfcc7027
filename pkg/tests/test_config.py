import json

import pytest

from relsel.config import BenchSettings, IndexConfig, load_settings, save_settings


def test_defaults():
    config = IndexConfig()
    assert config.rank_block_bits == 512
    assert config.sparse_threshold == pytest.approx(1 / 16)
    assert config.as_kwargs()["share_markers"] is False


@pytest.mark.parametrize(
    "kwargs",
    [
        {"rank_block_bits": 100},
        {"rank_block_bits": 32},
        {"sparse_threshold": 0.7},
        {"lcs_cell_budget": 0},
        {"max_diff_edits": -1},
    ],
)
def test_invalid_config(kwargs):
    with pytest.raises(ValueError):
        IndexConfig(**kwargs)


def test_settings_round_trip(tmp_path):
    path = tmp_path / "settings.json"
    settings = BenchSettings(seed=7, length=1234, mode="plain-fm")
    save_settings(settings, path)
    assert load_settings(path) == settings


def test_missing_or_bad_settings_fall_back(tmp_path):
    assert load_settings(tmp_path / "absent.json") == BenchSettings()
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    assert load_settings(broken) == BenchSettings()
    partial = tmp_path / "partial.json"
    partial.write_text(json.dumps({"seed": "5", "threads": "many", "extra": 1}), encoding="utf-8")
    loaded = load_settings(partial)
    assert loaded.seed == 5
    assert loaded.threads == BenchSettings().threads
