import pytest

from bplp.config import CONFIG_PATH_ENV, FALLBACK_CONFIG, PRESETS_ROOT_ENV, fallback_config
from bplp.config_store import list_presets, load_config, load_preset, refresh_config_cache


def test_default_preset_matches_fallback():
    config = load_config()
    assert config == FALLBACK_CONFIG


def test_strict_preset_overrides_only_its_keys():
    config = load_preset("strict")
    assert config["bp"]["max_iters"] == 2000
    assert config["bp"]["decode_patience"] == 0
    assert config["bp"]["tie_tol"] == pytest.approx(1e-9)
    assert config["factor_graph"]["verify_hints"] is True
    assert config["oracles"] == FALLBACK_CONFIG["oracles"]


def test_config_env_path(tmp_path, monkeypatch):
    path = tmp_path / "bplp.yaml"
    path.write_text(
        "bp:\n  max_iters: 7\n  residual_tol: 1\n  workers: yes\n  colour: red\noracles: [1, 2]\n",
        encoding="utf-8",
    )
    monkeypatch.setenv(CONFIG_PATH_ENV, str(path))
    refresh_config_cache()
    config = load_config()
    assert config["bp"]["max_iters"] == 7
    assert config["bp"]["residual_tol"] == 1.0
    assert isinstance(config["bp"]["residual_tol"], float)
    assert config["bp"]["workers"] == 1
    assert "colour" not in config["bp"]
    assert config["oracles"] == FALLBACK_CONFIG["oracles"]


def test_unreadable_config_falls_back(tmp_path):
    broken = tmp_path / "broken.yaml"
    broken.write_text("bp: [\n", encoding="utf-8")
    assert load_config(str(broken)) == FALLBACK_CONFIG
    listing = tmp_path / "list.yaml"
    listing.write_text("- 1\n", encoding="utf-8")
    assert load_config(str(listing)) == FALLBACK_CONFIG
    assert load_config(str(tmp_path / "absent.yaml")) == FALLBACK_CONFIG


def test_list_presets_reads_descriptions():
    names = {preset["name"]: preset["description"] for preset in list_presets()}
    assert {"default", "strict", "random_init"} <= set(names)
    assert names["strict"]


def test_presets_root_env(tmp_path, monkeypatch):
    (tmp_path / "fast.yaml").write_text("description: quick\nbp:\n  max_iters: 3\n", encoding="utf-8")
    (tmp_path / "notes.txt").write_text("ignored", encoding="utf-8")
    monkeypatch.setenv(PRESETS_ROOT_ENV, str(tmp_path))
    refresh_config_cache()
    assert [p["name"] for p in list_presets()] == ["fast"]
    assert load_preset("fast")["bp"]["max_iters"] == 3


def test_fallback_config_is_a_copy():
    config = fallback_config()
    config["bp"]["max_iters"] = 1
    assert FALLBACK_CONFIG["bp"]["max_iters"] == 1000


def test_callers_cannot_mutate_cached_config(tmp_path):
    path = tmp_path / "bplp.yaml"
    path.write_text("bp:\n  max_iters: 7\n", encoding="utf-8")
    first = load_config(str(path))
    first["bp"]["max_iters"] = 1
    first["oracles"].clear()
    second = load_config(str(path))
    assert second["bp"]["max_iters"] == 7
    assert second["oracles"] == FALLBACK_CONFIG["oracles"]
    load_config()["bp"]["max_iters"] = 3
    assert load_config() == FALLBACK_CONFIG
