import pytest

from src.config import PRECISION_ENV_VAR, Settings
from src.errors import ConfigError


def test_load_defaults(settings):
    assert settings.precision_bits == 256
    assert settings.oracle_n_max == 7
    assert settings.mc_chunk_size == 100_000
    assert settings.asymptotics["verify"] == ["yfixed", "x"]


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        Settings.load(tmp_path / "nope.yaml")


def test_partial_file_uses_defaults(tmp_path):
    path = tmp_path / "settings.yaml"
    path.write_text("truncation:\n  N: 12\n", encoding="utf-8")
    settings = Settings.load(path)
    assert settings.N == 12
    assert settings.P == 64


def test_invalid_value(tmp_path):
    path = tmp_path / "settings.yaml"
    path.write_text("precision:\n  bits: lots\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        Settings.load(path)


def test_precision_env_override(tmp_path, monkeypatch):
    path = tmp_path / "settings.yaml"
    path.write_text("precision:\n  bits: 128\n", encoding="utf-8")
    monkeypatch.setenv(PRECISION_ENV_VAR, "512")
    assert Settings.load(path).precision_bits == 512

    monkeypatch.setenv(PRECISION_ENV_VAR, "many")
    with pytest.raises(ConfigError):
        Settings.load(path)
