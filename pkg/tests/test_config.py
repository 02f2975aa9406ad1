"""Tests for the environment-driven config module and experiment config files."""

import json
import logging
import os
from pathlib import Path

import pytest

from src import config
from src.errors import ConfigError
from src.harness import ExperimentConfig, load_config, write_echo
from src.logging_utils import setup_logging


def test_config_imports():
    """Test that the config module exposes every default the packages read."""
    for name in (
        "OUTPUT_DIR",
        "WORKERS",
        "LOG_LEVEL",
        "ROOT_SEED",
        "IMD_STEPS",
        "IMD_SAMPLES",
        "VOTE_TAU",
        "VOTE_STRATEGY",
        "SEGMENTER_THETA",
        "RESOLUTION",
        "SCENE_COUNT",
        "OCCLUSION_RATE",
        "ORACLE_FIDELITY_BETA",
        "ORACLE_BOUNDARY_SIGMA",
        "ORACLE_ARTIFACT_GAIN",
    ):
        assert hasattr(config, name)


def test_output_dir_is_absolute():
    assert os.path.isabs(config.OUTPUT_DIR)


def test_defaults_validate():
    """Test that the shipped defaults pass validation."""
    config.validate_config()


@pytest.mark.parametrize(
    "name,value,fragment",
    [
        ("WORKERS", 0, "MASKLAB_WORKERS"),
        ("LOG_LEVEL", "LOUD", "MASKLAB_LOG_LEVEL"),
        ("VOTE_TAU", 1.5, "MASKLAB_VOTE_TAU"),
        ("VOTE_STRATEGY", "median", "MASKLAB_VOTE_STRATEGY"),
        ("SEGMENTER_THETA", 1.0, "MASKLAB_SEGMENTER_THETA"),
        ("RESOLUTION", 4, "MASKLAB_RESOLUTION"),
        ("OCCLUSION_RATE", 0.0, "MASKLAB_OCCLUSION_RATE"),
        ("ORACLE_FIDELITY_BETA", 0.0, "MASKLAB_ORACLE_BETA"),
        ("ORACLE_BOUNDARY_SIGMA", -1.0, "MASKLAB_ORACLE_SIGMA"),
    ],
)
def test_validate_config_rejects(monkeypatch, name, value, fragment):
    """Test that each out-of-range setting is reported by its variable name."""
    monkeypatch.setattr(config, name, value)
    with pytest.raises(ValueError) as excinfo:
        config.validate_config()
    message = str(excinfo.value)
    assert message.startswith("Configuration errors:")
    assert fragment in message


def test_validate_config_collects_all_errors(monkeypatch):
    monkeypatch.setattr(config, "WORKERS", 0)
    monkeypatch.setattr(config, "SCENE_COUNT", 0)
    with pytest.raises(ValueError) as excinfo:
        config.validate_config()
    assert str(excinfo.value).count("\n  - ") == 2


def test_print_config_summary(capsys):
    config.print_config_summary()
    out = capsys.readouterr().out
    assert "Configuration Summary" in out
    assert f"T={config.IMD_STEPS}" in out


def test_setup_logging_quiet():
    setup_logging(quiet=True)
    assert logging.getLogger().level == logging.WARNING
    setup_logging(level="debug")
    assert logging.getLogger().level == logging.DEBUG


@pytest.mark.unit
class TestExperimentConfig:

    def test_defaults_follow_environment(self):
        cfg = ExperimentConfig()
        assert cfg.resolution == config.RESOLUTION
        assert cfg.scene_count == config.SCENE_COUNT
        assert cfg.imd.steps_T == config.IMD_STEPS

    def test_rejects_unknown_keys(self):
        with pytest.raises(ValueError):
            ExperimentConfig(scenes=3)

    def test_rejects_bad_k_range(self):
        with pytest.raises(ValueError):
            ExperimentConfig(k_range=(3, 1))

    def test_load_round_trip(self, temp_dirs):
        path = temp_dirs["configs"] / "exp.json"
        path.write_text(json.dumps({"scene_count": 3, "sweep": {"axis": "steps", "values": [1, 2]}}))
        cfg = load_config(path)
        assert cfg.scene_count == 3
        assert cfg.sweep.values == [1, 2]

    def test_missing_file(self, temp_dirs):
        with pytest.raises(ConfigError) as excinfo:
            load_config(temp_dirs["configs"] / "absent.json")
        assert excinfo.value.path.name == "absent.json"

    def test_non_object(self, temp_dirs):
        path = temp_dirs["configs"] / "list.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_echo_reloads_to_same_config(self, temp_dirs):
        cfg = ExperimentConfig(scene_count=4, root_seed=11, output_dir="somewhere")
        path = write_echo(cfg, temp_dirs["outputs"])
        echo = json.loads(path.read_text())
        assert "output_dir" not in echo
        assert ExperimentConfig(**echo) == cfg.model_copy(update={"output_dir": None})


CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.mark.unit
@pytest.mark.parametrize("path", sorted(CONFIG_DIR.glob("*.json")), ids=lambda p: p.stem)
def test_shipped_configs_load(path):
    cfg = load_config(path)
    assert cfg.sweep is not None
