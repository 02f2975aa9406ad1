"""Shared test fixtures and configuration for pytest."""

import tempfile
from pathlib import Path

import numpy as np
import pytest

from src.harness.models import ExperimentConfig
from src.masks import BinaryMask
from src.toy.model import ToyModelConfig
from src.world.scene import Scene
from src.world.shapes import Ellipse, Shape, render


@pytest.fixture
def temp_dirs():
    """Create temporary directories for testing."""
    with tempfile.TemporaryDirectory() as tmpdir:
        tmpdir = Path(tmpdir)
        outputs = tmpdir / "outputs"
        configs = tmpdir / "configs"

        outputs.mkdir()
        configs.mkdir()

        yield {
            "root": tmpdir,
            "outputs": outputs,
            "configs": configs,
        }


@pytest.fixture
def rng():
    """Seeded random stream; every test gets a fresh one."""
    return np.random.default_rng(12345)


@pytest.fixture
def square_mask():
    """4x4 grid with a 2x2 block in the middle."""
    return BinaryMask.from_rows([
        [0, 0, 0, 0],
        [0, 1, 1, 0],
        [0, 1, 1, 0],
        [0, 0, 0, 0],
    ])


@pytest.fixture
def two_blobs():
    """5x5 grid with two 4-disconnected components of areas 3 and 4."""
    return BinaryMask.from_rows([
        [1, 1, 0, 0, 0],
        [1, 0, 0, 0, 0],
        [0, 0, 0, 1, 1],
        [0, 0, 0, 1, 1],
        [0, 0, 0, 0, 0],
    ])


@pytest.fixture
def disk_shape():
    return Shape((Ellipse(32.0, 32.0, 12.0, 12.0),))


@pytest.fixture
def disk_mask(disk_shape):
    """Radius-12 disk centred in a 64x64 grid."""
    return render(disk_shape, 64, 64)


@pytest.fixture
def disk_scene(disk_shape, disk_mask):
    """Disk whose right part (x >= 35) is hidden."""
    cols = np.arange(64)[None, :] >= 35
    occluder = BinaryMask(disk_mask.data & cols)
    return Scene(
        shape=disk_shape,
        appearance=0.8,
        complete_mask=disk_mask,
        partial_mask=disk_mask - occluder,
        occluder=occluder,
        seed=7,
        scene_id=0,
    )


@pytest.fixture
def tiny_model_config():
    """Small toy denoiser that keeps gradient checks fast."""
    return ToyModelConfig(side=4, hidden=6, embed_dim=4, trunk_hidden=8)


@pytest.fixture
def small_experiment():
    """Eight-scene experiment with a short loop."""
    return ExperimentConfig(
        scene_count=8,
        root_seed=3,
        imd={"steps_T": 3, "samples_N": 3},
    )
