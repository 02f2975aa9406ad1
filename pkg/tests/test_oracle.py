"""Tests for the oracle generator."""

import numpy as np
import pytest

from src.errors import DimensionMismatchError, InvalidParameterError
from src.harness import ExperimentConfig, build_benchmark
from src.masks import BinaryMask, iou, is_unimodal
from src.masks.types import ProbMask
from src.world import (
    OracleGenerator,
    OracleParams,
    PartialObservation,
    incompleteness,
    oracle_generate,
    sample_object_mask,
)
from src.world.oracle import blend_field


@pytest.mark.unit
class TestOracleLaw:

    def test_noiseless_fixed_point(self, disk_scene, rng):
        params = OracleParams.noiseless()
        for _ in range(10):
            img = oracle_generate(disk_scene.truth, disk_scene.observation(), disk_scene.complete_mask, params, rng)
            assert BinaryMask(img.data > 0) == disk_scene.complete_mask
            fg = img.data[disk_scene.complete_mask.data]
            assert np.all(np.abs(fg - disk_scene.appearance) <= 0.05 + 1e-12)

    def test_full_fidelity_completes_in_one_draw(self, disk_scene, rng):
        params = OracleParams.noiseless(fidelity_beta=1.0)
        sampled = sample_object_mask(
            disk_scene.complete_mask, disk_scene.partial_mask, disk_scene.partial_mask, params, rng
        )
        assert sampled == disk_scene.complete_mask

    def test_partial_always_reproduced(self, disk_scene, rng):
        params = OracleParams(boundary_sigma=3.0, artifact_gain=0.5)
        for _ in range(20):
            sampled = sample_object_mask(
                disk_scene.complete_mask, disk_scene.partial_mask, disk_scene.partial_mask, params, rng
            )
            assert disk_scene.partial_mask.issubset(sampled)

    def test_same_stream_same_image(self, disk_scene):
        params = OracleParams()
        gen = OracleGenerator(disk_scene.truth, params)
        obs = disk_scene.observation()
        a = gen.generate(obs, obs.mask, np.random.default_rng(9))
        b = gen.generate(obs, obs.mask, np.random.default_rng(9))
        assert a == b

    def test_exact_condition_disables_artifacts(self, disk_scene, rng):
        params = OracleParams(boundary_sigma=0.0, artifact_gain=5.0)
        sampled = sample_object_mask(
            disk_scene.complete_mask, disk_scene.partial_mask, disk_scene.complete_mask, params, rng
        )
        assert sampled == disk_scene.complete_mask

    def test_condition_size_mismatch(self, disk_scene, rng):
        with pytest.raises(DimensionMismatchError):
            oracle_generate(disk_scene.truth, disk_scene.observation(), BinaryMask.zeros(8, 8), OracleParams(), rng)

    def test_partial_outside_truth_rejected(self, disk_scene, rng):
        image = disk_scene.observation().image
        shifted = PartialObservation(
            image, BinaryMask(np.roll(disk_scene.partial_mask.data, 20, axis=1))
        )
        with pytest.raises(InvalidParameterError):
            oracle_generate(disk_scene.truth, shifted, shifted.mask, OracleParams(), rng)


@pytest.mark.unit
def test_incompleteness(disk_scene):
    assert incompleteness(disk_scene.complete_mask, disk_scene.complete_mask) == 0.0
    assert incompleteness(disk_scene.partial_mask, disk_scene.complete_mask) == pytest.approx(
        disk_scene.occlusion_rate
    )


@pytest.mark.unit
def test_blend_field_is_uniform_ish(rng):
    field = blend_field((64, 64), 2.0, rng)
    assert field.min() >= 0.0
    assert field.max() < 1.0
    assert abs(field.mean() - 0.5) < 0.05


@pytest.mark.slow
def test_better_condition_gives_better_samples(disk_scene):
    """Mean sample IoU rises as the condition gets more complete."""
    params = OracleParams()
    rng = np.random.default_rng(0)
    half_way = disk_scene.partial_mask | BinaryMask(
        disk_scene.occluder.data & (np.arange(64)[None, :] < 41)
    )
    scores = {}
    for name, cond in [("partial", disk_scene.partial_mask), ("half", half_way), ("complete", disk_scene.complete_mask)]:
        samples = [
            sample_object_mask(disk_scene.complete_mask, disk_scene.partial_mask, cond, params, rng)
            for _ in range(100)
        ]
        scores[name] = np.mean([iou(s, disk_scene.complete_mask) for s in samples])
    assert scores["partial"] < scores["half"] < scores["complete"]


UNIMODAL_SCENES = 20


@pytest.fixture(scope="module")
def unimodal_benchmark():
    return build_benchmark(ExperimentConfig(scene_count=UNIMODAL_SCENES, root_seed=0, occlusion_rate=0.4))


@pytest.mark.slow
@pytest.mark.parametrize("index", range(UNIMODAL_SCENES))
def test_mean_probability_map_is_unimodal_across_hidden_rows(unimodal_benchmark, index):
    scene = unimodal_benchmark[index]
    params = OracleParams()
    rng = np.random.default_rng(index + 1)
    samples = [
        sample_object_mask(scene.complete_mask, scene.partial_mask, scene.partial_mask, params, rng)
        for _ in range(200)
    ]
    mean = ProbMask(np.mean([s.data for s in samples], axis=0))
    truth = scene.complete_mask.data.astype(np.float64)
    hidden_rows = [
        row for row in range(mean.height)
        if scene.occluder.data[row].any() and is_unimodal(truth[row])
    ]
    assert hidden_rows
    for row in hidden_rows:
        assert is_unimodal(mean.data[row], tol=0.1), f"scene {index}, row {row}"
