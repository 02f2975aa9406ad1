"""Tests for the iterative mask denoising loop."""

import numpy as np
import pytest
from unittest.mock import PropertyMock

from src.errors import EmptyMaskError, InvalidParameterError, StepError
from src.imd import IMDConfig, SegmenterKind, VotingStrategy, imd_step, run_imd, summarize
from src.masks import BinaryMask, iou
from src.world import GrayImage, OracleGenerator, OracleParams, Scene, realize_image


class FixedGenerator:
    """Always paints the same mask, whatever the condition."""

    def __init__(self, mask: BinaryMask, appearance: float = 0.8):
        self.mask = mask
        self.appearance = appearance
        self.calls = 0

    def generate(self, partial, condition, rng):
        self.calls += 1
        if self.mask.is_empty():
            return GrayImage(np.zeros(self.mask.shape))
        return realize_image(self.mask, self.appearance)


class FailingGenerator:
    def generate(self, partial, condition, rng):
        raise RuntimeError("boom")


@pytest.fixture
def seg():
    return SegmenterKind.threshold_at(0.4)


@pytest.mark.unit
class TestImdStep:

    def test_truth_is_a_fixed_point(self, disk_scene, seg):
        gen = OracleGenerator(disk_scene.truth, OracleParams.noiseless())
        fused, record = imd_step(
            disk_scene.observation(), disk_scene.complete_mask, gen, seg, IMDConfig(root_seed=1), t=1
        )
        assert fused == disk_scene.complete_mask
        assert record.delta_iou == 1.0
        assert record.warning is None

    def test_partial_is_always_kept(self, disk_scene, seg):
        # generator keeps only the left half of the visible part
        left = BinaryMask(disk_scene.partial_mask.data & (np.arange(64)[None, :] < 28))
        fused, _ = imd_step(disk_scene.observation(), disk_scene.partial_mask, FixedGenerator(left), seg, IMDConfig(), 1)
        assert disk_scene.partial_mask.issubset(fused)

    def test_empty_vote_keeps_condition(self, disk_scene, seg):
        empty = BinaryMask.zeros(64, 64)
        cfg = IMDConfig(strategy=VotingStrategy(kind="mask_mean", tau=0.5))
        fused, record = imd_step(disk_scene.observation(), disk_scene.partial_mask, FixedGenerator(empty), seg, cfg, 1)
        assert fused == disk_scene.partial_mask
        assert record.warning is not None

    def test_draws_n_samples(self, disk_scene, seg):
        gen = FixedGenerator(disk_scene.complete_mask)
        _, record = imd_step(disk_scene.observation(), disk_scene.partial_mask, gen, seg, IMDConfig(samples_N=4), 1)
        assert gen.calls == 4
        assert len(record.sample_masks) == 4
        assert len(record.sample_images) == 4

    def test_generator_failure_is_wrapped(self, disk_scene, seg):
        with pytest.raises(StepError) as excinfo:
            imd_step(disk_scene.observation(), disk_scene.partial_mask, FailingGenerator(), seg, IMDConfig(), 2)
        assert excinfo.value.step == 2
        assert excinfo.value.sample == 1
        assert isinstance(excinfo.value.__cause__, RuntimeError)

    def test_rejects_step_zero(self, disk_scene, seg):
        with pytest.raises(InvalidParameterError):
            imd_step(disk_scene.observation(), disk_scene.partial_mask, FailingGenerator(), seg, IMDConfig(), 0)

    def test_rejects_empty_condition(self, disk_scene, seg):
        with pytest.raises(EmptyMaskError):
            imd_step(disk_scene.observation(), BinaryMask.zeros(64, 64), FailingGenerator(), seg, IMDConfig(), 1)


@pytest.mark.unit
class TestRunImd:

    def test_trace_shape(self, disk_scene, seg):
        gen = OracleGenerator(disk_scene.truth, OracleParams())
        trace = run_imd(disk_scene, gen, seg, IMDConfig(steps_T=4, samples_N=3, root_seed=2))
        assert trace.steps_run == 4
        assert [r.step for r in trace.steps] == [1, 2, 3, 4]
        assert trace.final_image is not None
        assert trace.final_iou == pytest.approx(iou(trace.final_mask, disk_scene.complete_mask))
        assert all(r.fused_iou_truth is not None for r in trace.steps)
        assert all(disk_scene.partial_mask.issubset(r.fused_mask) for r in trace.steps)

    def test_deterministic(self, disk_scene, seg):
        gen = OracleGenerator(disk_scene.truth, OracleParams())
        cfg = IMDConfig(steps_T=3, samples_N=3, root_seed=5)
        a = run_imd(disk_scene, gen, seg, cfg)
        b = run_imd(disk_scene, gen, seg, cfg)
        assert [r.fused_mask for r in a.steps] == [r.fused_mask for r in b.steps]
        assert a.final_image == b.final_image

    def test_thread_pool_matches_serial(self, disk_scene, seg):
        gen = OracleGenerator(disk_scene.truth, OracleParams())
        serial = run_imd(disk_scene, gen, seg, IMDConfig(steps_T=2, samples_N=5, root_seed=8, workers=1))
        pooled = run_imd(disk_scene, gen, seg, IMDConfig(steps_T=2, samples_N=5, root_seed=8, workers=3))
        assert [r.fused_mask for r in serial.steps] == [r.fused_mask for r in pooled.steps]

    def test_early_stop(self, disk_scene, seg):
        gen = OracleGenerator(disk_scene.truth, OracleParams.noiseless(fidelity_beta=1.0))
        trace = run_imd(disk_scene, gen, seg, IMDConfig(steps_T=6, convergence_eps=1e-9))
        assert trace.converged_at == 2
        assert trace.steps_run == 2
        assert trace.final_iou == 1.0
        assert trace.convergence_step() == 2

    def test_initial_condition_is_unioned_with_partial(self, disk_scene, seg):
        gen = OracleGenerator(disk_scene.truth, OracleParams.noiseless())
        trace = run_imd(
            disk_scene, gen, seg, IMDConfig(steps_T=1), initial_condition=disk_scene.occluder
        )
        assert trace.initial_mask == disk_scene.complete_mask
        assert trace.final_mask == disk_scene.complete_mask

    def test_unscored_run_never_reads_truth(self, disk_scene, seg, mocker):
        gen = OracleGenerator(disk_scene.truth, OracleParams())
        truth = mocker.patch.object(
            Scene, "complete_mask", new_callable=PropertyMock, create=True,
            return_value=disk_scene.complete_mask,
        )
        trace = run_imd(disk_scene, gen, seg, IMDConfig(steps_T=2, samples_N=2), score_truth=False)
        assert truth.call_count == 0
        assert trace.final_iou is None
        assert trace.steps[0].fused_iou_truth is None

        run_imd(disk_scene, gen, seg, IMDConfig(steps_T=2, samples_N=2), score_truth=True)
        assert truth.call_count >= 1

    def test_summarize(self, disk_scene, seg):
        gen = OracleGenerator(disk_scene.truth, OracleParams())
        traces = [run_imd(disk_scene, gen, seg, IMDConfig(steps_T=2, samples_N=2, root_seed=s)) for s in range(3)]
        summary = summarize(traces)
        assert summary["scenes"] == 3
        assert summary["mean_final_iou"] == pytest.approx(np.mean([t.final_iou for t in traces]))


@pytest.mark.slow
def test_more_steps_do_not_hurt_on_average(disk_scene, seg):
    gen = OracleGenerator(disk_scene.truth, OracleParams())
    means = []
    for steps in (1, 3, 5):
        scores = [
            run_imd(disk_scene, gen, seg, IMDConfig(steps_T=steps, samples_N=5, root_seed=s)).final_iou
            for s in range(20)
        ]
        means.append(np.mean(scores))
    assert means[0] <= means[1] + 0.005
    assert means[1] <= means[2] + 0.005
    assert means[2] >= 0.9
