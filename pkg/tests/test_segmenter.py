"""Tests for the segmentation stage."""

import numpy as np
import pytest

from src.errors import DimensionMismatchError, EmptyMaskError, InvalidParameterError
from src.imd import SegmenterKind, perturb_boundary, segment
from src.masks import BinaryMask, ProbMask, threshold
from src.world import GrayImage, realize_image


@pytest.mark.unit
class TestSegmenterKind:

    def test_defaults_to_threshold(self):
        seg = SegmenterKind()
        assert seg.kind == "threshold"
        assert seg.noise_fraction == 0.0

    def test_threshold_level_must_be_open_interval(self):
        with pytest.raises(ValueError):
            SegmenterKind.threshold_at(1.0)

    def test_noisy_requires_inner(self):
        with pytest.raises(ValueError):
            SegmenterKind(kind="noisy", level=0.1)

    def test_noise_fraction_accumulates(self):
        seg = SegmenterKind.with_noise(0.05, SegmenterKind.with_noise(0.1))
        assert seg.noise_fraction == pytest.approx(0.15)

    def test_serialises_nested(self):
        seg = SegmenterKind.with_noise(0.05)
        again = SegmenterKind(**seg.model_dump())
        assert again == seg


@pytest.mark.unit
class TestThresholdSegmenter:

    def test_clean_image_gives_object(self, disk_scene, rng):
        img = disk_scene.complete_image()
        mask, logits = segment(img, disk_scene.partial_mask, SegmenterKind(), rng)
        assert mask == disk_scene.complete_mask
        assert np.allclose(logits.data, img.data)

    def test_keeps_component_touching_prompt(self, two_blobs, rng):
        img = realize_image(two_blobs, 0.9)
        prompt = BinaryMask.from_rows([[0] * 5, [0] * 5, [0, 0, 0, 0, 1], [0] * 5, [0] * 5])
        mask, _ = segment(img, prompt, SegmenterKind(), rng)
        assert mask.area == 4
        assert mask.data[2, 4]

    def test_dim_pixels_dropped(self, rng):
        img = GrayImage(np.array([[0.9, 0.3, 0.9]]))
        prompt = BinaryMask.from_rows([[1, 0, 0]])
        mask, _ = segment(img, prompt, SegmenterKind.threshold_at(0.4), rng)
        assert mask == BinaryMask.from_rows([[1, 0, 0]])

    def test_empty_prompt(self, disk_scene, rng):
        with pytest.raises(EmptyMaskError):
            segment(disk_scene.complete_image(), BinaryMask.zeros(64, 64), SegmenterKind(), rng)

    def test_size_mismatch(self, disk_scene, rng):
        with pytest.raises(DimensionMismatchError):
            segment(disk_scene.complete_image(), BinaryMask.full(8, 8), SegmenterKind(), rng)

    def test_larger_theta_gives_subset_before_filtering(self, rng):
        image = GrayImage(rng.random((16, 16)))
        _, logits = segment(image, BinaryMask.full(16, 16), SegmenterKind(), rng)
        masks = [threshold(logits, theta) for theta in np.linspace(0.05, 0.95, 19)]
        for wider, narrower in zip(masks, masks[1:]):
            assert narrower.issubset(wider)

    def test_larger_theta_shrinks_segmented_object(self, rng):
        yy, xx = np.mgrid[0:32, 0:32]
        image = GrayImage(np.clip(1.0 - np.hypot(yy - 16, xx - 16) / 20.0, 0.0, 1.0))
        prompt = BinaryMask((abs(yy - 16) <= 1) & (abs(xx - 16) <= 1))
        thetas = (0.1, 0.3, 0.5, 0.7, 0.9)
        masks = [segment(image, prompt, SegmenterKind.threshold_at(theta), rng)[0] for theta in thetas]
        for wider, narrower in zip(masks, masks[1:]):
            assert narrower.issubset(wider)
            assert narrower.area < wider.area


@pytest.mark.unit
class TestNoisySegmenter:

    def test_zero_noise_is_inner(self, disk_scene):
        img = disk_scene.complete_image()
        clean = segment(img, disk_scene.partial_mask, SegmenterKind(), np.random.default_rng(0))
        noisy = segment(img, disk_scene.partial_mask, SegmenterKind.with_noise(0.0), np.random.default_rng(0))
        assert noisy[0] == clean[0]
        assert noisy[1] == clean[1]

    def test_noise_moves_boundary(self, disk_scene, rng):
        img = disk_scene.complete_image()
        mask, logits = segment(img, disk_scene.partial_mask, SegmenterKind.with_noise(0.1), rng)
        assert mask != disk_scene.complete_mask
        assert isinstance(logits, ProbMask)
        assert logits.data.min() >= 0.0 and logits.data.max() <= 1.0

    def test_perturb_budget(self, disk_mask, rng):
        p = 0.1
        out = perturb_boundary(disk_mask, p, rng)
        changed = (out ^ disk_mask).area
        assert 0 < changed <= 2 * round(p * disk_mask.area / 2)
        assert abs(out.area - disk_mask.area) <= round(p * disk_mask.area / 2)

    def test_perturbation_is_zero_mean(self, disk_mask):
        rng = np.random.default_rng(8)
        changes = [perturb_boundary(disk_mask, 0.2, rng).area - disk_mask.area for _ in range(1000)]
        assert abs(np.mean(changes)) < 0.02 * disk_mask.area

    def test_perturb_zero_is_identity(self, disk_mask, rng):
        assert perturb_boundary(disk_mask, 0.0, rng) == disk_mask

    def test_perturb_negative(self, disk_mask, rng):
        with pytest.raises(InvalidParameterError):
            perturb_boundary(disk_mask, -0.1, rng)
