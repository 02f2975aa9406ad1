"""Tests for mask types and mask operations."""

import numpy as np
import pytest

from src.errors import DimensionMismatchError, EmptyMaskError, InvalidParameterError
from src.masks import (
    BBox,
    BinaryMask,
    ProbMask,
    bbox_of,
    cross_section,
    dice,
    iou,
    is_connected,
    is_unimodal,
    label_components,
    largest_component_containing,
    mean_masks,
    threshold,
)


@pytest.mark.unit
class TestBinaryMask:
    """Construction and set algebra."""

    def test_from_rows_shape(self, square_mask):
        assert square_mask.width == 4
        assert square_mask.height == 4
        assert square_mask.area == 4

    def test_rejects_non_binary_values(self):
        with pytest.raises(InvalidParameterError):
            BinaryMask(np.array([[0, 2], [1, 0]]))

    def test_rejects_one_dimensional(self):
        with pytest.raises(InvalidParameterError):
            BinaryMask(np.array([0, 1, 1]))

    def test_data_is_read_only(self, square_mask):
        with pytest.raises(ValueError):
            square_mask.data[0, 0] = True

    def test_from_vector_is_row_major(self):
        mask = BinaryMask.from_vector([1, 0, 0, 0, 0, 1], width=3, height=2)
        assert mask.data[0, 0]
        assert mask.data[1, 2]
        assert np.array_equal(mask.to_vector(), [1, 0, 0, 0, 0, 1])

    def test_from_vector_wrong_length(self):
        with pytest.raises(DimensionMismatchError):
            BinaryMask.from_vector([1, 0, 1], width=2, height=2)

    def test_set_operations(self, square_mask):
        full = BinaryMask.full(4, 4)
        assert (square_mask | full) == full
        assert (square_mask & full) == square_mask
        assert (full - square_mask).area == 12
        assert (~square_mask) == (full - square_mask)
        assert (square_mask ^ square_mask).is_empty()
        assert square_mask.issubset(full)
        assert not full.issubset(square_mask)

    def test_size_mismatch_raises(self, square_mask):
        with pytest.raises(DimensionMismatchError):
            square_mask | BinaryMask.zeros(5, 4)

    def test_equal_masks_hash_equal(self, square_mask):
        copy = BinaryMask(square_mask.data.copy())
        assert copy == square_mask
        assert hash(copy) == hash(square_mask)


@pytest.mark.unit
class TestOverlap:
    """IoU and Dice."""

    def test_iou_identical(self, square_mask):
        assert iou(square_mask, square_mask) == 1.0

    def test_iou_disjoint(self, square_mask):
        assert iou(square_mask, ~square_mask) == 0.0

    def test_iou_both_empty_is_one(self):
        empty = BinaryMask.zeros(3, 3)
        assert iou(empty, empty) == 1.0
        assert dice(empty, empty) == 1.0

    def test_iou_half_overlap(self):
        a = BinaryMask.from_rows([[1, 1, 0]])
        b = BinaryMask.from_rows([[0, 1, 1]])
        assert iou(a, b) == pytest.approx(1 / 3)
        assert dice(a, b) == pytest.approx(0.5)

    def test_dice_iou_identity(self, rng):
        for _ in range(20):
            a = BinaryMask(rng.random((6, 7)) < 0.5)
            b = BinaryMask(rng.random((6, 7)) < 0.5)
            j = iou(a, b)
            assert dice(a, b) == pytest.approx(2 * j / (1 + j))

    def test_iou_size_mismatch(self, square_mask):
        with pytest.raises(DimensionMismatchError):
            iou(square_mask, BinaryMask.zeros(3, 4))


@pytest.mark.unit
class TestMeanAndThreshold:

    def test_mean_of_masks(self):
        a = BinaryMask.from_rows([[1, 0], [1, 1]])
        b = BinaryMask.from_rows([[1, 0], [0, 0]])
        p = mean_masks([a, b])
        assert np.allclose(p.data, [[1.0, 0.0], [0.5, 0.5]])

    def test_mean_empty_list(self):
        with pytest.raises(InvalidParameterError):
            mean_masks([])

    def test_threshold_inclusive(self):
        p = ProbMask(np.array([[0.5, 0.49], [1.0, 0.0]]))
        assert threshold(p, 0.5) == BinaryMask.from_rows([[1, 0], [1, 0]])

    def test_threshold_zero_is_full(self):
        p = ProbMask(np.zeros((2, 3)))
        assert threshold(p, 0.0) == BinaryMask.full(3, 2)

    def test_threshold_out_of_range(self):
        with pytest.raises(InvalidParameterError):
            threshold(ProbMask(np.zeros((2, 2))), 1.5)

    def test_prob_mask_rejects_out_of_range(self):
        with pytest.raises(InvalidParameterError):
            ProbMask(np.array([[1.2]]))


@pytest.mark.unit
class TestGeometry:

    def test_bbox(self, square_mask):
        assert bbox_of(square_mask) == BBox(1, 1, 3, 3)

    def test_bbox_empty(self):
        with pytest.raises(EmptyMaskError):
            bbox_of(BinaryMask.zeros(3, 3))

    def test_degenerate_bbox(self):
        with pytest.raises(InvalidParameterError):
            BBox(2, 0, 2, 1)

    def test_cross_section(self):
        p = ProbMask(np.array([[0.1, 0.2], [0.3, 0.4]]))
        assert np.allclose(cross_section(p, 1), [0.3, 0.4])
        with pytest.raises(InvalidParameterError):
            cross_section(p, 2)


@pytest.mark.unit
class TestUnimodal:

    @pytest.mark.parametrize("values", [
        [0, 1, 2, 1, 0],
        [0, 0, 0],
        [3, 2, 1],
        [1, 2, 3],
        [0.2],
        [],
    ])
    def test_unimodal(self, values):
        assert is_unimodal(values)

    def test_two_peaks(self):
        assert not is_unimodal([0, 1, 0, 1, 0])

    def test_tolerance_absorbs_small_dip(self):
        values = [0.0, 0.5, 0.45, 0.9, 0.2]
        assert not is_unimodal(values)
        assert is_unimodal(values, tol=0.1)

    def test_negative_tolerance(self):
        with pytest.raises(InvalidParameterError):
            is_unimodal([0, 1], tol=-0.1)


@pytest.mark.unit
class TestComponents:

    def test_label_count(self, two_blobs):
        labels, count = label_components(two_blobs)
        assert count == 2
        assert np.array_equal(labels > 0, two_blobs.data)

    def test_diagonal_is_not_connected(self):
        diagonal = BinaryMask.from_rows([[1, 0], [0, 1]])
        assert not is_connected(diagonal)
        assert label_components(diagonal)[1] == 2

    def test_connected(self, square_mask):
        assert is_connected(square_mask)
        assert not is_connected(BinaryMask.zeros(2, 2))

    def test_largest_component_containing_seed(self, two_blobs):
        seed = BinaryMask.zeros(5, 5) | BinaryMask.from_rows([
            [1, 0, 0, 0, 0],
            [0, 0, 0, 0, 0],
            [0, 0, 0, 0, 0],
            [0, 0, 0, 0, 0],
            [0, 0, 0, 0, 0],
        ])
        picked = largest_component_containing(two_blobs, seed)
        assert picked.area == 3
        assert picked.issubset(two_blobs)

    def test_largest_component_without_overlap_falls_back_to_largest(self, two_blobs):
        seed = BinaryMask.from_rows([[0] * 5] * 4 + [[1, 0, 0, 0, 0]])
        picked = largest_component_containing(two_blobs, seed)
        assert picked.area == 4

    def test_largest_component_of_empty_mask(self):
        empty = BinaryMask.zeros(3, 3)
        assert largest_component_containing(empty, BinaryMask.full(3, 3)).is_empty()
