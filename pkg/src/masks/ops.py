"""Set algebra, geometry and probability-map analysis over masks."""

from typing import Sequence

import numpy as np
from scipy import ndimage

from ..errors import DimensionMismatchError, EmptyMaskError, InvalidParameterError
from .types import BBox, BinaryMask, ProbMask

# 4-connectivity
CROSS = ndimage.generate_binary_structure(2, 1)


def _same_size(a, b, what: str = "masks") -> None:
    if a.shape != b.shape:
        raise DimensionMismatchError(
            f"{what} differ in size: {a.width}x{a.height} vs {b.width}x{b.height}"
        )


def iou(a: BinaryMask, b: BinaryMask) -> float:
    """Intersection over union; 1.0 when both masks are empty."""
    _same_size(a, b)
    union = int(np.count_nonzero(a.data | b.data))
    if union == 0:
        return 1.0
    return int(np.count_nonzero(a.data & b.data)) / union


def dice(a: BinaryMask, b: BinaryMask) -> float:
    """Dice coefficient 2|a∩b| / (|a|+|b|); 1.0 when both masks are empty."""
    _same_size(a, b)
    total = a.area + b.area
    if total == 0:
        return 1.0
    return 2.0 * int(np.count_nonzero(a.data & b.data)) / total


def mean_masks(masks: Sequence[BinaryMask]) -> ProbMask:
    """Per-pixel arithmetic mean of a non-empty list of same-size masks."""
    if len(masks) == 0:
        raise InvalidParameterError("mean_masks needs at least one mask")
    first = masks[0]
    for m in masks[1:]:
        _same_size(first, m)
    stack = np.stack([m.data for m in masks]).astype(np.float64)
    return ProbMask(stack.mean(axis=0))


def threshold(p: ProbMask, tau: float) -> BinaryMask:
    """Foreground where p ≥ tau (inclusive, so ties land on foreground)."""
    if not 0.0 <= tau <= 1.0:
        raise InvalidParameterError(f"tau must lie in [0, 1], got {tau}")
    return BinaryMask(p.data >= tau)


def bbox_of(mask: BinaryMask) -> BBox:
    """Tight box around the foreground."""
    if mask.is_empty():
        raise EmptyMaskError("bbox_of needs a non-empty mask")
    rows = np.flatnonzero(mask.data.any(axis=1))
    cols = np.flatnonzero(mask.data.any(axis=0))
    return BBox(int(cols[0]), int(rows[0]), int(cols[-1]) + 1, int(rows[-1]) + 1)


def cross_section(p: ProbMask, row: int) -> np.ndarray:
    """Values of one row, left to right."""
    if not 0 <= row < p.height:
        raise InvalidParameterError(f"row {row} outside [0, {p.height})")
    return np.array(p.data[row], copy=True)


def is_unimodal(v: Sequence[float], tol: float = 0.0) -> bool:
    """True iff v splits into a non-decreasing prefix and non-increasing suffix.

    Each step may go the wrong way by at most ``tol``.
    """
    if tol < 0:
        raise InvalidParameterError(f"tol must be >= 0, got {tol}")
    values = np.asarray(v, dtype=np.float64)
    if values.size < 3:
        return True
    steps = np.diff(values)
    rising_ok = steps >= -tol
    falling_ok = steps <= tol
    # prefix_ok[s]: steps [0, s) all rising; suffix_ok[s]: steps [s, n-1) all falling
    prefix_ok = np.concatenate(([True], np.cumprod(rising_ok).astype(bool)))
    suffix_ok = np.concatenate((np.cumprod(falling_ok[::-1]).astype(bool)[::-1], [True]))
    return bool((prefix_ok & suffix_ok).any())


def label_components(mask: BinaryMask) -> tuple:
    """4-connected labelling; returns (labels, count)."""
    labels, count = ndimage.label(mask.data, structure=CROSS)
    return labels, int(count)


def is_connected(mask: BinaryMask) -> bool:
    """True iff the foreground forms exactly one 4-connected component."""
    return label_components(mask)[1] == 1


def largest_component_containing(mask: BinaryMask, seed_region: BinaryMask) -> BinaryMask:
    """Component of ``mask`` with the largest overlap with ``seed_region``.

    Falls back to the globally largest component when nothing overlaps.
    Ties go to the lower label, i.e. the component met first in row-major order.
    """
    _same_size(mask, seed_region)
    labels, count = label_components(mask)
    if count == 0:
        return BinaryMask.zeros(mask.width, mask.height)

    overlap = np.bincount(labels[seed_region.data], minlength=count + 1)
    overlap[0] = 0
    if overlap.max() > 0:
        chosen = int(np.argmax(overlap))
    else:
        sizes = np.bincount(labels.ravel(), minlength=count + 1)
        sizes[0] = 0
        chosen = int(np.argmax(sizes))
    return BinaryMask(labels == chosen)
