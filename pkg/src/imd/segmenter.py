"""Segmentation stage S: image plus visible-region prompt to (mask, logits).

Two kinds are available:

* ``threshold`` clamps the image into a logit map, thresholds it at θ and
  keeps the 4-connected component that best overlaps the prompt.
* ``noisy`` wraps another segmenter and flips boundary discs with a total area
  of ``p·|mask|``, half added and half removed, to study robustness to
  segmentation errors.
"""

import logging
from typing import Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import ndimage

from ..config import SEGMENTER_THETA
from ..errors import DimensionMismatchError, EmptyMaskError, InvalidParameterError
from ..masks import BinaryMask, ProbMask, largest_component_containing, threshold
from ..masks.ops import CROSS
from ..world.shapes import GrayImage

logger = logging.getLogger(__name__)

NOISE_RADII = (1, 2, 3)
NOISY_MASK_WEIGHT = 0.9


class SegmenterKind(BaseModel):
    """Segmenter selection; ``level`` is θ for threshold and p for noisy."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["threshold", "noisy"] = Field("threshold", description="Segmenter family")
    level: float = Field(SEGMENTER_THETA, description="θ in (0,1) for threshold; noise fraction p >= 0 for noisy")
    inner: Optional["SegmenterKind"] = Field(None, description="Wrapped segmenter (noisy only)")

    @model_validator(mode="after")
    def _check_level(self):
        if self.kind == "threshold":
            if not 0.0 < self.level < 1.0:
                raise ValueError(f"threshold level must lie in (0, 1), got {self.level}")
            if self.inner is not None:
                raise ValueError("threshold segmenter takes no inner segmenter")
        else:
            if self.level < 0.0:
                raise ValueError(f"noise fraction must be >= 0, got {self.level}")
            if self.inner is None:
                raise ValueError("noisy segmenter requires an inner segmenter")
        return self

    @classmethod
    def threshold_at(cls, theta: float = SEGMENTER_THETA) -> "SegmenterKind":
        return cls(kind="threshold", level=theta)

    @classmethod
    def with_noise(cls, p: float, inner: Optional["SegmenterKind"] = None) -> "SegmenterKind":
        return cls(kind="noisy", level=p, inner=inner or cls.threshold_at())

    @property
    def noise_fraction(self) -> float:
        """Total noise fraction along the wrapper chain."""
        if self.kind == "threshold":
            return 0.0
        return self.level + self.inner.noise_fraction


SegmenterKind.model_rebuild()


def _disc_offsets(radius: int) -> np.ndarray:
    yy, xx = np.mgrid[-radius:radius + 1, -radius:radius + 1]
    inside = xx ** 2 + yy ** 2 <= radius * radius
    order = np.argsort((xx ** 2 + yy ** 2)[inside], kind="stable")
    return np.stack([yy[inside][order], xx[inside][order]], axis=1)


_DISCS = {r: _disc_offsets(r) for r in NOISE_RADII}


def _flip_disc(grid: np.ndarray, centre: Tuple[int, int], radius: int, make: bool, budget: int) -> int:
    """Set up to ``budget`` pixels of a disc to ``make``, nearest the centre first."""
    h, w = grid.shape
    pts = _DISCS[radius] + np.asarray(centre)
    keep = (pts[:, 0] >= 0) & (pts[:, 0] < h) & (pts[:, 1] >= 0) & (pts[:, 1] < w)
    pts = pts[keep]
    pts = pts[grid[pts[:, 0], pts[:, 1]] != make][:budget]
    grid[pts[:, 0], pts[:, 1]] = make
    return len(pts)


def perturb_boundary(mask: BinaryMask, p: float, rng: np.random.Generator) -> BinaryMask:
    """Flip boundary discs totalling ``round(p·|mask|)`` pixels, half in and half out."""
    if p < 0:
        raise InvalidParameterError(f"noise fraction must be >= 0, got {p}")
    grid = np.array(mask.data, copy=True)
    half = int(round(p * mask.area / 2.0))
    budgets = {True: half, False: half}
    stalls = 0
    while (budgets[True] > 0 or budgets[False] > 0) and stalls < 8:
        make = bool(rng.random() < 0.5)
        if budgets[make] == 0:
            make = not make
        if make:
            band = ndimage.binary_dilation(grid, structure=CROSS) & ~grid
        else:
            band = grid & ~ndimage.binary_erosion(grid, structure=CROSS)
        ys, xs = np.nonzero(band)
        if len(xs) == 0:
            budgets[make] = 0
            continue
        idx = int(rng.integers(len(xs)))
        radius = int(rng.choice(NOISE_RADII))
        flipped = _flip_disc(grid, (ys[idx], xs[idx]), radius, make, budgets[make])
        budgets[make] -= flipped
        stalls = stalls + 1 if flipped == 0 else 0
    if stalls >= 8:
        logger.debug("perturb_boundary stalled with budgets %s", budgets)
    return BinaryMask(grid)


def _threshold_segment(image: GrayImage, prompt: BinaryMask, theta: float) -> Tuple[BinaryMask, ProbMask]:
    logits = ProbMask(np.clip(image.data, 0.0, 1.0))
    mask = largest_component_containing(threshold(logits, theta), prompt)
    return mask, logits


def segment(
    image: GrayImage,
    prompt_region: BinaryMask,
    seg: SegmenterKind,
    rng: np.random.Generator,
) -> Tuple[BinaryMask, ProbMask]:
    """Run the segmenter on one generated image.

    Args:
        image: Generated sample
        prompt_region: Visible partial mask used as the prompt
        seg: Segmenter selection
        rng: Random stream (used by the noisy kind only)

    Returns:
        (mask, logits) where logits are probabilities in [0, 1]

    Raises:
        DimensionMismatchError: If image and prompt differ in size
        EmptyMaskError: If the prompt is empty
    """
    if image.shape != prompt_region.shape:
        raise DimensionMismatchError(
            f"image {image.shape} and prompt {prompt_region.shape} differ in size"
        )
    if prompt_region.is_empty():
        raise EmptyMaskError("segment needs a non-empty prompt region")

    if seg.kind == "threshold":
        return _threshold_segment(image, prompt_region, seg.level)

    mask, logits = segment(image, prompt_region, seg.inner, rng)
    if seg.level == 0.0:
        return mask, logits
    noisy = perturb_boundary(mask, seg.level, rng)
    blended = NOISY_MASK_WEIGHT * noisy.data.astype(np.float64) + (1.0 - NOISY_MASK_WEIGHT) * logits.data
    return noisy, ProbMask(np.clip(blended, 0.0, 1.0))
