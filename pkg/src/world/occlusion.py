"""Occlusion synthesis: turn a complete mask into a partial one.

Every operation returns an ``OcclusionResult`` whose ``occluder`` is the removed
part of the input foreground, so ``occluded_mask | occluder == mask`` and the two
never overlap. All randomness comes from the caller's ``numpy.random.Generator``.
"""

import logging
from dataclasses import dataclass
from typing import Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config import RECT_RATIO_RANGE, SHIFT_RANGE
from ..errors import EmptyMaskError, InvalidParameterError
from ..masks import BBox, BinaryMask, bbox_of

logger = logging.getLogger(__name__)

OcclusionKind = Literal["rectangle", "shift", "oval", "object", "mixed"]

# any centroid inside the bbox reaches every bbox pixel at this scale
_FULL_COVER_SCALE = 2.0
_BISECTION_STEPS = 40


def _check_range(name: str, rng_range: Tuple[float, float], upper: float) -> None:
    lo, hi = rng_range
    if not (0.0 <= lo <= hi <= upper):
        raise InvalidParameterError(f"{name} must satisfy 0 <= lo <= hi <= {upper}, got {rng_range}")


class OcclusionSpec(BaseModel):
    """Which occluder to draw and from which ranges."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: OcclusionKind = Field("mixed", description="Occluder family; mixed draws rectangle or shift 50/50")
    ratio_range: Tuple[float, float] = Field(RECT_RATIO_RANGE, description="Rectangle/oval size as bbox fraction")
    shift_range: Tuple[float, float] = Field(SHIFT_RANGE, description="Self-shift as bbox fraction per axis")

    @model_validator(mode="after")
    def _ranges_valid(self):
        _check_range("ratio_range", self.ratio_range, 1.0)
        _check_range("shift_range", self.shift_range, 1.0)
        return self


@dataclass(frozen=True)
class OcclusionResult:
    occluded_mask: BinaryMask
    occluder: BinaryMask
    achieved_rate: float


def _result(mask: BinaryMask, region: np.ndarray) -> OcclusionResult:
    occluder = region & mask.data
    return OcclusionResult(
        occluded_mask=BinaryMask(mask.data & ~occluder),
        occluder=BinaryMask(occluder),
        achieved_rate=int(occluder.sum()) / mask.area,
    )


def _require_nonempty(mask: BinaryMask) -> BBox:
    if mask.is_empty():
        raise EmptyMaskError("cannot occlude an empty mask")
    return bbox_of(mask)


def _sample_centroid(mask: BinaryMask, rng: np.random.Generator) -> Tuple[float, float]:
    ys, xs = np.nonzero(mask.data)
    idx = int(rng.integers(len(xs)))
    return xs[idx] + 0.5, ys[idx] + 0.5


def _pixel_centres(width: int, height: int):
    return np.meshgrid(np.arange(width) + 0.5, np.arange(height) + 0.5)


def rect_region(width: int, height: int, cx: float, cy: float, rw: float, rh: float) -> BinaryMask:
    """Pixels whose centre lies strictly inside an axis-aligned rectangle, clipped to the canvas."""
    gx, gy = _pixel_centres(width, height)
    return BinaryMask((np.abs(gx - cx) < rw / 2.0) & (np.abs(gy - cy) < rh / 2.0))


def oval_region(width: int, height: int, cx: float, cy: float, rw: float, rh: float) -> BinaryMask:
    """Axis-aligned ellipse inscribed in the rw×rh rectangle."""
    if rw <= 0 or rh <= 0:
        return BinaryMask.zeros(width, height)
    gx, gy = _pixel_centres(width, height)
    return BinaryMask(((gx - cx) / (rw / 2.0)) ** 2 + ((gy - cy) / (rh / 2.0)) ** 2 < 1.0)


def _sized_occlude(mask, ratio_range, rng, region_fn) -> OcclusionResult:
    box = _require_nonempty(mask)
    _check_range("ratio_range", tuple(ratio_range), 1.0)
    cx, cy = _sample_centroid(mask, rng)
    rw = rng.uniform(*ratio_range) * box.width
    rh = rng.uniform(*ratio_range) * box.height
    region = region_fn(mask.width, mask.height, cx, cy, rw, rh)
    return _result(mask, region.data)


def rect_occlude(mask: BinaryMask, ratio_range: Tuple[float, float], rng: np.random.Generator) -> OcclusionResult:
    """Rectangle centred on a random foreground pixel, sides a sampled fraction of the bbox."""
    return _sized_occlude(mask, ratio_range, rng, rect_region)


def oval_occlude(mask: BinaryMask, ratio_range: Tuple[float, float], rng: np.random.Generator) -> OcclusionResult:
    """As rect_occlude with the ellipse inscribed in the sampled rectangle."""
    return _sized_occlude(mask, ratio_range, rng, oval_region)


def translate(mask: BinaryMask, dx: int, dy: int) -> BinaryMask:
    """Shift a mask by whole pixels; pixels moved off the canvas are lost."""
    out = np.zeros_like(mask.data)
    h, w = mask.shape
    if abs(dx) >= w or abs(dy) >= h:
        return BinaryMask(out)
    src_x = slice(max(0, -dx), w - max(0, dx))
    dst_x = slice(max(0, dx), w - max(0, -dx))
    src_y = slice(max(0, -dy), h - max(0, dy))
    dst_y = slice(max(0, dy), h - max(0, -dy))
    out[dst_y, dst_x] = mask.data[src_y, src_x]
    return BinaryMask(out)


def shift_occlude(mask: BinaryMask, shift_range: Tuple[float, float], rng: np.random.Generator) -> OcclusionResult:
    """Occlude the object by a translated copy of itself.

    Per axis the offset magnitude is a uniform fraction of that axis' bbox extent
    with a random sign.
    """
    box = _require_nonempty(mask)
    _check_range("shift_range", tuple(shift_range), 1.0)
    mag_x = rng.uniform(*shift_range) * box.width
    mag_y = rng.uniform(*shift_range) * box.height
    sign_x = 1 if rng.random() < 0.5 else -1
    sign_y = 1 if rng.random() < 0.5 else -1
    moved = translate(mask, sign_x * int(np.rint(mag_x)), sign_y * int(np.rint(mag_y)))
    return _result(mask, moved.data)


def object_occlude(mask: BinaryMask, rng: np.random.Generator) -> OcclusionResult:
    """Self-occlusion with the default shift range."""
    return shift_occlude(mask, SHIFT_RANGE, rng)


def occlude(mask: BinaryMask, spec: OcclusionSpec, rng: np.random.Generator) -> OcclusionResult:
    """Dispatch on ``spec.kind``."""
    kind = spec.kind
    if kind == "mixed":
        kind = "rectangle" if rng.random() < 0.5 else "shift"
    if kind == "rectangle":
        return rect_occlude(mask, spec.ratio_range, rng)
    if kind == "oval":
        return oval_occlude(mask, spec.ratio_range, rng)
    if kind == "shift":
        return shift_occlude(mask, spec.shift_range, rng)
    return object_occlude(mask, rng)


def double_occlude(
    complete: BinaryMask, spec: OcclusionSpec, rng: np.random.Generator
) -> Tuple[BinaryMask, BinaryMask]:
    """Draw two independent occluders.

    Returns:
        (partial, intermediate) with partial = complete ∖ (O1 ∪ O2) and
        intermediate = complete ∖ O1, so partial ⊆ intermediate ⊆ complete
    """
    if complete.is_empty():
        raise EmptyMaskError("double_occlude needs a non-empty complete mask")
    first = occlude(complete, spec, rng).occluder
    second = occlude(complete, spec, rng).occluder
    intermediate = complete - first
    partial = intermediate - second
    return partial, intermediate


def occlude_rect_at(mask: BinaryMask, cx: float, cy: float, scale: float) -> OcclusionResult:
    """Rectangle of ``scale`` × bbox size centred at (cx, cy)."""
    box = _require_nonempty(mask)
    region = rect_region(mask.width, mask.height, cx, cy, scale * box.width, scale * box.height)
    return _result(mask, region.data)


def occlude_to_rate(
    mask: BinaryMask,
    target_rate: float,
    tol: float = 0.02,
    *,
    rng: np.random.Generator,
    max_tries: int = 8,
) -> OcclusionResult:
    """Rectangle occlusion whose achieved rate is within ``tol`` of ``target_rate``.

    Each try samples a point inside a random foreground pixel and bisects the
    rectangle scale; the achieved rate is non-decreasing in the scale. The
    sub-pixel offset makes the four edges cross pixel centres one at a time,
    so the rate grows in steps of at most one row or column. Returns the closest
    result seen when no try lands inside the tolerance.
    """
    _require_nonempty(mask)
    if not 0.0 < target_rate < 1.0:
        raise InvalidParameterError(f"target_rate must lie in (0, 1), got {target_rate}")
    if tol < 0:
        raise InvalidParameterError(f"tol must be >= 0, got {tol}")

    best: Optional[OcclusionResult] = None
    for attempt in range(max(1, max_tries)):
        cx, cy = _sample_centroid(mask, rng)
        cx += rng.uniform(-0.5, 0.5)
        cy += rng.uniform(-0.5, 0.5)
        lo, hi = 0.0, _FULL_COVER_SCALE
        for _ in range(_BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            result = occlude_rect_at(mask, cx, cy, mid)
            if best is None or abs(result.achieved_rate - target_rate) < abs(best.achieved_rate - target_rate):
                best = result
            if abs(result.achieved_rate - target_rate) <= tol:
                return result
            if result.achieved_rate < target_rate:
                lo = mid
            else:
                hi = mid
        logger.debug("occlude_to_rate try %d missed %.3f (best %.3f)", attempt + 1, target_rate, best.achieved_rate)
    return best
