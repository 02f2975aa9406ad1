"""Procedural ellipse-union shapes, rasterisation and image realisation."""

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ..errors import DimensionMismatchError, InvalidParameterError, RetryBudgetExceeded
from ..masks import BinaryMask, is_connected

logger = logging.getLogger(__name__)

DEFAULT_SCALE_RANGE = (0.12, 0.25)
DEFAULT_K_RANGE = (1, 3)


@dataclass(frozen=True)
class Ellipse:
    """One rotated ellipse; centre and semi-axes in pixel units."""

    cx: float
    cy: float
    a: float
    b: float
    rotation: float = 0.0

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise InvalidParameterError(f"semi-axes must be positive, got a={self.a}, b={self.b}")

    def to_dict(self) -> dict:
        return {"cx": self.cx, "cy": self.cy, "a": self.a, "b": self.b, "rotation": self.rotation}


@dataclass(frozen=True)
class Shape:
    """Union of K ≥ 1 ellipses."""

    ellipses: Tuple[Ellipse, ...]

    def __post_init__(self):
        if len(self.ellipses) < 1:
            raise InvalidParameterError("a Shape needs at least one ellipse")
        object.__setattr__(self, "ellipses", tuple(self.ellipses))

    def to_dict(self) -> dict:
        return {"ellipses": [e.to_dict() for e in self.ellipses]}

    @classmethod
    def from_dict(cls, payload: dict) -> "Shape":
        return cls(tuple(Ellipse(**e) for e in payload["ellipses"]))


@dataclass(frozen=True, eq=False)
class GrayImage:
    """W×H greyscale image with values in [0,1]."""

    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float64, copy=True)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise InvalidParameterError(f"GrayImage needs a non-empty 2-D array, got {data.shape}")
        if not np.isfinite(data).all() or data.min() < 0.0 or data.max() > 1.0:
            raise InvalidParameterError("GrayImage values must lie in [0, 1]")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def shape(self) -> tuple:
        return self.data.shape

    def __eq__(self, other) -> bool:
        if not isinstance(other, GrayImage):
            return NotImplemented
        return bool(np.array_equal(self.data, other.data))

    def __hash__(self) -> int:
        return hash((self.shape, self.data.tobytes()))


def render(shape: Shape, width: int, height: int) -> BinaryMask:
    """Foreground where a pixel centre lies inside any ellipse (no anti-aliasing)."""
    if width < 1 or height < 1:
        raise InvalidParameterError(f"render needs positive dimensions, got {width}x{height}")
    px = np.arange(width, dtype=np.float64) + 0.5
    py = np.arange(height, dtype=np.float64) + 0.5
    gx, gy = np.meshgrid(px, py)
    inside = np.zeros((height, width), dtype=bool)
    for e in shape.ellipses:
        theta = float(np.mod(e.rotation, math.pi))
        c, s = math.cos(theta), math.sin(theta)
        dx = gx - e.cx
        dy = gy - e.cy
        u = dx * c + dy * s
        v = -dx * s + dy * c
        inside |= (u / e.a) ** 2 + (v / e.b) ** 2 <= 1.0
    return BinaryMask(inside)


def realize_image(mask: BinaryMask, appearance: float) -> GrayImage:
    """Appearance on the foreground, black background."""
    if not 0.0 < appearance <= 1.0:
        raise InvalidParameterError(f"appearance must lie in (0, 1], got {appearance}")
    return GrayImage(np.where(mask.data, appearance, 0.0))


def visible_image(image: GrayImage, mask: BinaryMask) -> GrayImage:
    """Zero the image outside ``mask``."""
    if image.shape != mask.shape:
        raise DimensionMismatchError(f"image {image.shape} and mask {mask.shape} differ in size")
    return GrayImage(np.where(mask.data, image.data, 0.0))


def _sample_ellipse(rng: np.random.Generator, cx: float, cy: float, scale_px: Tuple[float, float]) -> Ellipse:
    a = rng.uniform(*scale_px)
    b = rng.uniform(*scale_px)
    return Ellipse(float(cx), float(cy), float(a), float(b), float(rng.uniform(0.0, math.pi)))


def sample_shape(
    rng: np.random.Generator,
    k_range: Sequence[int] = DEFAULT_K_RANGE,
    scale_range: Sequence[float] = DEFAULT_SCALE_RANGE,
    width: int = 64,
    height: int = 64,
    max_retries: int = 100,
) -> Shape:
    """Sample a 4-connected union of K ellipses.

    Args:
        rng: Random stream
        k_range: Inclusive [kmin, kmax] for the component count
        scale_range: Semi-axis range as a fraction of the shorter image side
        width: Canvas width used for the connectivity check
        height: Canvas height used for the connectivity check
        max_retries: Rejection budget

    Returns:
        Shape whose rendering at width×height is non-empty and connected

    Raises:
        InvalidParameterError: If the ranges are malformed
        RetryBudgetExceeded: If no connected shape was found
    """
    kmin, kmax = int(k_range[0]), int(k_range[1])
    if not 1 <= kmin <= kmax:
        raise InvalidParameterError(f"k_range must satisfy 1 <= kmin <= kmax, got {k_range}")
    lo, hi = float(scale_range[0]), float(scale_range[1])
    if not 0.0 < lo <= hi:
        raise InvalidParameterError(f"scale_range must satisfy 0 < lo <= hi, got {scale_range}")

    side = min(width, height)
    scale_px = (lo * side, hi * side)
    margin_x = min(hi * side, width / 3.0)
    margin_y = min(hi * side, height / 3.0)

    for attempt in range(max_retries):
        k = int(rng.integers(kmin, kmax + 1))
        cx = rng.uniform(margin_x, width - margin_x)
        cy = rng.uniform(margin_y, height - margin_y)
        ellipses = [_sample_ellipse(rng, cx, cy, scale_px)]
        for _ in range(k - 1):
            # anchor each extra lobe on a pixel of the union so far
            so_far = render(Shape(tuple(ellipses)), width, height)
            ys, xs = np.nonzero(so_far.data)
            if len(xs) == 0:
                break
            idx = int(rng.integers(len(xs)))
            ellipses.append(_sample_ellipse(rng, xs[idx] + 0.5, ys[idx] + 0.5, scale_px))
        shape = Shape(tuple(ellipses))
        mask = render(shape, width, height)
        if not mask.is_empty() and len(ellipses) == k and is_connected(mask):
            return shape
        logger.debug("sample_shape attempt %d rejected", attempt + 1)

    raise RetryBudgetExceeded(f"no connected shape after {max_retries} attempts")
