"""Oracle generator G: samples complete-object images given a condition mask.

The oracle knows the true shape. It stands in for a trained mask-conditioned
generator whose output quality tracks the quality of its condition:

* the sampled object moves toward the truth by a fidelity fraction β at the
  contested boundary, less so deep inside unexplained regions;
* boundary jitter and spurious blobs grow with the condition's incompleteness q;
* the visible partial object is always reproduced.

With ``condition == truth`` and zero noise knobs the oracle is the identity on
the mask, which gives the completion loop an exact fixed point.
"""

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import ndimage
from scipy.special import ndtr

from ..config import ORACLE_ARTIFACT_GAIN, ORACLE_BOUNDARY_SIGMA, ORACLE_FIDELITY_BETA
from ..errors import DimensionMismatchError, EmptyMaskError, InvalidParameterError
from ..masks import BinaryMask
from ..masks.ops import CROSS
from .scene import PartialObservation, SceneTruth
from .shapes import GrayImage, render

logger = logging.getLogger(__name__)

JITTER_RATE = 0.05
MAX_FLIP_PROB = 0.5
ARTIFACT_RING_PX = 4
ARTIFACT_RADII = (1, 2, 3)
PIXEL_NOISE = 0.05
_BELOW_ONE = np.nextafter(1.0, 0.0)


class OracleParams(BaseModel):
    """Knobs of the oracle's condition-quality law."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    fidelity_beta: float = Field(ORACLE_FIDELITY_BETA, gt=0.0, le=1.0, description="Pull toward truth per step")
    boundary_sigma: float = Field(ORACLE_BOUNDARY_SIGMA, ge=0.0, description="Base boundary jitter, pixels")
    artifact_gain: float = Field(ORACLE_ARTIFACT_GAIN, ge=0.0, description="Spurious area per unit incompleteness")
    reach: float = Field(6.0, gt=0.0, description="Depth into the missing region with full pull; decay scale beyond it, pixels")
    field_sigma: float = Field(2.0, ge=0.0, description="Spatial correlation of the blend field; 0 = independent")

    @classmethod
    def noiseless(cls, **overrides) -> "OracleParams":
        values = {"boundary_sigma": 0.0, "artifact_gain": 0.0}
        values.update(overrides)
        return cls(**values)


def _disc_areas():
    areas = []
    for r in ARTIFACT_RADII:
        yy, xx = np.mgrid[-r:r + 1, -r:r + 1]
        areas.append(int((xx ** 2 + yy ** 2 <= r * r).sum()))
    return areas


_MEAN_DISC_AREA = float(np.mean(_disc_areas()))


def blend_field(shape, field_sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform(0,1) marginals, spatially correlated over ``field_sigma`` pixels."""
    if field_sigma <= 0:
        return rng.random(shape)
    z = ndimage.gaussian_filter(rng.standard_normal(shape), sigma=field_sigma, mode="reflect")
    std = z.std()
    if std > 0:
        z = (z - z.mean()) / std
    return np.clip(ndtr(z), 0.0, _BELOW_ONE)


def incompleteness(condition: BinaryMask, truth: BinaryMask) -> float:
    """q = 1 − |condition ∩ truth| / |truth|."""
    if truth.is_empty():
        raise EmptyMaskError("truth mask is empty")
    return 1.0 - int(np.count_nonzero(condition.data & truth.data)) / truth.area


def _blend(cond: np.ndarray, true: np.ndarray, params: OracleParams, rng: np.random.Generator) -> np.ndarray:
    beta = params.fidelity_beta
    field = blend_field(cond.shape, params.field_sigma, rng)
    missing = true & ~cond
    extra = cond & ~true
    depth = ndimage.distance_transform_edt(~cond)
    excess = np.maximum(depth - params.reach, 0.0)
    p_add = beta ** (1.0 + excess / params.reach)
    return (cond & true) | (missing & (field < p_add)) | (extra & (field < 1.0 - beta))


def _jitter(target: np.ndarray, q: float, params: OracleParams, rng: np.random.Generator) -> np.ndarray:
    draws = rng.random(target.shape)
    if params.boundary_sigma <= 0:
        return target
    flip_p = min(MAX_FLIP_PROB, JITTER_RATE * params.boundary_sigma * (1.0 + q))
    inner = target & ~ndimage.binary_erosion(target, structure=CROSS)
    outer = ndimage.binary_dilation(target, structure=CROSS) & ~target
    return target ^ ((inner | outer) & (draws < flip_p))


def _artifacts(cond: np.ndarray, true: np.ndarray, q: float, params: OracleParams, rng: np.random.Generator) -> np.ndarray:
    blobs = np.zeros_like(cond)
    expected_area = params.artifact_gain * q * int(true.sum())
    if expected_area <= 0:
        return blobs
    count = int(rng.poisson(expected_area / _MEAN_DISC_AREA))
    ring = ndimage.binary_dilation(cond, structure=CROSS, iterations=ARTIFACT_RING_PX) & ~cond & ~true
    ys, xs = np.nonzero(ring)
    if count == 0 or len(xs) == 0:
        return blobs
    h, w = cond.shape
    gy, gx = np.mgrid[0:h, 0:w]
    for _ in range(count):
        idx = int(rng.integers(len(xs)))
        r = int(rng.choice(ARTIFACT_RADII))
        blobs |= (gx - xs[idx]) ** 2 + (gy - ys[idx]) ** 2 <= r * r
    return blobs & ~true


def sample_object_mask(
    truth_mask: BinaryMask,
    partial_mask: BinaryMask,
    condition: BinaryMask,
    params: OracleParams,
    rng: np.random.Generator,
) -> BinaryMask:
    """The object mask M_s the oracle paints, before pixel noise."""
    cond = (condition | partial_mask).data
    true = truth_mask.data
    q = incompleteness(BinaryMask(cond), truth_mask)
    target = _blend(cond, true, params, rng)
    target = _jitter(target, q, params, rng)
    target = target | partial_mask.data
    target = target | _artifacts(cond, true, q, params, rng)
    return BinaryMask(target)


def oracle_generate(
    truth: SceneTruth,
    partial: PartialObservation,
    condition: BinaryMask,
    params: OracleParams,
    rng: np.random.Generator,
) -> GrayImage:
    """Sample one complete-object image conditioned on ``condition``.

    Args:
        truth: Hidden shape and appearance
        partial: Visible image and mask
        condition: Condition mask fed to the generator
        params: Oracle law knobs
        rng: Random stream owned by this call

    Returns:
        Appearance on the sampled object mask plus small foreground noise

    Raises:
        DimensionMismatchError: If the condition and partial mask differ in size
        EmptyMaskError: If the partial mask is empty
        InvalidParameterError: If visible pixels fall outside the truth
    """
    partial_mask = partial.mask
    if condition.shape != partial_mask.shape:
        raise DimensionMismatchError(
            f"condition {condition.shape} and partial mask {partial_mask.shape} differ in size"
        )
    if partial_mask.is_empty():
        raise EmptyMaskError("oracle_generate needs a non-empty partial mask")
    truth_mask = render(truth.shape, partial_mask.width, partial_mask.height)
    if not partial_mask.issubset(truth_mask):
        raise InvalidParameterError("visible pixels fall outside the true object")

    sampled = sample_object_mask(truth_mask, partial_mask, condition, params, rng)
    amplitude = min(PIXEL_NOISE, truth.appearance / 4.0)
    noise = rng.uniform(-amplitude, amplitude, size=sampled.shape)
    pixels = np.where(sampled.data, np.clip(truth.appearance + noise, 0.0, 1.0), 0.0)
    return GrayImage(pixels)


class OracleGenerator:
    """Generator bound to one scene's hidden truth."""

    def __init__(self, truth: SceneTruth, params: OracleParams):
        self._truth = truth
        self.params = params

    def generate(self, partial: PartialObservation, condition: BinaryMask, rng: np.random.Generator) -> GrayImage:
        return oracle_generate(self._truth, partial, condition, self.params, rng)
