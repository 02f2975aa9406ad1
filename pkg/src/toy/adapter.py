"""Use a trained toy denoiser as the generator of the IMD loop."""

from typing import Optional

import numpy as np

from ..errors import DimensionMismatchError
from ..masks import BinaryMask
from ..world.scene import PartialObservation
from ..world.shapes import GrayImage
from .model import ToyDenoiser, condition_input
from .sampler import ddpm_sample
from .schedule import NoiseSchedule


class ToyGenerator:
    """Generator backed by DDPM sampling from a toy denoiser.

    The sampled mask vector is painted with the visible appearance, so the
    threshold segmenter sees the same intensity scale as with the oracle.
    """

    def __init__(self, model: ToyDenoiser, schedule: NoiseSchedule, sample_steps: Optional[int] = None):
        self.model = model
        self.schedule = schedule
        self.sample_steps = sample_steps

    def generate(self, partial: PartialObservation, condition: BinaryMask, rng: np.random.Generator) -> GrayImage:
        side = self.model.config.side
        if partial.mask.shape != (side, side) or condition.shape != (side, side):
            raise DimensionMismatchError(f"toy generator works on {side}x{side} scenes, got {partial.mask.shape}")
        visible = partial.image.data[partial.mask.data]
        appearance = float(visible.max()) if visible.size else 1.0
        u = condition_input(partial.image.data, condition.data)
        sample = ddpm_sample(self.model, u, self.schedule, rng, sample_steps=self.sample_steps)
        return GrayImage(sample.reshape(side, side) * appearance)
