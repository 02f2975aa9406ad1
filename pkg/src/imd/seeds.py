"""Deterministic seed derivation for every random stream in a run.

``seed_derive(root, t, k)`` packs ``(t, k)`` into one 64-bit word as
``(t << 32) | k``, XORs it into ``root`` and passes the result through the
SplitMix64 finaliser. The finaliser is a bijection on 64-bit words, so derived
seeds never collide for a fixed root while ``t`` and ``k`` stay below 2**32.
Changing it changes every recorded result.
"""

import numpy as np

from ..errors import InvalidParameterError

MASK64 = (1 << 64) - 1

# reserved step indices for streams that are not IMD samples
FINAL_IMAGE_STEP = 0
SCENE_STREAM = 1 << 20
TRAIN_STREAM = (1 << 20) + 1
SCENE_IMD_STREAM = (1 << 20) + 2
INTERMEDIATE_STREAM = (1 << 20) + 3


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def seed_derive(root: int, t: int, k: int) -> int:
    """Seed for sample ``k`` of step ``t`` under ``root``."""
    if t < 0 or k < 0 or t >= 1 << 32 or k >= 1 << 32:
        raise InvalidParameterError(f"t and k must lie in [0, 2**32), got t={t}, k={k}")
    return splitmix64((int(root) & MASK64) ^ ((t << 32) | k))


def derived_rng(root: int, t: int, k: int) -> np.random.Generator:
    return np.random.default_rng(seed_derive(root, t, k))
