"""DDPM noise schedules, the closed-form forward process and time embeddings."""

from dataclasses import dataclass
from typing import Literal, Union

import numpy as np

from ..errors import DimensionMismatchError, InvalidParameterError

ScheduleKind = Literal["linear", "cosine"]

LINEAR_BETA_START = 1e-4
LINEAR_BETA_END = 0.02
# the linear range above is tuned for 1000 steps; shorter schedules rescale it
LINEAR_REFERENCE_STEPS = 1000
COSINE_OFFSET = 0.008
MAX_BETA = 0.999


@dataclass(frozen=True, eq=False)
class NoiseSchedule:
    """``alpha_bar[τ]`` for τ = 0..steps_Tg, with alpha_bar[0] = 1."""

    steps_Tg: int
    alpha_bar: np.ndarray

    def __post_init__(self):
        ab = np.array(self.alpha_bar, dtype=np.float64, copy=True)
        if self.steps_Tg < 1:
            raise InvalidParameterError(f"steps_Tg must be >= 1, got {self.steps_Tg}")
        if ab.shape != (self.steps_Tg + 1,):
            raise DimensionMismatchError(f"alpha_bar needs {self.steps_Tg + 1} entries, got {ab.shape}")
        if ab[0] != 1.0:
            raise InvalidParameterError("alpha_bar[0] must be 1")
        if not (np.all(np.diff(ab) < 0) and ab[-1] > 0):
            raise InvalidParameterError("alpha_bar must be strictly decreasing and positive")
        ab.flags.writeable = False
        object.__setattr__(self, "alpha_bar", ab)

    @property
    def betas(self) -> np.ndarray:
        """β_τ for τ = 1..steps_Tg, index 0 is 0."""
        out = np.zeros_like(self.alpha_bar)
        out[1:] = 1.0 - self.alpha_bar[1:] / self.alpha_bar[:-1]
        return out


def make_schedule(steps_Tg: int, kind: ScheduleKind = "linear") -> NoiseSchedule:
    """Build a linear or cosine schedule with ``steps_Tg`` noising steps."""
    if steps_Tg < 1:
        raise InvalidParameterError(f"steps_Tg must be >= 1, got {steps_Tg}")
    if kind == "linear":
        scale = LINEAR_REFERENCE_STEPS / steps_Tg
        betas = np.linspace(LINEAR_BETA_START, LINEAR_BETA_END, steps_Tg) * scale
    elif kind == "cosine":
        t = np.arange(steps_Tg + 1, dtype=np.float64) / steps_Tg
        f = np.cos((t + COSINE_OFFSET) / (1.0 + COSINE_OFFSET) * np.pi / 2.0) ** 2
        betas = 1.0 - f[1:] / f[:-1]
    else:
        raise InvalidParameterError(f"unknown schedule kind: {kind!r}")
    betas = np.clip(betas, 1e-8, MAX_BETA)
    alpha_bar = np.concatenate(([1.0], np.cumprod(1.0 - betas)))
    return NoiseSchedule(steps_Tg, alpha_bar)


def _check_tau(tau, sched: NoiseSchedule) -> np.ndarray:
    tau = np.asarray(tau)
    if not np.issubdtype(tau.dtype, np.integer):
        raise InvalidParameterError(f"tau must be integer, got dtype {tau.dtype}")
    if np.any(tau < 0) or np.any(tau > sched.steps_Tg):
        raise InvalidParameterError(f"tau must lie in [0, {sched.steps_Tg}]")
    return tau


def forward_noise(x0: np.ndarray, tau: Union[int, np.ndarray], eps: np.ndarray, sched: NoiseSchedule) -> np.ndarray:
    """x_τ = √ᾱ_τ·x0 + √(1−ᾱ_τ)·ε.

    ``tau`` may be a scalar or one step per row of a (B, P) batch.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    eps = np.asarray(eps, dtype=np.float64)
    if x0.shape != eps.shape:
        raise DimensionMismatchError(f"x0 {x0.shape} and eps {eps.shape} differ in shape")
    tau = _check_tau(tau, sched)
    ab = sched.alpha_bar[tau]
    if ab.ndim == 1:
        if x0.ndim != 2 or ab.shape[0] != x0.shape[0]:
            raise DimensionMismatchError(f"{ab.shape[0]} steps do not match batch of shape {x0.shape}")
        ab = ab[:, None]
    return np.sqrt(ab) * x0 + np.sqrt(1.0 - ab) * eps


def time_embedding(tau: Union[int, np.ndarray], embed_dim: int) -> np.ndarray:
    """Sinusoidal embedding with interleaved (sin, cos) pairs at geometric frequencies.

    Returns shape (embed_dim,) for a scalar ``tau`` and (B, embed_dim) for a vector.
    """
    if embed_dim < 2 or embed_dim % 2:
        raise InvalidParameterError(f"embed_dim must be a positive even number, got {embed_dim}")
    half = embed_dim // 2
    freqs = 1.0 / (10000.0 ** (np.arange(half, dtype=np.float64) / half))
    tau = np.asarray(tau, dtype=np.float64)
    angles = tau[..., None] * freqs
    out = np.empty(angles.shape[:-1] + (embed_dim,))
    out[..., 0::2] = np.sin(angles)
    out[..., 1::2] = np.cos(angles)
    return out


def mask_to_signal(mask: np.ndarray) -> np.ndarray:
    """Map {0, 1} mask values to the symmetric signal range [-1, 1]."""
    return 2.0 * np.asarray(mask, dtype=np.float64) - 1.0


def signal_to_mask(x: np.ndarray) -> np.ndarray:
    """Inverse of mask_to_signal, clamped to [0, 1]."""
    return np.clip((np.asarray(x, dtype=np.float64) + 1.0) / 2.0, 0.0, 1.0)
