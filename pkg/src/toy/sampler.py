"""Ancestral DDPM sampling for the toy denoiser."""

from typing import Callable, List, Optional

import numpy as np

from ..errors import InvalidParameterError
from .model import ToyDenoiser, denoiser_forward
from .schedule import NoiseSchedule, signal_to_mask

Predictor = Callable[[np.ndarray, int], np.ndarray]


def sampling_taus(steps_Tg: int, sample_steps: Optional[int] = None) -> List[int]:
    """Descending timesteps visited by the sampler, always starting at steps_Tg.

    ``sample_steps`` = S picks S evenly strided steps; None visits all of them.
    """
    if sample_steps is None or sample_steps >= steps_Tg:
        return list(range(steps_Tg, 0, -1))
    if sample_steps < 1:
        raise InvalidParameterError(f"sample_steps must be >= 1, got {sample_steps}")
    taus = np.unique(np.rint(np.linspace(1, steps_Tg, sample_steps)).astype(int))
    return [int(t) for t in taus[::-1]]


def posterior_step(
    x: np.ndarray, eps_hat: np.ndarray, tau: int, tau_prev: int, sched: NoiseSchedule, clip: bool = True
):
    """Mean and variance of q(x_prev | x_τ, x̂0) for a jump from τ to τ_prev < τ.

    With ``clip`` the estimate x̂0 is clamped to the signal range [-1, 1].
    """
    ab_t = sched.alpha_bar[tau]
    ab_p = sched.alpha_bar[tau_prev]
    beta = 1.0 - ab_t / ab_p
    x0_hat = (x - np.sqrt(1.0 - ab_t) * eps_hat) / np.sqrt(ab_t)
    if clip:
        x0_hat = np.clip(x0_hat, -1.0, 1.0)
    mean = (np.sqrt(ab_p) * beta / (1.0 - ab_t)) * x0_hat + (
        np.sqrt(ab_t / ab_p) * (1.0 - ab_p) / (1.0 - ab_t)
    ) * x
    variance = beta * (1.0 - ab_p) / (1.0 - ab_t)
    return mean, variance


def ddpm_sample(
    model: Optional[ToyDenoiser],
    cond_input: np.ndarray,
    sched: NoiseSchedule,
    rng: np.random.Generator,
    sample_steps: Optional[int] = None,
    predictor: Optional[Predictor] = None,
    noiseless: bool = False,
    start: Optional[np.ndarray] = None,
    clip_x0: bool = True,
) -> np.ndarray:
    """Draw one mask vector in [0, 1].

    The chain runs in the signal range [-1, 1] and is mapped back to mask
    values at the end.

    Args:
        model: Trained or arbitrary denoiser; unused when ``predictor`` is given
        cond_input: Encoder input u = [partial image, condition mask]
        sched: Noise schedule
        rng: Random stream for x_Tg and the per-step noise
        sample_steps: Number of strided reverse steps; None runs all steps_Tg
        predictor: Optional ε-predictor (x_τ, τ) -> ε̂ replacing the model
        noiseless: Drop the posterior noise (deterministic mean path)
        start: Optional x_Tg; defaults to a standard normal draw
        clip_x0: Clamp each x̂0 estimate to [-1, 1]

    Returns:
        Sample mapped to mask values and clamped to [0, 1]
    """
    if predictor is None and model is None:
        raise InvalidParameterError("ddpm_sample needs a model or a predictor")
    if predictor is None:
        def predictor(x, tau):
            return denoiser_forward(model, x, cond_input, tau)[0]
        pixels = model.config.pixels
    else:
        pixels = np.asarray(cond_input).size // 2

    x = rng.standard_normal(pixels) if start is None else np.array(start, dtype=np.float64)
    taus = sampling_taus(sched.steps_Tg, sample_steps)
    for i, tau in enumerate(taus):
        tau_prev = taus[i + 1] if i + 1 < len(taus) else 0
        mean, variance = posterior_step(x, predictor(x, tau), tau, tau_prev, sched, clip=clip_x0)
        if noiseless or tau_prev == 0:
            x = mean
        else:
            x = mean + np.sqrt(variance) * rng.standard_normal(pixels)
    return signal_to_mask(x)
