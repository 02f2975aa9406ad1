"""Toy conditional ε-predictor with a time-variant condition gate and a mask head.

Shapes, with P = side², D = hidden, E = embed_dim, H = trunk_hidden:

    u      = [partial image, condition mask]          (B, 2P)
    c      = tanh(u·We + be)                          (B, D)   partial token
    e      = time_embedding(τ)                        (B, E)
    g      = tanh(e·wf + bf)                          (B,)     gate, 1 when disabled
    z0     = [x_τ, g·c, e]                            (B, P+D+E)
    h1     = tanh(z0·W1 + b1),  h2 = tanh(h1·W2 + b2) (B, H)
    s      = e·ws + bs                                (B,)     skip gain
    ε̂      = h2·W3 + b3 + s·x_τ                       (B, P)
    M_pre  = c·Wm + bm                                (B, P)   logits, ungated
"""

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import DimensionMismatchError
from .schedule import time_embedding

PARAM_NAMES = ("We", "be", "wf", "bf", "W1", "b1", "W2", "b2", "W3", "b3", "ws", "bs", "Wm", "bm")


class ToyModelConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    side: int = Field(16, ge=2, description="Mask side length; P = side²")
    hidden: int = Field(64, ge=1, description="Partial-token size D")
    embed_dim: int = Field(32, ge=2, multiple_of=2, description="Time-embedding size")
    trunk_hidden: int = Field(256, ge=1, description="Width of both trunk layers")
    use_gate: bool = Field(True, description="Apply the learned gate f(e)·c; False fixes it to 1")

    @property
    def pixels(self) -> int:
        return self.side * self.side

    def param_shapes(self) -> Dict[str, tuple]:
        P, D, E, H = self.pixels, self.hidden, self.embed_dim, self.trunk_hidden
        return {
            "We": (2 * P, D),
            "be": (D,),
            "wf": (E,),
            "bf": (1,),
            "W1": (P + D + E, H),
            "b1": (H,),
            "W2": (H, H),
            "b2": (H,),
            "W3": (H, P),
            "b3": (P,),
            "ws": (E,),
            "bs": (1,),
            "Wm": (D, P),
            "bm": (P,),
        }


@dataclass
class ToyDenoiser:
    """Parameter set of the toy denoiser; arrays are float64."""

    config: ToyModelConfig
    params: Dict[str, np.ndarray]

    def __post_init__(self):
        shapes = self.config.param_shapes()
        for name in PARAM_NAMES:
            if name not in self.params:
                raise DimensionMismatchError(f"missing parameter {name}")
            arr = np.asarray(self.params[name], dtype=np.float64)
            if arr.shape != shapes[name]:
                raise DimensionMismatchError(f"parameter {name} has shape {arr.shape}, expected {shapes[name]}")
            self.params[name] = arr

    @classmethod
    def init(cls, config: ToyModelConfig, rng: np.random.Generator) -> "ToyDenoiser":
        """Weights ~ N(0, 1/fan_in), biases zero."""
        params = {}
        for name, shape in config.param_shapes().items():
            if len(shape) == 2 or name in ("wf", "ws"):
                params[name] = rng.standard_normal(shape) / np.sqrt(shape[0])
            else:
                params[name] = np.zeros(shape)
        return cls(config, params)

    @classmethod
    def zeros(cls, config: ToyModelConfig) -> "ToyDenoiser":
        return cls(config, {name: np.zeros(shape) for name, shape in config.param_shapes().items()})

    def copy(self) -> "ToyDenoiser":
        return ToyDenoiser(self.config, {k: v.copy() for k, v in self.params.items()})

    @property
    def num_parameters(self) -> int:
        return int(sum(v.size for v in self.params.values()))


@dataclass
class ForwardCache:
    u: np.ndarray
    c: np.ndarray
    e: np.ndarray
    g: np.ndarray
    z0: np.ndarray
    h1: np.ndarray
    h2: np.ndarray


def _as_batch(x: np.ndarray) -> Tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        return x[None, :], True
    return x, False


def forward_with_cache(
    model: ToyDenoiser, x_tau: np.ndarray, cond_input: np.ndarray, tau
) -> Tuple[np.ndarray, np.ndarray, ForwardCache]:
    """Batched forward pass that also returns the activations backprop needs."""
    cfg = model.config
    p = model.params
    x, _ = _as_batch(x_tau)
    u, _ = _as_batch(cond_input)
    if x.shape[1] != cfg.pixels or u.shape[1] != 2 * cfg.pixels or x.shape[0] != u.shape[0]:
        raise DimensionMismatchError(
            f"x_tau {x.shape} and condition input {u.shape} do not fit P={cfg.pixels}"
        )
    taus = np.broadcast_to(np.asarray(tau), (x.shape[0],))
    e = time_embedding(taus, cfg.embed_dim)

    c = np.tanh(u @ p["We"] + p["be"])
    if cfg.use_gate:
        g = np.tanh(e @ p["wf"] + p["bf"][0])
    else:
        g = np.ones(x.shape[0])
    z0 = np.concatenate([x, g[:, None] * c, e], axis=1)
    h1 = np.tanh(z0 @ p["W1"] + p["b1"])
    h2 = np.tanh(h1 @ p["W2"] + p["b2"])
    skip = e @ p["ws"] + p["bs"][0]
    eps_hat = h2 @ p["W3"] + p["b3"] + skip[:, None] * x
    logits = c @ p["Wm"] + p["bm"]
    return eps_hat, logits, ForwardCache(u, c, e, g, z0, h1, h2)


def denoiser_forward(
    model: ToyDenoiser, x_tau: np.ndarray, cond_input: np.ndarray, tau
) -> Tuple[np.ndarray, np.ndarray]:
    """(ε̂, M_pre logits) for one vector or a (B, ·) batch."""
    eps_hat, logits, _ = forward_with_cache(model, x_tau, cond_input, tau)
    if np.asarray(x_tau).ndim == 1:
        return eps_hat[0], logits[0]
    return eps_hat, logits


def condition_input(partial_image: np.ndarray, condition_mask: np.ndarray) -> np.ndarray:
    """Flatten (partial image, condition mask) into the encoder input u."""
    return np.concatenate(
        [np.asarray(partial_image, dtype=np.float64).ravel(), np.asarray(condition_mask, dtype=np.float64).ravel()]
    )


def gate_value(model: ToyDenoiser, tau: int) -> Optional[float]:
    if not model.config.use_gate:
        return None
    e = time_embedding(tau, model.config.embed_dim)
    return float(np.tanh(e @ model.params["wf"] + model.params["bf"][0]))
