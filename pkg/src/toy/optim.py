"""Bias-corrected Adam over a dict of named parameter arrays."""

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from ..errors import InvalidParameterError

BETA1 = 0.9
BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass
class AdamState:
    """First and second moment estimates, keyed like the parameters."""

    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(
    params: Dict[str, np.ndarray],
    grads: Dict[str, np.ndarray],
    state: AdamState,
    t: int,
    lr: float,
    beta1: float = BETA1,
    beta2: float = BETA2,
    eps: float = ADAM_EPS,
) -> Dict[str, np.ndarray]:
    """One Adam update; returns new parameter arrays and advances ``state``.

    Args:
        params: Current parameters
        grads: Gradients with the same keys and shapes
        state: Moment estimates, updated in place
        t: 1-based step count used for bias correction
        lr: Learning rate

    Returns:
        Updated parameters (inputs are not modified)
    """
    if t < 1:
        raise InvalidParameterError(f"Adam step count must be >= 1, got {t}")
    updated = {}
    for name, value in params.items():
        g = grads[name]
        m = state.m.get(name, np.zeros_like(value))
        v = state.v.get(name, np.zeros_like(value))
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * g ** 2
        state.m[name], state.v[name] = m, v
        m_hat = m / (1.0 - beta1 ** t)
        v_hat = v / (1.0 - beta2 ** t)
        updated[name] = value - lr * m_hat / (np.sqrt(v_hat) + eps)
    return updated


class Adam:
    """Stateful wrapper that keeps the step counter."""

    def __init__(self, lr: float = 1e-3, beta1: float = BETA1, beta2: float = BETA2, eps: float = ADAM_EPS):
        if lr <= 0:
            raise InvalidParameterError(f"learning rate must be positive, got {lr}")
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.state = AdamState()

    def step(self, params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray]) -> Dict[str, np.ndarray]:
        self.t += 1
        return adam_step(params, grads, self.state, self.t, self.lr, self.beta1, self.beta2, self.eps)
