"""ε-prediction loss and the pre-diffusion mask loss (soft Dice + λ·BCE), with gradients."""

from typing import Tuple

import numpy as np
from scipy.special import expit

from ..errors import DimensionMismatchError, InvalidParameterError

DICE_SMOOTH = 1.0


def _pair(a, b, what: str) -> Tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"{what}: shapes {a.shape} and {b.shape} differ")
    if a.ndim == 1:
        a, b = a[None, :], b[None, :]
    return a, b


def loss_eps(eps_hat, eps) -> float:
    """Squared L2 norm of ε̂ − ε per sample, averaged over the batch."""
    eps_hat, eps = _pair(eps_hat, eps, "loss_eps")
    return float(np.mean(np.sum((eps_hat - eps) ** 2, axis=1)))


def loss_eps_grad(eps_hat, eps) -> np.ndarray:
    single = np.ndim(eps_hat) == 1
    eps_hat, eps = _pair(eps_hat, eps, "loss_eps")
    grad = 2.0 * (eps_hat - eps) / eps_hat.shape[0]
    return grad[0] if single else grad


def _dice_terms(p: np.ndarray, m: np.ndarray):
    inter = np.sum(p * m, axis=1)
    total = np.sum(p, axis=1) + np.sum(m, axis=1)
    return inter, total


def loss_mask_parts(logits, target) -> Tuple[float, float]:
    """(soft Dice loss, mean BCE) for M_pre logits against a binary target."""
    z, m = _pair(logits, target, "loss_mask")
    p = expit(z)
    inter, total = _dice_terms(p, m)
    dice_loss = np.mean(1.0 - (2.0 * inter + DICE_SMOOTH) / (total + DICE_SMOOTH))
    bce = np.mean(np.logaddexp(0.0, z) - m * z)
    return float(dice_loss), float(bce)


def loss_mask(logits, target, lambda_ce: float) -> float:
    """L_mask = L_dice + λ_ce·L_ce with p = sigmoid(logits) and smoothing s = 1."""
    if lambda_ce < 0:
        raise InvalidParameterError(f"lambda_ce must be >= 0, got {lambda_ce}")
    dice_loss, bce = loss_mask_parts(logits, target)
    return dice_loss + lambda_ce * bce


def loss_mask_grad(logits, target, lambda_ce: float) -> np.ndarray:
    """∂L_mask/∂logits, same shape as the (batched) logits."""
    z, m = _pair(logits, target, "loss_mask")
    batch, pixels = z.shape
    p = expit(z)
    inter, total = _dice_terms(p, m)
    num = (2.0 * inter + DICE_SMOOTH)[:, None]
    den = (total + DICE_SMOOTH)[:, None]
    # d(dice coefficient)/dp_i; the loss is 1 minus it
    d_coef = (2.0 * m * den - num) / den ** 2
    d_p = -d_coef / batch
    d_logit = d_p * p * (1.0 - p)
    d_logit += lambda_ce * (p - m) / (batch * pixels)
    return d_logit[0] if np.ndim(logits) == 1 else d_logit
