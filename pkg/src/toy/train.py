"""Training data, hand-derived backprop and the training loop for the toy denoiser."""

import csv
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from tqdm import tqdm

from ..errors import DimensionMismatchError, RetryBudgetExceeded
from ..imd.seeds import TRAIN_STREAM, derived_rng
from ..masks import BinaryMask, iou
from ..world.occlusion import OcclusionSpec, double_occlude
from ..world.shapes import render, sample_shape
from .losses import loss_eps, loss_eps_grad, loss_mask, loss_mask_grad
from .model import ToyDenoiser, ToyModelConfig, forward_with_cache
from .optim import Adam
from .sampler import ddpm_sample
from .schedule import NoiseSchedule, ScheduleKind, forward_noise, make_schedule, mask_to_signal

logger = logging.getLogger(__name__)

LOG_COLUMNS = ["epoch", "loss_eps", "loss_mask", "total"]

ConditionKind = Literal["partial", "intermediate", "complete"]
CONDITION_KINDS = ("partial", "intermediate", "complete")


class TrainConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    lambda_ce: float = Field(1.0, ge=0.0, description="Weight of the BCE term in L_mask")
    lr: float = Field(1e-3, gt=0.0, description="Adam learning rate")
    batch_size: int = Field(8, ge=1, description="Samples per Adam step")
    epochs: int = Field(60, ge=1, description="Training epochs")
    steps_per_epoch: int = Field(100, ge=1, description="Adam steps per epoch")
    schedule_steps: int = Field(100, ge=1, description="Diffusion steps T_G")
    schedule_kind: ScheduleKind = Field("linear", description="Noise schedule family")
    use_mask_loss: bool = Field(True, description="Train the mask head with L_mask")
    target_mode: Literal["complete", "observed"] = Field(
        "complete", description="complete: learn complete masks; observed: learn once-occluded masks"
    )
    condition_mix: Tuple[float, float, float] = Field(
        (0.25, 0.5, 0.25),
        description="complete mode: odds of conditioning on the partial, intermediate or complete mask",
    )
    dataset_size: int = Field(1024, ge=1, description="Pre-generated training scenes")
    appearance_range: Tuple[float, float] = Field((0.6, 1.0), description="Object intensity range")
    scale_range: Tuple[float, float] = Field((0.2, 0.35), description="Ellipse semi-axes as a fraction of the side")
    seed: int = Field(0, ge=0, description="Root seed for data, init and batches")

    @field_validator("condition_mix")
    @classmethod
    def check_condition_mix(cls, v):
        if min(v) < 0.0 or sum(v) <= 0.0:
            raise ValueError(f"condition_mix needs non-negative weights with a positive sum, got {v}")
        return v


@dataclass
class ToyDataset:
    """Row-aligned flattened masks, one row per training scene."""

    partial_image: np.ndarray
    partial: np.ndarray
    intermediate: np.ndarray
    complete: np.ndarray

    def __len__(self) -> int:
        return self.partial.shape[0]

    def condition_mask(self, kind: ConditionKind) -> np.ndarray:
        return {"partial": self.partial, "intermediate": self.intermediate, "complete": self.complete}[kind]


@dataclass
class ToyBatch:
    x0: np.ndarray
    cond_input: np.ndarray
    tau: np.ndarray
    eps: np.ndarray
    target_mask: np.ndarray

    def __post_init__(self):
        b, p = self.x0.shape
        if self.eps.shape != (b, p) or self.target_mask.shape != (b, p) or self.cond_input.shape != (b, 2 * p):
            raise DimensionMismatchError("inconsistent batch shapes")
        if self.tau.shape != (b,):
            raise DimensionMismatchError(f"need one step per sample, got tau of shape {self.tau.shape}")


@dataclass(frozen=True)
class LossBreakdown:
    loss_eps: float
    loss_mask: float
    total: float


@dataclass
class TrainResult:
    model: ToyDenoiser
    schedule: NoiseSchedule
    dataset: ToyDataset
    history: List[Dict[str, float]] = field(default_factory=list)


def build_dataset(model_cfg: ToyModelConfig, cfg: TrainConfig, rng: np.random.Generator, max_retries: int = 100) -> ToyDataset:
    """Single-ellipse scenes with double occlusion; empty partial masks are redrawn."""
    side = model_cfg.side
    spec = OcclusionSpec()
    rows = {"partial_image": [], "partial": [], "intermediate": [], "complete": []}
    for _ in range(cfg.dataset_size):
        for _attempt in range(max_retries):
            shape = sample_shape(rng, k_range=(1, 1), scale_range=cfg.scale_range, width=side, height=side)
            complete = render(shape, side, side)
            partial, intermediate = double_occlude(complete, spec, rng)
            if not partial.is_empty():
                break
        else:
            raise RetryBudgetExceeded(f"no non-empty partial mask after {max_retries} draws")
        appearance = rng.uniform(*cfg.appearance_range)
        rows["partial_image"].append(np.where(partial.data, appearance, 0.0).ravel())
        rows["partial"].append(partial.data.ravel().astype(np.float64))
        rows["intermediate"].append(intermediate.data.ravel().astype(np.float64))
        rows["complete"].append(complete.data.ravel().astype(np.float64))
    return ToyDataset(**{k: np.stack(v) for k, v in rows.items()})


def make_batch(
    data: ToyDataset, sched: NoiseSchedule, cfg: TrainConfig, rng: np.random.Generator
) -> ToyBatch:
    """Draw a batch of scenes, diffusion steps and noise.

    In ``complete`` mode the target is the complete mask and each row is
    conditioned on its partial, intermediate or complete mask with the odds of
    ``cfg.condition_mix``; in ``observed`` mode the target is the once-occluded
    mask and the condition the twice-occluded one. ``x0`` is the target in the
    [-1, 1] signal range, ``target_mask`` stays in {0, 1}.
    """
    idx = rng.integers(len(data), size=cfg.batch_size)
    if cfg.target_mode == "complete":
        weights = np.asarray(cfg.condition_mix, dtype=np.float64)
        kinds = rng.choice(len(CONDITION_KINDS), size=cfg.batch_size, p=weights / weights.sum())
        stacked = np.stack([data.condition_mask(kind)[idx] for kind in CONDITION_KINDS])
        target = data.complete[idx]
        condition = stacked[kinds, np.arange(cfg.batch_size)]
    else:
        target, condition = data.intermediate[idx], data.partial[idx]
    tau = rng.integers(1, sched.steps_Tg + 1, size=cfg.batch_size)
    eps = rng.standard_normal(target.shape)
    cond_input = np.concatenate([data.partial_image[idx], condition], axis=1)
    return ToyBatch(x0=mask_to_signal(target), cond_input=cond_input, tau=tau, eps=eps, target_mask=target)


def evaluate_loss(model: ToyDenoiser, batch: ToyBatch, sched: NoiseSchedule, cfg: TrainConfig) -> LossBreakdown:
    x_tau = forward_noise(batch.x0, batch.tau, batch.eps, sched)
    eps_hat, logits, _ = forward_with_cache(model, x_tau, batch.cond_input, batch.tau)
    l_eps = loss_eps(eps_hat, batch.eps)
    l_mask = loss_mask(logits, batch.target_mask, cfg.lambda_ce)
    total = l_eps + (l_mask if cfg.use_mask_loss else 0.0)
    return LossBreakdown(l_eps, l_mask, total)


def backward(
    model: ToyDenoiser, batch: ToyBatch, sched: NoiseSchedule, cfg: TrainConfig
) -> Tuple[LossBreakdown, Dict[str, np.ndarray]]:
    """Exact gradients of loss_eps (+ loss_mask) with respect to every parameter.

    Returns:
        (losses, grads) with one gradient array per parameter name
    """
    p = model.params
    P, D = model.config.pixels, model.config.hidden
    x_tau = forward_noise(batch.x0, batch.tau, batch.eps, sched)
    eps_hat, logits, cache = forward_with_cache(model, x_tau, batch.cond_input, batch.tau)
    c, g = cache.c, cache.g

    l_eps = loss_eps(eps_hat, batch.eps)
    l_mask = loss_mask(logits, batch.target_mask, cfg.lambda_ce)
    losses = LossBreakdown(l_eps, l_mask, l_eps + (l_mask if cfg.use_mask_loss else 0.0))

    grads = {}
    d_eps = loss_eps_grad(eps_hat, batch.eps)
    grads["W3"] = cache.h2.T @ d_eps
    grads["b3"] = d_eps.sum(axis=0)
    d_skip = np.sum(d_eps * x_tau, axis=1)
    grads["ws"] = cache.e.T @ d_skip
    grads["bs"] = np.array([d_skip.sum()])
    d_a2 = (d_eps @ p["W3"].T) * (1.0 - cache.h2 ** 2)
    grads["W2"] = cache.h1.T @ d_a2
    grads["b2"] = d_a2.sum(axis=0)
    d_a1 = (d_a2 @ p["W2"].T) * (1.0 - cache.h1 ** 2)
    grads["W1"] = cache.z0.T @ d_a1
    grads["b1"] = d_a1.sum(axis=0)
    d_z0 = d_a1 @ p["W1"].T

    d_gc = d_z0[:, P:P + D]
    d_c = d_gc * g[:, None]
    if model.config.use_gate:
        d_af = np.sum(d_gc * c, axis=1) * (1.0 - g ** 2)
        grads["wf"] = cache.e.T @ d_af
        grads["bf"] = np.array([d_af.sum()])
    else:
        grads["wf"] = np.zeros_like(p["wf"])
        grads["bf"] = np.zeros_like(p["bf"])

    if cfg.use_mask_loss:
        d_logit = loss_mask_grad(logits, batch.target_mask, cfg.lambda_ce)
        grads["Wm"] = c.T @ d_logit
        grads["bm"] = d_logit.sum(axis=0)
        d_c = d_c + d_logit @ p["Wm"].T
    else:
        grads["Wm"] = np.zeros_like(p["Wm"])
        grads["bm"] = np.zeros_like(p["bm"])

    d_ae = d_c * (1.0 - c ** 2)
    grads["We"] = cache.u.T @ d_ae
    grads["be"] = d_ae.sum(axis=0)
    return losses, grads


def write_train_log(history: List[Dict[str, float]], path: Union[str, os.PathLike]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=LOG_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in history:
            writer.writerow({k: (row[k] if k == "epoch" else f"{row[k]:.6f}") for k in LOG_COLUMNS})
    return path


def train_toy(
    model_cfg: ToyModelConfig,
    cfg: TrainConfig,
    log_path: Optional[Union[str, os.PathLike]] = None,
    progress: bool = False,
) -> TrainResult:
    """Train a fresh toy denoiser with Adam.

    Args:
        model_cfg: Architecture sizes
        cfg: Training hyperparameters
        log_path: Optional CSV path for the per-epoch log
        progress: Show a tqdm bar over epochs

    Returns:
        TrainResult with the trained model, schedule, data and per-epoch means
    """
    sched = make_schedule(cfg.schedule_steps, cfg.schedule_kind)
    data = build_dataset(model_cfg, cfg, derived_rng(cfg.seed, TRAIN_STREAM, 0))
    model = ToyDenoiser.init(model_cfg, derived_rng(cfg.seed, TRAIN_STREAM, 1))
    batch_rng = derived_rng(cfg.seed, TRAIN_STREAM, 2)
    optimizer = Adam(lr=cfg.lr)
    result = TrainResult(model=model, schedule=sched, dataset=data)

    logger.info(
        "Training toy denoiser: %d parameters, %d epochs x %d steps",
        model.num_parameters, cfg.epochs, cfg.steps_per_epoch,
    )
    for epoch in tqdm(range(1, cfg.epochs + 1), desc="train-toy", disable=not progress):
        sums = np.zeros(3)
        for _ in range(cfg.steps_per_epoch):
            batch = make_batch(data, sched, cfg, batch_rng)
            losses, grads = backward(model, batch, sched, cfg)
            model.params = optimizer.step(model.params, grads)
            sums += (losses.loss_eps, losses.loss_mask, losses.total)
        means = sums / cfg.steps_per_epoch
        row = {"epoch": epoch, "loss_eps": means[0], "loss_mask": means[1], "total": means[2]}
        result.history.append(row)
        logger.debug("epoch %d: %s", epoch, row)

    if log_path is not None:
        write_train_log(result.history, log_path)
    return result


def conditioned_iou(
    model: ToyDenoiser,
    sched: NoiseSchedule,
    data: ToyDataset,
    condition: ConditionKind,
    rng: np.random.Generator,
    count: int = 100,
    sample_steps: Optional[int] = None,
) -> float:
    """Mean IoU to the complete mask of samples drawn under the given condition."""
    side = model.config.side
    scores = []
    for i in range(count):
        row = i % len(data)
        cond_input = np.concatenate([data.partial_image[row], data.condition_mask(condition)[row]])
        sample = ddpm_sample(model, cond_input, sched, rng, sample_steps=sample_steps)
        predicted = BinaryMask((sample >= 0.5).reshape(side, side))
        truth = BinaryMask(data.complete[row].reshape(side, side).astype(bool))
        scores.append(iou(predicted, truth))
    return float(np.mean(scores))
