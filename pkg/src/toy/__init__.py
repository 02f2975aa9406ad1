"""Toy conditional diffusion model on flattened 16×16 masks.

Main exports:
    - NoiseSchedule, make_schedule, forward_noise, time_embedding
    - mask_to_signal / signal_to_mask: {0, 1} masks to the [-1, 1] diffusion range and back
    - ToyModelConfig, ToyDenoiser, denoiser_forward
    - loss_eps, loss_mask and their gradients
    - TrainConfig, backward, train_toy: hand-derived backprop and Adam training
    - adam_step, Adam
    - ddpm_sample: ancestral sampler with optional strided steps
    - run_gradcheck: finite-difference verification of backward
    - save_checkpoint / load_checkpoint
    - ToyGenerator: adapter that lets the toy model drive the IMD loop
"""

from .schedule import NoiseSchedule, forward_noise, make_schedule, mask_to_signal, signal_to_mask, time_embedding
from .model import ToyDenoiser, ToyModelConfig, condition_input, denoiser_forward, forward_with_cache, gate_value
from .losses import loss_eps, loss_eps_grad, loss_mask, loss_mask_grad, loss_mask_parts
from .optim import Adam, AdamState, adam_step
from .sampler import ddpm_sample, posterior_step, sampling_taus
from .train import (
    LossBreakdown,
    ToyBatch,
    ToyDataset,
    TrainConfig,
    TrainResult,
    backward,
    build_dataset,
    conditioned_iou,
    evaluate_loss,
    make_batch,
    train_toy,
    write_train_log,
)
from .checkpoint import load_checkpoint, save_checkpoint
from .gradcheck import GradcheckReport, run_gradcheck
from .adapter import ToyGenerator

__all__ = [
    "NoiseSchedule",
    "forward_noise",
    "make_schedule",
    "mask_to_signal",
    "signal_to_mask",
    "time_embedding",
    "ToyDenoiser",
    "ToyModelConfig",
    "condition_input",
    "denoiser_forward",
    "forward_with_cache",
    "gate_value",
    "loss_eps",
    "loss_eps_grad",
    "loss_mask",
    "loss_mask_grad",
    "loss_mask_parts",
    "Adam",
    "AdamState",
    "adam_step",
    "ddpm_sample",
    "posterior_step",
    "sampling_taus",
    "LossBreakdown",
    "ToyBatch",
    "ToyDataset",
    "TrainConfig",
    "TrainResult",
    "backward",
    "build_dataset",
    "conditioned_iou",
    "evaluate_loss",
    "make_batch",
    "train_toy",
    "write_train_log",
    "load_checkpoint",
    "save_checkpoint",
    "GradcheckReport",
    "run_gradcheck",
    "ToyGenerator",
]
