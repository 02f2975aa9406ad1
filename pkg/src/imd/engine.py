"""Iterative mask denoising loop.

Each step draws N images from the generator conditioned on the current mask,
segments them with the visible part as prompt and votes the N masks into the
next condition:

    M_t^(k) = S(G(I_p, M̂_{t-1}))        k = 1..N
    M̂_t     = V(M_t^(1..N)) ∪ M_p

The loop only talks to the scene through its partial observation. Ground truth
is read after the loop, and only when scoring is requested.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Optional, Protocol, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..config import IMD_STEPS, IMD_SAMPLES, ROOT_SEED, WORKERS
from ..errors import EmptyMaskError, InvalidParameterError, StepError
from ..masks import BinaryMask, ProbMask, iou, mean_masks
from ..world.scene import PartialObservation, Scene
from ..world.shapes import GrayImage
from .seeds import FINAL_IMAGE_STEP, derived_rng
from .segmenter import SegmenterKind, segment
from .voting import VotingStrategy, fuse

logger = logging.getLogger(__name__)

CONVERGED_DELTA = 0.99


class Generator(Protocol):
    """Anything that samples a complete-object image given a condition mask."""

    def generate(
        self, partial: PartialObservation, condition: BinaryMask, rng: np.random.Generator
    ) -> GrayImage:
        ...


class IMDConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    steps_T: int = Field(IMD_STEPS, ge=1, description="Maximum number of denoising steps")
    samples_N: int = Field(IMD_SAMPLES, ge=1, description="Samples drawn per step")
    strategy: VotingStrategy = Field(default_factory=VotingStrategy, description="Mask voting rule")
    convergence_eps: float = Field(
        0.0, ge=0.0, le=1.0, description="Stop when iou(M̂_t, M̂_t-1) >= 1 - eps; 0 disables"
    )
    root_seed: int = Field(ROOT_SEED, ge=0, description="Root of every derived random stream")
    workers: int = Field(WORKERS, ge=1, description="Threads used for the N samples of a step")


@dataclass(frozen=True)
class StepRecord:
    """Everything produced by one IMD step."""

    step: int
    fused_mask: BinaryMask
    mean_prob: ProbMask
    sample_masks: Tuple[BinaryMask, ...]
    sample_images: Tuple[GrayImage, ...]
    delta_iou: float
    fused_iou_truth: Optional[float] = None
    mean_sample_iou_truth: Optional[float] = None
    warning: Optional[str] = None


@dataclass
class IMDTrace:
    steps: List[StepRecord] = field(default_factory=list)
    initial_mask: Optional[BinaryMask] = None
    final_image: Optional[GrayImage] = None
    converged_at: Optional[int] = None
    final_iou: Optional[float] = None

    @property
    def steps_run(self) -> int:
        return len(self.steps)

    @property
    def final_mask(self) -> BinaryMask:
        if not self.steps:
            return self.initial_mask
        return self.steps[-1].fused_mask

    @property
    def warnings(self) -> List[str]:
        return [f"step {r.step}: {r.warning}" for r in self.steps if r.warning]

    def convergence_step(self, threshold: float = CONVERGED_DELTA) -> int:
        """First step whose delta_iou reaches ``threshold``, else the number of steps run."""
        for record in self.steps:
            if record.delta_iou >= threshold:
                return record.step
        return self.steps_run


def _draw_sample(
    partial: PartialObservation,
    condition: BinaryMask,
    gen: Generator,
    seg: SegmenterKind,
    root_seed: int,
    t: int,
    k: int,
) -> Tuple[GrayImage, BinaryMask, ProbMask]:
    rng = derived_rng(root_seed, t, k)
    try:
        image = gen.generate(partial, condition, rng)
        mask, logits = segment(image, partial.mask, seg, rng)
    except Exception as exc:
        raise StepError(t, k, f"{type(exc).__name__}: {exc}") from exc
    return image, mask, logits


def imd_step(
    partial: PartialObservation,
    condition: BinaryMask,
    gen: Generator,
    seg: SegmenterKind,
    cfg: IMDConfig,
    t: int,
    executor: Optional[ThreadPoolExecutor] = None,
) -> Tuple[BinaryMask, StepRecord]:
    """One application of the mask denoiser.

    Args:
        partial: Visible image and mask
        condition: Current condition mask M̂_{t-1}
        gen: Generator G
        seg: Segmenter S
        cfg: Loop configuration
        t: Step index, starting at 1
        executor: Optional pool for the N samples; results are index-ordered

    Returns:
        (fused mask, step record)

    Raises:
        StepError: If the generator or segmenter fails for some sample
    """
    if t < 1:
        raise InvalidParameterError(f"step index must be >= 1, got {t}")
    if condition.is_empty():
        raise EmptyMaskError("imd_step needs a non-empty condition mask")
    condition.check_same_size(partial.mask, "condition and partial mask")

    ks = range(1, cfg.samples_N + 1)
    if executor is None:
        results = [_draw_sample(partial, condition, gen, seg, cfg.root_seed, t, k) for k in ks]
    else:
        results = list(
            executor.map(lambda k: _draw_sample(partial, condition, gen, seg, cfg.root_seed, t, k), ks)
        )

    images = tuple(r[0] for r in results)
    masks = tuple(r[1] for r in results)
    logits = [r[2] for r in results]

    voted = fuse(masks, logits, cfg.strategy)
    warning = None
    if voted.is_empty():
        warning = "empty fused mask; keeping the previous condition"
        logger.warning("IMD step %d: %s", t, warning)
        fused = condition
    else:
        fused = voted | partial.mask

    record = StepRecord(
        step=t,
        fused_mask=fused,
        mean_prob=mean_masks(masks),
        sample_masks=masks,
        sample_images=images,
        delta_iou=iou(fused, condition),
        warning=warning,
    )
    return fused, record


def score_trace(trace: IMDTrace, truth: BinaryMask) -> IMDTrace:
    """Fill the truth metrics of every step record."""
    trace.steps = [
        replace(
            r,
            fused_iou_truth=iou(r.fused_mask, truth),
            mean_sample_iou_truth=float(np.mean([iou(m, truth) for m in r.sample_masks])),
        )
        for r in trace.steps
    ]
    trace.final_iou = iou(trace.final_mask, truth)
    return trace


def run_imd(
    scene: Scene,
    gen: Generator,
    seg: SegmenterKind,
    cfg: IMDConfig,
    initial_condition: Optional[BinaryMask] = None,
    score_truth: bool = True,
) -> IMDTrace:
    """Run the full loop on one scene and generate the final completion.

    Args:
        scene: Scene to complete; only its partial observation drives the loop
        gen: Generator G
        seg: Segmenter S
        cfg: Loop configuration
        initial_condition: First condition mask; defaults to the partial mask.
            The partial mask is always unioned in.
        score_truth: Attach IoU-to-truth metrics after the loop

    Returns:
        IMDTrace with one record per step run and the final image
    """
    observation = scene.observation()
    condition = observation.mask
    if initial_condition is not None:
        condition = initial_condition | observation.mask
    trace = IMDTrace(initial_mask=condition)

    executor = ThreadPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
    try:
        for t in range(1, cfg.steps_T + 1):
            condition, record = imd_step(observation, condition, gen, seg, cfg, t, executor)
            trace.steps.append(record)
            logger.debug("IMD step %d: delta_iou=%.4f area=%d", t, record.delta_iou, condition.area)
            if cfg.convergence_eps > 0 and record.delta_iou >= 1.0 - cfg.convergence_eps:
                trace.converged_at = t
                break
    finally:
        if executor is not None:
            executor.shutdown(wait=True)

    final_rng = derived_rng(cfg.root_seed, FINAL_IMAGE_STEP, 0)
    try:
        trace.final_image = gen.generate(observation, condition, final_rng)
    except Exception as exc:
        raise StepError(FINAL_IMAGE_STEP, 0, f"final completion failed: {exc}") from exc

    if score_truth:
        score_trace(trace, scene.complete_mask)
    return trace


def summarize(traces: Sequence[IMDTrace]) -> dict:
    """Mean final IoU and convergence step over scored traces."""
    finals = [t.final_iou for t in traces if t.final_iou is not None]
    return {
        "scenes": len(traces),
        "mean_final_iou": float(np.mean(finals)) if finals else None,
        "mean_conv_step": float(np.mean([t.convergence_step() for t in traces])) if traces else None,
    }
