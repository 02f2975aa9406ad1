"""Mask voting V: fuse N per-sample masks into the next condition mask.

Strategies (τ = ``tau``, N = number of samples):

    mask_mean    pixel on iff mean of the N masks ≥ τ
    mask_vote    pixel on iff strictly more than N/2 masks have it
    logits_mean  pixel on iff mean of the N logit maps ≥ τ
    logits_vote  pixel on iff the share of samples with logit ≥ 0.5 is ≥ τ

Only mask_mean is pinned down by the voting equation; the other three are our
reading of the strategy names.
"""

from typing import Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..config import VOTE_STRATEGY, VOTE_TAU
from ..errors import DimensionMismatchError, InvalidParameterError
from ..masks import BinaryMask, ProbMask, mean_masks, threshold

StrategyName = Literal["logits_vote", "logits_mean", "mask_vote", "mask_mean"]

LOGIT_CUT = 0.5


class VotingStrategy(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: StrategyName = Field(VOTE_STRATEGY, description="Fusion rule")
    tau: float = Field(VOTE_TAU, ge=0.0, le=1.0, description="Voting threshold")

    @property
    def uses_logits(self) -> bool:
        return self.kind.startswith("logits")


def fuse(
    masks: Sequence[BinaryMask],
    logits: Optional[Sequence[ProbMask]],
    strategy: VotingStrategy,
) -> BinaryMask:
    """Fuse N samples into one mask.

    Args:
        masks: Per-sample segmentation masks
        logits: Per-sample logit maps, index-aligned with ``masks``; may be None
            for the mask-only strategies
        strategy: Fusion rule and threshold

    Returns:
        Fused binary mask

    Raises:
        InvalidParameterError: If no masks are given, or logits are missing for
            a logits strategy, or the two lists differ in length
        DimensionMismatchError: If any grid differs in size from the first mask
    """
    n = len(masks)
    if n == 0:
        raise InvalidParameterError("fuse needs at least one sample")
    if logits is None and strategy.uses_logits:
        raise InvalidParameterError(f"strategy {strategy.kind} needs logits")
    if logits is not None and len(logits) != n:
        raise InvalidParameterError(f"got {n} masks but {len(logits)} logit maps")

    shape = masks[0].shape
    grids = list(masks) + list(logits or [])
    for g in grids:
        if g.shape != shape:
            raise DimensionMismatchError(f"sample of size {g.shape} does not match {shape}")

    if strategy.kind == "mask_mean":
        return threshold(mean_masks(masks), strategy.tau)
    if strategy.kind == "mask_vote":
        counts = np.sum([m.data for m in masks], axis=0)
        return BinaryMask(2 * counts > n)
    if strategy.kind == "logits_mean":
        mean = np.mean([p.data for p in logits], axis=0)
        return threshold(ProbMask(mean), strategy.tau)
    votes = np.sum([p.data >= LOGIT_CUT for p in logits], axis=0)
    return threshold(ProbMask(votes / n), strategy.tau)
