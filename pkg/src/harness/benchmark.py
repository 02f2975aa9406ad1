"""Benchmark construction: seeded scenes at a controlled occlusion rate."""

import logging
from typing import List, Optional

import numpy as np

from ..errors import RetryBudgetExceeded
from ..imd.seeds import INTERMEDIATE_STREAM, SCENE_STREAM, derived_rng, seed_derive
from ..masks import BinaryMask
from ..world.occlusion import OcclusionResult, OcclusionSpec, double_occlude, occlude, occlude_to_rate
from ..world.scene import Scene
from ..world.shapes import render, sample_shape
from .models import ExperimentConfig

logger = logging.getLogger(__name__)

SCENE_RETRIES = 50


def draw_intermediate(partial: BinaryMask, complete: BinaryMask, seed: int) -> BinaryMask:
    """Partial mask with the hidden pixels that a single occlusion leaves visible.

    ``double_occlude`` on the complete mask gives complete ∖ O1; merging it into
    the partial mask reads the scene's occluder as O1 ∪ O2, so the result is the
    double-occlusion intermediate mask of this scene. The stream is derived
    from ``seed``, so a scene always gets the same intermediate mask.
    """
    _, once = double_occlude(complete, OcclusionSpec(), derived_rng(seed, INTERMEDIATE_STREAM, 0))
    return partial | once


def _occlude_scene(complete: BinaryMask, cfg: ExperimentConfig, rng: np.random.Generator) -> Optional[OcclusionResult]:
    if cfg.occlusion.kind == "rectangle":
        result = occlude_to_rate(complete, cfg.occlusion_rate, tol=cfg.rate_tol, rng=rng)
        if abs(result.achieved_rate - cfg.occlusion_rate) > cfg.rate_tol:
            return None
    else:
        result = occlude(complete, cfg.occlusion, rng)
    if result.occluded_mask.is_empty():
        return None
    return result


def build_scene(cfg: ExperimentConfig, index: int, root_seed: Optional[int] = None) -> Scene:
    """Scene ``index`` of the benchmark; depends only on (config, root seed, index)."""
    root = cfg.root_seed if root_seed is None else root_seed
    seed = seed_derive(root, SCENE_STREAM, index)
    rng = np.random.default_rng(seed)
    side = cfg.resolution
    for attempt in range(SCENE_RETRIES):
        shape = sample_shape(rng, k_range=cfg.k_range, scale_range=cfg.scale_range, width=side, height=side)
        appearance = float(rng.uniform(*cfg.appearance_range))
        complete = render(shape, side, side)
        result = _occlude_scene(complete, cfg, rng)
        if result is None:
            logger.debug("scene %d: attempt %d missed the occlusion target", index, attempt + 1)
            continue
        return Scene(
            shape=shape,
            appearance=appearance,
            complete_mask=complete,
            partial_mask=result.occluded_mask,
            occluder=result.occluder,
            seed=seed,
            scene_id=index,
            intermediate_mask=draw_intermediate(result.occluded_mask, complete, seed),
        )
    raise RetryBudgetExceeded(
        f"scene {index}: occlusion rate {cfg.occlusion_rate} ± {cfg.rate_tol} infeasible after {SCENE_RETRIES} shapes"
    )


def build_benchmark(cfg: ExperimentConfig, rng: Optional[np.random.Generator] = None) -> List[Scene]:
    """Build ``cfg.scene_count`` scenes.

    Args:
        cfg: Experiment configuration
        rng: Optional stream that draws a fresh root seed; by default the
            config's root seed is used, so the benchmark is reproducible from
            the config alone

    Returns:
        Scenes in index order

    Raises:
        RetryBudgetExceeded: If some scene cannot meet the target rate
    """
    root = cfg.root_seed if rng is None else int(rng.integers(0, 2 ** 63))
    scenes = [build_scene(cfg, i, root) for i in range(cfg.scene_count)]
    rates = [s.occlusion_rate for s in scenes]
    logger.info(
        "Built %d scenes at %dx%d, occlusion %.3f..%.3f",
        len(scenes), cfg.resolution, cfg.resolution, min(rates), max(rates),
    )
    return scenes


def condition_for(scene: Scene, mask_type: str) -> BinaryMask:
    """First-step condition mask for the mask_type axis."""
    if mask_type == "partial":
        return scene.partial_mask
    if mask_type == "intermediate":
        if scene.intermediate_mask is not None:
            return scene.intermediate_mask
        return draw_intermediate(scene.partial_mask, scene.complete_mask, scene.seed)
    if mask_type == "complete":
        return scene.complete_mask
    raise ValueError(f"unknown mask type: {mask_type!r}")
