"""Property suites run by ``masklab selftest``.

Each suite draws seeded random cases, checks one family of properties and
reports how many cases failed. The suites are small enough to run in seconds.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from ..imd.engine import IMDConfig, imd_step
from ..imd.segmenter import SegmenterKind
from ..imd.voting import VotingStrategy, fuse
from ..masks import BinaryMask, dice, iou, label_components, mean_masks, threshold
from ..world.occlusion import OcclusionSpec, double_occlude, occlude_to_rate, rect_occlude
from ..world.oracle import OracleGenerator, OracleParams
from ..world.scene import Scene
from ..world.shapes import render, sample_shape

logger = logging.getLogger(__name__)

VOTING_CASES = 1000
MASK_CASES = 300
OCCLUSION_CASES = 200
FIXED_POINT_SCENES = 100


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: int = 0
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def check(self, ok: bool, note: str) -> None:
        self.cases += 1
        if not ok:
            self.failures += 1
            if len(self.notes) < 5:
                self.notes.append(note)


@dataclass
class SelftestReport:
    suites: List[SuiteResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)


def _random_mask(rng: np.random.Generator, width: int, height: int, density: float = 0.5) -> BinaryMask:
    return BinaryMask(rng.random((height, width)) < density)


def mask_suite(rng: np.random.Generator, cases: int = MASK_CASES) -> SuiteResult:
    """Set-algebra and overlap identities on random masks."""
    result = SuiteResult("mask")
    for i in range(cases):
        w, h = int(rng.integers(1, 12)), int(rng.integers(1, 12))
        a = _random_mask(rng, w, h, rng.uniform(0.1, 0.9))
        b = _random_mask(rng, w, h, rng.uniform(0.1, 0.9))
        j = iou(a, b)
        result.check(j == iou(b, a), f"case {i}: iou not symmetric")
        result.check(iou(a, a) == 1.0, f"case {i}: iou(a, a) != 1")
        result.check(0.0 <= j <= 1.0, f"case {i}: iou {j} outside [0, 1]")
        result.check(abs(dice(a, b) - 2 * j / (1 + j)) < 1e-12, f"case {i}: dice/iou identity broken")
        result.check((a | b).area == a.area + b.area - (a & b).area, f"case {i}: inclusion-exclusion broken")
        result.check((a - b).issubset(a) and (a & b).issubset(a | b), f"case {i}: subset chain broken")
        result.check(threshold(mean_masks([a]), 0.5) == a, f"case {i}: threshold(mean([a])) != a")
        labels, _ = label_components(a)
        result.check(bool(np.array_equal(labels > 0, a.data)), f"case {i}: components do not cover the mask")
    return result


def _brute_force_vote(masks: Sequence[BinaryMask], tau: float) -> np.ndarray:
    h, w = masks[0].shape
    out = np.zeros((h, w), dtype=bool)
    for y in range(h):
        for x in range(w):
            count = sum(1 for m in masks if m.data[y, x])
            out[y, x] = count / len(masks) >= tau
    return out


def voting_suite(rng: np.random.Generator, cases: int = VOTING_CASES, n: int = 5, side: int = 4) -> SuiteResult:
    """mask_mean fusion against a per-pixel counting oracle."""
    result = SuiteResult("voting")
    strategy = VotingStrategy(kind="mask_mean", tau=0.5)
    for i in range(cases):
        masks = [_random_mask(rng, side, side) for _ in range(n)]
        fused = fuse(masks, None, strategy)
        mismatches = int(np.count_nonzero(fused.data != _brute_force_vote(masks, strategy.tau)))
        result.check(mismatches == 0, f"case {i}: {mismatches} pixel mismatches")
    return result


def occlusion_suite(rng: np.random.Generator, cases: int = OCCLUSION_CASES, side: int = 64) -> SuiteResult:
    """Subset chain of double occlusion, rate range and rate targeting."""
    result = SuiteResult("occlusion")
    spec = OcclusionSpec()
    for i in range(cases):
        complete = render(sample_shape(rng, width=side, height=side), side, side)
        partial, intermediate = double_occlude(complete, spec, rng)
        result.check(
            partial.issubset(intermediate) and intermediate.issubset(complete),
            f"case {i}: partial ⊆ intermediate ⊆ complete broken",
        )
        rect = rect_occlude(complete, spec.ratio_range, rng)
        result.check(0.0 < rect.achieved_rate < 1.0, f"case {i}: rate {rect.achieved_rate:.3f} outside (0, 1)")
        result.check(
            (rect.occluded_mask | rect.occluder) == complete and (rect.occluded_mask & rect.occluder).is_empty(),
            f"case {i}: occluder and visible part do not split the mask",
        )
        targeted = occlude_to_rate(complete, 0.4, tol=0.02, rng=rng)
        result.check(
            targeted.occluded_mask.issubset(complete) and 0.0 < targeted.achieved_rate < 1.0,
            f"case {i}: targeted rate {targeted.achieved_rate:.3f} outside (0, 1)",
        )
    return result


def fixed_point_suite(rng: np.random.Generator, scenes: int = FIXED_POINT_SCENES, side: int = 64) -> SuiteResult:
    """A noiseless oracle conditioned on the truth reproduces the truth in one step."""
    result = SuiteResult("fixed_point")
    params = OracleParams.noiseless()
    seg = SegmenterKind.threshold_at()
    for i in range(scenes):
        shape = sample_shape(rng, width=side, height=side)
        complete = render(shape, side, side)
        occ = occlude_to_rate(complete, 0.4, rng=rng)
        if occ.occluded_mask.is_empty():
            continue
        scene = Scene(
            shape=shape,
            appearance=float(rng.uniform(0.6, 1.0)),
            complete_mask=complete,
            partial_mask=occ.occluded_mask,
            occluder=occ.occluder,
            scene_id=i,
        )
        cfg = IMDConfig(root_seed=int(rng.integers(0, 2 ** 32)), workers=1)
        fused, _ = imd_step(scene.observation(), complete, OracleGenerator(scene.truth, params), seg, cfg, 1)
        result.check(fused == complete, f"scene {i}: one step moved away from the truth (iou {iou(fused, complete):.4f})")
    return result


SUITES: Dict[str, Callable[[np.random.Generator], SuiteResult]] = {
    "mask": mask_suite,
    "voting": voting_suite,
    "occlusion": occlusion_suite,
    "fixed_point": fixed_point_suite,
}


def run_selftest(seed: int = 0, names: Optional[Sequence[str]] = None) -> SelftestReport:
    """Run the named suites (all by default), each on its own seeded stream."""
    names = list(names) if names else list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown selftest suites: {unknown}")
    report = SelftestReport()
    for index, name in enumerate(names):
        rng = np.random.default_rng([seed, index])
        suite = SUITES[name](rng)
        logger.info("selftest %s: %d cases, %d failures", name, suite.cases, suite.failures)
        report.suites.append(suite)
    return report
