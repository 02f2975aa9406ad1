"""Central finite-difference check of every toy-denoiser gradient entry."""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .model import PARAM_NAMES, ToyDenoiser, ToyModelConfig
from .schedule import make_schedule, mask_to_signal
from .train import ToyBatch, TrainConfig, backward, evaluate_loss

logger = logging.getLogger(__name__)

FD_STEP = 1e-5
REL_TOL = 1e-4
# round-off allowance of a central difference, in units of eps·|L|/h
FLOOR_ULPS = 64

TINY_MODEL = ToyModelConfig(side=4, hidden=6, embed_dim=4, trunk_hidden=8)


@dataclass
class GradcheckReport:
    max_rel_error: Dict[str, float] = field(default_factory=dict)
    failures: Dict[str, int] = field(default_factory=dict)
    checked: int = 0

    @property
    def passed(self) -> bool:
        return not any(self.failures.values())


def relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / (abs(analytic) + abs(numeric) + 1e-12)


def roundoff_floor(plus: float, minus: float, h: float) -> float:
    """Smallest difference a central quotient of these two loss values can resolve."""
    return FLOOR_ULPS * np.finfo(np.float64).eps * (abs(plus) + abs(minus)) / (2.0 * h)


def entry_passes(analytic: float, numeric: float, floor: float, tol: float = REL_TOL) -> bool:
    """One combined bound: relative tolerance on the larger magnitude plus the round-off floor."""
    return abs(analytic - numeric) <= tol * max(abs(analytic), abs(numeric)) + floor


def random_batch(config: ToyModelConfig, steps_Tg: int, rng: np.random.Generator, batch_size: int = 3) -> ToyBatch:
    P = config.pixels
    mask = (rng.random((batch_size, P)) < 0.4).astype(np.float64)
    cond = np.concatenate([mask * rng.uniform(0.6, 1.0, (batch_size, 1)), (rng.random((batch_size, P)) < 0.5)], axis=1)
    return ToyBatch(
        x0=mask_to_signal(mask),
        cond_input=cond.astype(np.float64),
        tau=rng.integers(1, steps_Tg + 1, size=batch_size),
        eps=rng.standard_normal((batch_size, P)),
        target_mask=mask,
    )


def run_gradcheck(
    config: Optional[ToyModelConfig] = None,
    train_cfg: Optional[TrainConfig] = None,
    seed: int = 0,
    h: float = FD_STEP,
    tol: float = REL_TOL,
) -> GradcheckReport:
    """Compare backprop against central differences on every parameter entry.

    Args:
        config: Model sizes; defaults to a tiny model so the full sweep is fast
        train_cfg: Loss settings (λ_ce, mask loss on/off)
        seed: Seed for weights and the random batch
        h: Finite-difference step
        tol: Relative error bound

    Returns:
        GradcheckReport with the worst relative error per parameter group,
        counted over entries whose difference clears the round-off floor
    """
    config = config or TINY_MODEL
    train_cfg = train_cfg or TrainConfig(schedule_steps=50)
    rng = np.random.default_rng(seed)
    sched = make_schedule(train_cfg.schedule_steps, train_cfg.schedule_kind)
    model = ToyDenoiser.init(config, rng)
    for name in ("be", "bf", "b1", "b2", "b3", "bs", "bm"):
        model.params[name] = 0.1 * rng.standard_normal(model.params[name].shape)
    batch = random_batch(config, sched.steps_Tg, rng)

    _, grads = backward(model, batch, sched, train_cfg)
    report = GradcheckReport()
    for name in PARAM_NAMES:
        values = model.params[name]
        worst, bad = 0.0, 0
        for index in np.ndindex(values.shape):
            original = values[index]
            values[index] = original + h
            plus = evaluate_loss(model, batch, sched, train_cfg).total
            values[index] = original - h
            minus = evaluate_loss(model, batch, sched, train_cfg).total
            values[index] = original
            numeric = (plus - minus) / (2.0 * h)
            analytic = float(grads[name][index])
            floor = roundoff_floor(plus, minus, h)
            if not entry_passes(analytic, numeric, floor, tol):
                bad += 1
            if abs(analytic - numeric) > floor:
                worst = max(worst, relative_error(analytic, numeric))
            report.checked += 1
        report.max_rel_error[name] = worst
        report.failures[name] = bad
        logger.debug("gradcheck %s: max rel error %.2e, %d failures", name, worst, bad)
    return report
