"""Write an IMD trace to disk: per-step PGM frames, trace.csv and a JSON summary."""

import csv
import json
import logging
import os
from pathlib import Path
from typing import Optional, Union

from ..masks import write_pgm
from ..masks.types import ProbMask
from .engine import IMDTrace

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["step", "delta_iou", "fused_iou_truth", "mean_sample_iou_truth"]


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.6f}"


def write_trace_csv(trace: IMDTrace, path: Union[str, os.PathLike]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for r in trace.steps:
            writer.writerow([r.step, _fmt(r.delta_iou), _fmt(r.fused_iou_truth), _fmt(r.mean_sample_iou_truth)])
    return path


def export_trace(trace: IMDTrace, out_dir: Union[str, os.PathLike], echo: Optional[dict] = None) -> Path:
    """Write every artifact of one run under ``out_dir``.

    Files:
        step{t:02}_fused.pgm, step{t:02}_meanprob.pgm  one pair per step
        final_image.pgm                                 the final completion
        trace.csv                                       per-step metrics
        summary.json                                    config echo plus final metrics

    Returns:
        The output directory
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for r in trace.steps:
        write_pgm(out_dir / f"step{r.step:02d}_fused.pgm", r.fused_mask)
        write_pgm(out_dir / f"step{r.step:02d}_meanprob.pgm", r.mean_prob)
    if trace.final_image is not None:
        write_pgm(out_dir / "final_image.pgm", ProbMask(trace.final_image.data))
    write_trace_csv(trace, out_dir / "trace.csv")

    summary = {
        "config": echo or {},
        "steps_run": trace.steps_run,
        "converged_at": trace.converged_at,
        "convergence_step": trace.convergence_step(),
        "final_iou": trace.final_iou,
        "final_area": trace.final_mask.area,
        "warnings": trace.warnings,
    }
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    logger.info("Wrote %d step frames to %s", trace.steps_run, out_dir)
    return out_dir
