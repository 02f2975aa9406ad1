"""Sweep runner: one axis, every benchmark scene, resumable per axis value."""

import csv
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from tqdm import tqdm

from ..errors import SceneError
from ..imd.engine import IMDTrace, run_imd
from ..imd.export import export_trace
from ..imd.seeds import SCENE_IMD_STREAM, seed_derive
from ..imd.segmenter import SegmenterKind
from ..imd.voting import VotingStrategy
from ..world.occlusion import OcclusionSpec
from ..world.oracle import OracleGenerator
from ..world.scene import Scene, save_scenes
from .benchmark import build_benchmark, build_scene, condition_for
from .models import AxisValue, ExperimentConfig, SweepReport, SweepRow, write_echo

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["axis_value", "scene_id", "final_iou", "conv_step", "steps_run"]
SCENES_FILE = "scenes.json"
ECHO_FILE = "config.echo.json"
VALUES_DIR = "values"

# axes that change the benchmark itself, not only the loop
REBUILD_AXES = ("occlusion_rate", "occlusion_type")


def axis_label(value: AxisValue) -> str:
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


def apply_axis(cfg: ExperimentConfig, axis: str, value: AxisValue) -> ExperimentConfig:
    """Return a copy of ``cfg`` with one sweep value applied.

    The mask_type axis leaves the config alone; it only changes the first
    condition handed to the loop.
    """
    if axis == "steps":
        return cfg.model_copy(update={"imd": cfg.imd.model_copy(update={"steps_T": int(value)})})
    if axis == "samples":
        return cfg.model_copy(update={"imd": cfg.imd.model_copy(update={"samples_N": int(value)})})
    if axis == "occlusion_rate":
        return cfg.model_copy(update={"occlusion_rate": float(value)})
    if axis == "noise_degree":
        if float(value) == 0.0:
            return cfg
        return cfg.model_copy(update={"segmenter": SegmenterKind.with_noise(float(value), cfg.segmenter)})
    if axis == "voting":
        strategy = VotingStrategy(kind=value, tau=cfg.imd.strategy.tau)
        return cfg.model_copy(update={"imd": cfg.imd.model_copy(update={"strategy": strategy})})
    if axis == "mask_type":
        return cfg
    if axis == "occlusion_type":
        occlusion = OcclusionSpec(
            kind=value, ratio_range=cfg.occlusion.ratio_range, shift_range=cfg.occlusion.shift_range
        )
        return cfg.model_copy(update={"occlusion": occlusion})
    raise ValueError(f"unknown sweep axis: {axis!r}")


def scene_seed(cfg: ExperimentConfig, scene_id: int) -> int:
    """IMD root seed of one scene; shared by every axis value."""
    return seed_derive(cfg.root_seed, SCENE_IMD_STREAM, scene_id)


def run_scene(cfg: ExperimentConfig, scene: Scene, mask_type: str = "partial") -> IMDTrace:
    """Run the scored IMD loop on one scene with the oracle generator."""
    imd_cfg = cfg.imd.model_copy(update={"root_seed": scene_seed(cfg, scene.scene_id), "workers": 1})
    initial = None if mask_type == "partial" else condition_for(scene, mask_type)
    gen = OracleGenerator(scene.truth, cfg.oracle)
    return run_imd(scene, gen, cfg.segmenter, imd_cfg, initial_condition=initial)


def _row(label: str, scene: Scene, trace: IMDTrace) -> SweepRow:
    return SweepRow(
        axis_value=label,
        scene_id=scene.scene_id,
        final_iou=float(trace.final_iou),
        conv_step=trace.convergence_step(),
        steps_run=trace.steps_run,
    )


def _run_value(
    cfg: ExperimentConfig,
    scenes: Sequence[Scene],
    label: str,
    mask_type: str,
    progress: bool,
) -> List[SweepRow]:
    def one(scene: Scene) -> SweepRow:
        try:
            return _row(label, scene, run_scene(cfg, scene, mask_type))
        except Exception as exc:
            raise SceneError(scene.scene_id, label, f"{type(exc).__name__}: {exc}") from exc

    bar = tqdm(total=len(scenes), desc=f"{label:>12}", unit="scene", disable=not progress, leave=False)
    try:
        if cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                rows = []
                for row in pool.map(one, scenes):
                    rows.append(row)
                    bar.update(1)
        else:
            rows = []
            for scene in scenes:
                rows.append(one(scene))
                bar.update(1)
    finally:
        bar.close()
    return rows


def _fmt_row(row: SweepRow) -> list:
    return [row.axis_value, row.scene_id, f"{row.final_iou:.6f}", row.conv_step, row.steps_run]


def write_rows(path: Union[str, os.PathLike], rows: Sequence[SweepRow]) -> Path:
    """Write rows under the fixed sweep.csv header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        writer.writerows(_fmt_row(r) for r in rows)
    return path


def read_rows(path: Union[str, os.PathLike]) -> List[SweepRow]:
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames != SWEEP_COLUMNS:
            raise ValueError(f"{path}: unexpected columns {reader.fieldnames}")
        return [
            SweepRow(
                axis_value=r["axis_value"],
                scene_id=int(r["scene_id"]),
                final_iou=float(r["final_iou"]),
                conv_step=int(r["conv_step"]),
                steps_run=int(r["steps_run"]),
            )
            for r in reader
        ]


def _resumable(out_dir: Path, cfg: ExperimentConfig) -> bool:
    echo_path = out_dir / ECHO_FILE
    if not echo_path.is_file():
        return False
    try:
        return json.loads(echo_path.read_text()) == cfg.echo()
    except json.JSONDecodeError:
        return False


def _cached_rows(path: Path, label: str, scene_count: int) -> Optional[List[SweepRow]]:
    if not path.is_file():
        return None
    try:
        rows = read_rows(path)
    except (ValueError, KeyError) as e:
        logger.warning("Ignoring unreadable value file %s: %s", path, e)
        return None
    if len(rows) != scene_count or any(r.axis_value != label for r in rows):
        return None
    return rows


def run_sweep(
    cfg: ExperimentConfig,
    out_dir: Optional[Union[str, os.PathLike]] = None,
    progress: bool = False,
    on_value: Optional[Callable[[str, Dict[str, float]], None]] = None,
) -> SweepReport:
    """Run every value of ``cfg.sweep`` over the benchmark.

    Each value's rows land in ``values/<axis>=<value>.csv`` as soon as the value
    finishes; a rerun with the same config reuses complete value files.

    Args:
        cfg: Experiment config with a sweep axis
        out_dir: Output directory; defaults to ``cfg.output_dir``
        progress: Show tqdm progress bars
        on_value: Optional callback receiving (value label, aggregate) per value

    Returns:
        SweepReport with scene_count × value_count rows

    Raises:
        ValueError: If the config has no sweep axis
        SceneError: If any scene fails, naming the scene and the axis value
        RetryBudgetExceeded: If a benchmark cannot be built
    """
    if cfg.sweep is None:
        raise ValueError("config has no sweep axis")
    out_dir = Path(out_dir or cfg.output_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    resume = _resumable(out_dir, cfg)
    write_echo(cfg, out_dir)

    axis = cfg.sweep.axis
    labels = [axis_label(v) for v in cfg.sweep.values]
    report = SweepReport(axis=axis, values=labels)

    base_scenes = build_benchmark(cfg)
    save_scenes(out_dir / SCENES_FILE, base_scenes)

    for value, label in zip(cfg.sweep.values, labels):
        value_path = out_dir / VALUES_DIR / f"{axis}={label}.csv"
        rows = _cached_rows(value_path, label, cfg.scene_count) if resume else None
        if rows is not None:
            logger.info("Reusing %s", value_path)
        else:
            value_cfg = apply_axis(cfg, axis, value)
            scenes = base_scenes
            if axis in REBUILD_AXES:
                scenes = build_benchmark(value_cfg)
                save_scenes(out_dir / VALUES_DIR / f"{axis}={label}.scenes.json", scenes)
            mask_type = str(value) if axis == "mask_type" else "partial"
            rows = _run_value(value_cfg, scenes, label, mask_type, progress)
            write_rows(value_path, rows)
        report.rows.extend(rows)
        logger.info("%s=%s: mean final IoU %.4f", axis, label, report.aggregate()[label]["mean_final_iou"])
        if on_value is not None:
            on_value(label, report.aggregate()[label])

    write_rows(out_dir / "sweep.csv", report.rows)
    summary = {"axis": axis, "values": labels, "aggregate": report.aggregate()}
    (out_dir / "sweep_summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return report


def run_single(
    cfg: ExperimentConfig,
    out_dir: Optional[Union[str, os.PathLike]] = None,
    scene_index: int = 0,
) -> Tuple[Scene, IMDTrace]:
    """Build one scene, run IMD on it and export every artifact.

    Writes the trace files of ``export_trace`` plus ``scene.json`` and
    ``config.echo.json``. Nothing time-dependent is written, so identical
    configs give byte-identical directories.
    """
    out_dir = Path(out_dir or cfg.output_dir or ".")
    scene = build_scene(cfg, scene_index)
    try:
        trace = run_scene(cfg, scene)
    except Exception as exc:
        raise SceneError(scene.scene_id, "single", f"{type(exc).__name__}: {exc}") from exc
    export_trace(trace, out_dir, echo=cfg.echo())
    save_scenes(out_dir / "scene.json", [scene])
    write_echo(cfg, out_dir)
    return scene, trace
