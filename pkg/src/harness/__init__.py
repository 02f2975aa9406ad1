"""Experiment harness: benchmarks, sweeps and property self-tests.

Main exports:
    - ExperimentConfig, SweepAxis, load_config: validated JSON experiment config
    - build_benchmark, build_scene: seeded scenes at a target occlusion rate
    - run_sweep, run_single: IMD over the benchmark with CSV/JSON/PGM output
    - SweepReport, SweepRow: per-scene rows and per-value aggregates
    - run_selftest: mask, voting, occlusion and fixed-point property suites
"""

from .models import (
    CONFIG_VERSION,
    MASK_TYPES,
    ExperimentConfig,
    SweepAxis,
    SweepReport,
    SweepRow,
    load_config,
    write_echo,
)
from .benchmark import build_benchmark, build_scene, condition_for, draw_intermediate
from .sweep import (
    SWEEP_COLUMNS,
    apply_axis,
    axis_label,
    read_rows,
    run_scene,
    run_single,
    run_sweep,
    scene_seed,
    write_rows,
)
from .selftest import SUITES, SelftestReport, SuiteResult, run_selftest

__all__ = [
    "CONFIG_VERSION",
    "MASK_TYPES",
    "ExperimentConfig",
    "SweepAxis",
    "SweepReport",
    "SweepRow",
    "load_config",
    "write_echo",
    "build_benchmark",
    "build_scene",
    "condition_for",
    "draw_intermediate",
    "SWEEP_COLUMNS",
    "apply_axis",
    "axis_label",
    "read_rows",
    "run_scene",
    "run_single",
    "run_sweep",
    "scene_seed",
    "write_rows",
    "SUITES",
    "SelftestReport",
    "SuiteResult",
    "run_selftest",
]
