"""Pydantic models for experiment configuration and sweep reports."""

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..config import OCCLUSION_RATE, RESOLUTION, ROOT_SEED, SCENE_COUNT, WORKERS
from ..errors import ConfigError
from ..imd.engine import IMDConfig
from ..imd.segmenter import SegmenterKind
from ..world.occlusion import OcclusionSpec
from ..world.oracle import OracleParams

CONFIG_VERSION = 1

SweepAxisName = Literal[
    "steps", "samples", "occlusion_rate", "noise_degree", "voting", "mask_type", "occlusion_type"
]
AxisValue = Union[int, float, str]

MASK_TYPES = ("partial", "intermediate", "complete")


# === Configuration Models ===

class SweepAxis(BaseModel):
    """One sweep axis and the values it takes."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    axis: SweepAxisName = Field(..., description="Which knob the sweep varies")
    values: List[AxisValue] = Field(..., min_length=1, description="Values, in report order")

    @model_validator(mode="after")
    def _check_values(self):
        if self.axis in ("steps", "samples"):
            if not all(isinstance(v, int) and not isinstance(v, bool) and v >= 1 for v in self.values):
                raise ValueError(f"{self.axis} values must be integers >= 1")
        elif self.axis == "occlusion_rate":
            if not all(isinstance(v, (int, float)) and 0.0 < v < 1.0 for v in self.values):
                raise ValueError("occlusion_rate values must lie in (0, 1)")
        elif self.axis == "noise_degree":
            if not all(isinstance(v, (int, float)) and 0.0 <= v < 1.0 for v in self.values):
                raise ValueError("noise_degree values must be area fractions in [0, 1)")
        elif self.axis == "voting":
            allowed = ("logits_vote", "logits_mean", "mask_vote", "mask_mean")
            if not all(v in allowed for v in self.values):
                raise ValueError(f"voting values must be among {allowed}")
        elif self.axis == "mask_type":
            if not all(v in MASK_TYPES for v in self.values):
                raise ValueError(f"mask_type values must be among {MASK_TYPES}")
        elif self.axis == "occlusion_type":
            allowed = ("rectangle", "oval", "object", "mixed")
            if not all(v in allowed for v in self.values):
                raise ValueError(f"occlusion_type values must be among {allowed}")
        return self


class ExperimentConfig(BaseModel):
    """Everything needed to rebuild a benchmark and rerun an experiment bit-identically."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    version: Literal[1] = Field(CONFIG_VERSION, description="Config format version")
    resolution: int = Field(RESOLUTION, ge=8, description="Scene width and height in pixels")
    k_range: Tuple[int, int] = Field((1, 3), description="Ellipse count range per shape")
    scale_range: Tuple[float, float] = Field((0.12, 0.25), description="Semi-axes as fraction of the side")
    appearance_range: Tuple[float, float] = Field((0.6, 1.0), description="Object intensity range")
    occlusion: OcclusionSpec = Field(
        default_factory=lambda: OcclusionSpec(kind="rectangle"), description="Benchmark occluder"
    )
    occlusion_rate: float = Field(OCCLUSION_RATE, gt=0.0, lt=1.0, description="Target occlusion rate")
    rate_tol: float = Field(0.02, ge=0.0, lt=0.5, description="Allowed deviation from the target rate")
    oracle: OracleParams = Field(default_factory=OracleParams, description="Oracle generator knobs")
    segmenter: SegmenterKind = Field(default_factory=SegmenterKind, description="Segmentation stage")
    imd: IMDConfig = Field(default_factory=IMDConfig, description="Denoising loop settings")
    sweep: Optional[SweepAxis] = Field(None, description="Sweep axis for the sweep command")
    scene_count: int = Field(SCENE_COUNT, ge=1, description="Benchmark size")
    root_seed: int = Field(ROOT_SEED, ge=0, lt=2 ** 64, description="Root of all derived seeds")
    workers: int = Field(WORKERS, ge=1, description="Scenes processed in parallel")
    output_dir: Optional[str] = Field(None, description="Default output directory")

    @field_validator("k_range")
    @classmethod
    def _check_k(cls, v):
        if not 1 <= v[0] <= v[1]:
            raise ValueError("k_range must satisfy 1 <= kmin <= kmax")
        return v

    @field_validator("scale_range", "appearance_range")
    @classmethod
    def _check_range(cls, v):
        if not 0.0 < v[0] <= v[1] <= 1.0:
            raise ValueError("range must satisfy 0 < lo <= hi <= 1")
        return v

    def echo(self) -> dict:
        """JSON-ready dump without the output location."""
        return self.model_dump(mode="json", exclude={"output_dir"})


def load_config(path: Union[str, os.PathLike]) -> ExperimentConfig:
    """Load and validate an experiment config file.

    Raises:
        ConfigError: If the file is missing, is not JSON, or fails validation
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(path, "config file not found")
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(path, f"invalid JSON: {e}") from e
    if not isinstance(payload, dict):
        raise ConfigError(path, "config must be a JSON object")
    try:
        return ExperimentConfig(**payload)
    except ValidationError as e:
        raise ConfigError(path, f"invalid config:\n{e}") from e


def write_echo(cfg: ExperimentConfig, out_dir: Union[str, os.PathLike]) -> Path:
    path = Path(out_dir) / "config.echo.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(cfg.echo(), indent=2, sort_keys=True) + "\n")
    return path


# === Report Models ===

@dataclass(frozen=True)
class SweepRow:
    axis_value: str
    scene_id: int
    final_iou: float
    conv_step: int
    steps_run: int


@dataclass
class SweepReport:
    """Per-scene rows plus per-value aggregates, in axis order."""

    axis: str
    values: List[str]
    rows: List[SweepRow] = field(default_factory=list)

    def rows_for(self, value: str) -> List[SweepRow]:
        return [r for r in self.rows if r.axis_value == value]

    def aggregate(self) -> Dict[str, dict]:
        out = {}
        for value in self.values:
            rows = self.rows_for(value)
            finals = np.array([r.final_iou for r in rows])
            out[value] = {
                "scenes": len(rows),
                "mean_final_iou": float(finals.mean()) if rows else None,
                "std_final_iou": float(finals.std()) if rows else None,
                "mean_conv_step": float(np.mean([r.conv_step for r in rows])) if rows else None,
                "mean_steps_run": float(np.mean([r.steps_run for r in rows])) if rows else None,
            }
        return out

    def mean_final_iou(self) -> List[float]:
        agg = self.aggregate()
        return [agg[v]["mean_final_iou"] for v in self.values]

    def mean_conv_step(self) -> List[float]:
        agg = self.aggregate()
        return [agg[v]["mean_conv_step"] for v in self.values]
