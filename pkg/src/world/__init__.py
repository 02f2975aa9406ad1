"""Synthetic shape world: shapes, occlusion synthesis, scenes and the oracle generator.

Main exports:
    - Shape, Ellipse, GrayImage, render, realize_image, sample_shape
    - OcclusionSpec, OcclusionResult and the *_occlude operations
    - Scene, PartialObservation, SceneTruth, save_scenes, load_scenes
    - OracleParams, OracleGenerator, oracle_generate
"""

from .shapes import Ellipse, GrayImage, Shape, realize_image, render, sample_shape, visible_image
from .occlusion import (
    OcclusionResult,
    OcclusionSpec,
    double_occlude,
    object_occlude,
    occlude,
    occlude_to_rate,
    oval_occlude,
    rect_occlude,
    shift_occlude,
    translate,
)
from .scene import PartialObservation, Scene, SceneTruth, decode_rle, encode_rle, load_scenes, save_scenes
from .oracle import OracleGenerator, OracleParams, incompleteness, oracle_generate, sample_object_mask

__all__ = [
    "Ellipse",
    "GrayImage",
    "Shape",
    "realize_image",
    "render",
    "sample_shape",
    "visible_image",
    "OcclusionResult",
    "OcclusionSpec",
    "double_occlude",
    "object_occlude",
    "occlude",
    "occlude_to_rate",
    "oval_occlude",
    "rect_occlude",
    "shift_occlude",
    "translate",
    "PartialObservation",
    "Scene",
    "SceneTruth",
    "decode_rle",
    "encode_rle",
    "load_scenes",
    "save_scenes",
    "OracleGenerator",
    "OracleParams",
    "incompleteness",
    "oracle_generate",
    "sample_object_mask",
]
