"""Scenes: ground-truth objects plus their partial observation, and JSON I/O."""

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np

from ..errors import DimensionMismatchError, EmptyMaskError, InvalidParameterError
from ..masks import BinaryMask
from .shapes import GrayImage, Shape, realize_image, render

SCENE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class PartialObservation:
    """What the completion loop is allowed to see: I_p and M_p."""

    image: GrayImage
    mask: BinaryMask

    def __post_init__(self):
        if self.image.shape != self.mask.shape:
            raise DimensionMismatchError(
                f"partial image {self.image.shape} and mask {self.mask.shape} differ in size"
            )


@dataclass(frozen=True)
class SceneTruth:
    """Hidden ground truth, readable only by the oracle generator."""

    shape: Shape
    appearance: float


@dataclass(frozen=True)
class Scene:
    """One synthetic ground-truth instance and its derived partial object."""

    shape: Shape
    appearance: float
    complete_mask: BinaryMask
    partial_mask: BinaryMask
    occluder: BinaryMask
    seed: int = 0
    scene_id: int = 0
    intermediate_mask: Optional[BinaryMask] = None

    def __post_init__(self):
        if not 0.0 < self.appearance <= 1.0:
            raise InvalidParameterError(f"appearance must lie in (0, 1], got {self.appearance}")
        rendered = render(self.shape, self.complete_mask.width, self.complete_mask.height)
        if rendered != self.complete_mask:
            raise InvalidParameterError("complete_mask does not match the rendered shape")
        if self.partial_mask.is_empty():
            raise EmptyMaskError("scene partial mask is empty")
        if not self.partial_mask.issubset(self.complete_mask):
            raise InvalidParameterError("partial mask is not contained in the complete mask")
        if self.intermediate_mask is not None and not (
            self.partial_mask.issubset(self.intermediate_mask)
            and self.intermediate_mask.issubset(self.complete_mask)
        ):
            raise InvalidParameterError("intermediate mask must lie between partial and complete")

    @property
    def width(self) -> int:
        return self.complete_mask.width

    @property
    def height(self) -> int:
        return self.complete_mask.height

    @property
    def occlusion_rate(self) -> float:
        return 1.0 - self.partial_mask.area / self.complete_mask.area

    @property
    def truth(self) -> SceneTruth:
        return SceneTruth(self.shape, self.appearance)

    def complete_image(self) -> GrayImage:
        return realize_image(self.complete_mask, self.appearance)

    def observation(self) -> PartialObservation:
        return PartialObservation(realize_image(self.partial_mask, self.appearance), self.partial_mask)

    def to_dict(self) -> dict:
        payload = {
            "version": SCENE_FORMAT_VERSION,
            "scene_id": self.scene_id,
            "seed": self.seed,
            "width": self.width,
            "height": self.height,
            "appearance": self.appearance,
            "shape": self.shape.to_dict(),
            "partial_rle": encode_rle(self.partial_mask),
            "occluder_rle": encode_rle(self.occluder),
        }
        if self.intermediate_mask is not None:
            payload["intermediate_rle"] = encode_rle(self.intermediate_mask)
        return payload

    @classmethod
    def from_dict(cls, payload: dict) -> "Scene":
        if payload.get("version") != SCENE_FORMAT_VERSION:
            raise InvalidParameterError(f"unsupported scene version: {payload.get('version')!r}")
        width, height = int(payload["width"]), int(payload["height"])
        shape = Shape.from_dict(payload["shape"])
        intermediate = payload.get("intermediate_rle")
        return cls(
            shape=shape,
            appearance=float(payload["appearance"]),
            complete_mask=render(shape, width, height),
            partial_mask=decode_rle(payload["partial_rle"], width, height),
            occluder=decode_rle(payload["occluder_rle"], width, height),
            seed=int(payload["seed"]),
            scene_id=int(payload["scene_id"]),
            intermediate_mask=None if intermediate is None else decode_rle(intermediate, width, height),
        )


def encode_rle(mask: BinaryMask) -> List[int]:
    """Uncompressed run lengths over the row-major vector, starting with a 0-run."""
    flat = mask.data.ravel().astype(np.int8)
    change = np.flatnonzero(np.diff(flat)) + 1
    bounds = np.concatenate(([0], change, [flat.size]))
    runs = np.diff(bounds).tolist()
    if flat.size and flat[0] == 1:
        runs = [0] + runs
    return [int(r) for r in runs]


def decode_rle(runs: Sequence[int], width: int, height: int) -> BinaryMask:
    if sum(runs) != width * height:
        raise DimensionMismatchError(f"run lengths sum to {sum(runs)}, expected {width * height}")
    values = np.zeros(width * height, dtype=bool)
    pos = 0
    for i, run in enumerate(runs):
        if i % 2 == 1:
            values[pos:pos + run] = True
        pos += run
    return BinaryMask.from_vector(values, width, height)


def save_scenes(path: Union[str, os.PathLike], scenes: Sequence[Scene]) -> Path:
    """Write a benchmark file; key order and formatting are fixed for byte-stable output."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {"version": SCENE_FORMAT_VERSION, "scenes": [s.to_dict() for s in scenes]}
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n")
    return path


def load_scenes(path: Union[str, os.PathLike]) -> List[Scene]:
    document = json.loads(Path(path).read_text())
    return [Scene.from_dict(s) for s in document["scenes"]]
