"""JSON-of-arrays checkpoints with a shape header."""

import json
import os
from pathlib import Path
from typing import Optional, Union

import numpy as np

from ..errors import DimensionMismatchError, InvalidParameterError
from .model import PARAM_NAMES, ToyDenoiser, ToyModelConfig
from .schedule import NoiseSchedule

CHECKPOINT_VERSION = 2


def save_checkpoint(
    path: Union[str, os.PathLike],
    model: ToyDenoiser,
    schedule: Optional[NoiseSchedule] = None,
    meta: Optional[dict] = None,
) -> Path:
    """Write model parameters, the shape header and optional schedule to JSON.

    Floats are written with ``repr`` precision, so a reload is bit-exact.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {
        "version": CHECKPOINT_VERSION,
        "config": model.config.model_dump(),
        "shapes": {name: list(model.params[name].shape) for name in PARAM_NAMES},
        "params": {name: model.params[name].ravel().tolist() for name in PARAM_NAMES},
        "meta": meta or {},
    }
    if schedule is not None:
        document["schedule"] = {"steps_Tg": schedule.steps_Tg, "alpha_bar": schedule.alpha_bar.tolist()}
    path.write_text(json.dumps(document))
    return path


def load_checkpoint(path: Union[str, os.PathLike]):
    """Read a checkpoint.

    Returns:
        (model, schedule or None, meta)

    Raises:
        InvalidParameterError: On an unknown version
        DimensionMismatchError: If the shape header disagrees with the config or the data
    """
    document = json.loads(Path(path).read_text())
    if document.get("version") != CHECKPOINT_VERSION:
        raise InvalidParameterError(f"unsupported checkpoint version: {document.get('version')!r}")
    config = ToyModelConfig(**document["config"])
    expected = config.param_shapes()
    params = {}
    for name in PARAM_NAMES:
        shape = tuple(document["shapes"][name])
        if shape != expected[name]:
            raise DimensionMismatchError(f"{name}: header shape {shape} does not match config {expected[name]}")
        flat = np.asarray(document["params"][name], dtype=np.float64)
        if flat.size != int(np.prod(shape)):
            raise DimensionMismatchError(f"{name}: {flat.size} values for shape {shape}")
        params[name] = flat.reshape(shape)

    schedule = None
    if "schedule" in document:
        schedule = NoiseSchedule(int(document["schedule"]["steps_Tg"]), np.asarray(document["schedule"]["alpha_bar"]))
    return ToyDenoiser(config, params), schedule, document.get("meta", {})
