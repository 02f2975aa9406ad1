"""PGM (P5, maxval 255) encode/decode for masks, backed by Pillow."""

import os
from io import BytesIO
from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image

from ..errors import InvalidParameterError
from .types import BinaryMask, ProbMask

PathLike = Union[str, os.PathLike]


def _encode(pixels: np.ndarray) -> bytes:
    buffer = BytesIO()
    Image.fromarray(pixels).save(buffer, format="PPM")
    return buffer.getvalue()


def _decode(payload: bytes) -> np.ndarray:
    img = Image.open(BytesIO(payload))
    if img.format != "PPM" or img.mode != "L":
        raise InvalidParameterError(f"expected an 8-bit greyscale PGM, got {img.format} {img.mode}")
    return np.asarray(img, dtype=np.uint8)


def encode_binary(mask: BinaryMask) -> bytes:
    """0 ↦ 0, 1 ↦ 255."""
    return _encode(np.where(mask.data, 255, 0).astype(np.uint8))


def decode_binary(payload: bytes) -> BinaryMask:
    """Any value ≥ 128 becomes foreground."""
    return BinaryMask(_decode(payload) >= 128)


def encode_prob(p: ProbMask) -> bytes:
    """Linear scale [0,1] ↦ 0–255, rounded to nearest."""
    return _encode(np.rint(p.data * 255.0).astype(np.uint8))


def decode_prob(payload: bytes) -> ProbMask:
    return ProbMask(_decode(payload).astype(np.float64) / 255.0)


def write_pgm(path: PathLike, mask: Union[BinaryMask, ProbMask]) -> Path:
    """Write a mask to ``path``; parent directories are created."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = encode_binary(mask) if isinstance(mask, BinaryMask) else encode_prob(mask)
    path.write_bytes(payload)
    return path


def read_binary_pgm(path: PathLike) -> BinaryMask:
    return decode_binary(Path(path).read_bytes())


def read_prob_pgm(path: PathLike) -> ProbMask:
    return decode_prob(Path(path).read_bytes())
