"""Mask value types.

Grids are stored as 2-D numpy arrays of shape (height, width), row-major,
with x growing to the right and y growing down. Arrays are frozen
(``writeable = False``) once wrapped, so every instance is an immutable value.
"""

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..errors import DimensionMismatchError, InvalidParameterError


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """W×H grid of {0,1} values."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 2:
            raise InvalidParameterError(f"BinaryMask needs a 2-D array, got shape {data.shape}")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise InvalidParameterError(f"BinaryMask needs width, height >= 1, got {data.shape}")
        if data.dtype != bool:
            if not np.isin(data, (0, 1)).all():
                raise InvalidParameterError("BinaryMask values must be 0 or 1")
            data = data.astype(bool)
        object.__setattr__(self, "data", _frozen(data))

    @classmethod
    def zeros(cls, width: int, height: int) -> "BinaryMask":
        return cls(np.zeros((height, width), dtype=bool))

    @classmethod
    def full(cls, width: int, height: int) -> "BinaryMask":
        return cls(np.ones((height, width), dtype=bool))

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> "BinaryMask":
        return cls(np.array([list(r) for r in rows], dtype=int))

    @classmethod
    def from_vector(cls, values, width: int, height: int) -> "BinaryMask":
        """Build from a row-major vector of length width×height."""
        values = np.asarray(values)
        if values.size != width * height:
            raise DimensionMismatchError(
                f"vector of length {values.size} does not fit {width}x{height}"
            )
        return cls(values.reshape(height, width))

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def shape(self) -> tuple:
        return self.data.shape

    @property
    def area(self) -> int:
        return int(self.data.sum())

    def is_empty(self) -> bool:
        return not self.data.any()

    def to_vector(self) -> np.ndarray:
        """Row-major vector of 0/1 floats."""
        return self.data.astype(np.float64).ravel()

    def check_same_size(self, other: "BinaryMask | ProbMask", what: str = "masks") -> None:
        if self.shape != other.shape:
            raise DimensionMismatchError(
                f"{what} differ in size: {self.width}x{self.height} vs {other.width}x{other.height}"
            )

    def __or__(self, other: "BinaryMask") -> "BinaryMask":
        self.check_same_size(other)
        return BinaryMask(self.data | other.data)

    def __and__(self, other: "BinaryMask") -> "BinaryMask":
        self.check_same_size(other)
        return BinaryMask(self.data & other.data)

    def __sub__(self, other: "BinaryMask") -> "BinaryMask":
        self.check_same_size(other)
        return BinaryMask(self.data & ~other.data)

    def __xor__(self, other: "BinaryMask") -> "BinaryMask":
        self.check_same_size(other)
        return BinaryMask(self.data ^ other.data)

    def __invert__(self) -> "BinaryMask":
        return BinaryMask(~self.data)

    def issubset(self, other: "BinaryMask") -> bool:
        self.check_same_size(other)
        return not (self.data & ~other.data).any()

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    def __hash__(self) -> int:
        return hash((self.shape, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"BinaryMask({self.width}x{self.height}, area={self.area})"


@dataclass(frozen=True, eq=False)
class ProbMask:
    """W×H grid of reals in [0,1]."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise InvalidParameterError(f"ProbMask needs a non-empty 2-D array, got shape {data.shape}")
        if not np.isfinite(data).all() or data.min() < 0.0 or data.max() > 1.0:
            raise InvalidParameterError("ProbMask values must lie in [0, 1]")
        object.__setattr__(self, "data", _frozen(data))

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def shape(self) -> tuple:
        return self.data.shape

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProbMask):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    def __hash__(self) -> int:
        return hash((self.shape, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"ProbMask({self.width}x{self.height}, mean={self.data.mean():.3f})"


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box; x0, y0 inclusive and x1, y1 exclusive."""

    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        if not (0 <= self.x0 < self.x1 and 0 <= self.y0 < self.y1):
            raise InvalidParameterError(f"degenerate box {self}")

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0
