"""Grayscale image / mask containers and the quality metrics used everywhere.

All grids are stored as read-only 2-D numpy arrays with shape
``(height, width)`` in row-major order.  Intensities live in [0, 255] by
convention but are only clamped on file write-out; intermediate results
(e.g. Laplacian images) may exceed the range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, ValidationError

PEAK = 255.0


def _freeze(a: np.ndarray, dtype) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    if arr.ndim != 2:
        raise ValidationError(f"expected a 2-D grid, got ndim={arr.ndim}")
    if arr.size == 0:
        raise ValidationError("empty grid")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class GrayImage:
    """Real-valued intensity grid. Immutable after construction."""

    data: np.ndarray

    def __post_init__(self):
        arr = _freeze(self.data, np.float64)
        if not np.all(np.isfinite(arr)):
            raise ValidationError("image contains non-finite values")
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class BinaryMask:
    """Bit grid marking known pixels (True = known)."""

    known: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.known)
        if arr.dtype != np.bool_:
            uniq = np.unique(arr)
            if not np.all(np.isin(uniq, (0, 1))):
                raise ValidationError("mask entries must be 0 or 1")
        object.__setattr__(self, "known", _freeze(arr, np.bool_))

    @property
    def height(self) -> int:
        return self.known.shape[0]

    @property
    def width(self) -> int:
        return self.known.shape[1]


@dataclass(frozen=True)
class ProbMask:
    """Per-pixel confidence grid with entries in [0, 1]."""

    prob: np.ndarray

    def __post_init__(self):
        arr = _freeze(self.prob, np.float64)
        bad = np.flatnonzero((arr < 0.0) | (arr > 1.0) | ~np.isfinite(arr))
        if bad.size:
            raise ValidationError(
                f"confidence value out of [0,1] at index {int(bad[0])}"
            )
        object.__setattr__(self, "prob", arr)

    @property
    def height(self) -> int:
        return self.prob.shape[0]

    @property
    def width(self) -> int:
        return self.prob.shape[1]

    @classmethod
    def from_binary(cls, mask: BinaryMask) -> "ProbMask":
        return cls(mask.known.astype(np.float64))


def _check_same_shape(a, b):
    if a.data.shape != b.data.shape:
        raise DimensionMismatchError(
            f"dimension mismatch: {a.data.shape} vs {b.data.shape}"
        )


def mse(a: GrayImage, b: GrayImage) -> float:
    """Mean squared error between two equally sized images."""
    _check_same_shape(a, b)
    d = a.data - b.data
    return float(np.mean(d * d))


def psnr(a: GrayImage, b: GrayImage) -> float:
    """Peak signal-to-noise ratio in dB with peak 255; +inf for identical images."""
    e = mse(a, b)
    if e == 0.0:
        return math.inf
    return 10.0 * math.log10(PEAK * PEAK / e)


def density(mask: BinaryMask) -> float:
    """Fraction of known pixels."""
    return float(np.count_nonzero(mask.known)) / mask.known.size
