"""Discrete inpainting operator: 5-point Laplacian with reflecting boundaries
and the residual of the confidence-weighted inpainting equation."""

from __future__ import annotations

from typing import Union

import numpy as np

from .backend import get_kernels
from .errors import DimensionMismatchError
from .image import BinaryMask, GrayImage, ProbMask

Confidence = Union[ProbMask, BinaryMask]


def confidence_array(c: Confidence) -> np.ndarray:
    """Confidence grid as float64; binary masks are the {0,1} special case."""
    if isinstance(c, BinaryMask):
        return c.known.astype(np.float64)
    return c.prob


def laplacian_apply(u: GrayImage) -> GrayImage:
    """Apply the mirrored 5-point Laplacian stencil."""
    return GrayImage(get_kernels().laplacian(u.data))


def inpainting_residual(u: GrayImage, f: GrayImage, c: Confidence) -> GrayImage:
    """Elementwise (1 - c) * (A u) - c * (u - f)."""
    carr = confidence_array(c)
    if u.data.shape != f.data.shape or u.data.shape != carr.shape:
        raise DimensionMismatchError(
            f"dimension mismatch: u {u.data.shape}, f {f.data.shape}, c {carr.shape}"
        )
    return GrayImage(get_kernels().residual(u.data, f.data, carr))


def residual_loss(u: GrayImage, f: GrayImage, c: Confidence) -> float:
    """Mean squared norm of the inpainting-equation residual."""
    r = inpainting_residual(u, f, c).data
    return float(np.mean(r * r))
