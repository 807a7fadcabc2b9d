"""Instantaneous analytic masks: Laplacian-magnitude rescaling followed by
binary Floyd-Steinberg error diffusion.  Performs zero inpaintings."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .backend import get_kernels
from .errors import ValidationError
from .image import BinaryMask, GrayImage
from .pde import laplacian_apply

_BISECT_ITERS = 60


@dataclass(frozen=True)
class DitherField:
    """Per-pixel probability mass in [0,1] whose mean hits the target density."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))


def belhachmi_field(f: GrayImage, d: float) -> DitherField:
    """Rescale |Laplacian(f)| so that the clamped field has mean d."""
    if not 0.0 < d <= 1.0:
        raise ValidationError(f"density must be in (0, 1], got {d}")
    m = np.abs(laplacian_apply(f).data)
    peak = float(m.max())
    if peak == 0.0:
        # constant image: no structure to weight, fall back to a uniform field
        return DitherField(np.full(f.data.shape, d))
    support = float(np.mean(m > 0.0))
    if support <= d:
        # even full saturation of the support cannot reach d; saturate it and
        # spread the remaining mass uniformly over the zero-Laplacian pixels
        field = (m > 0.0).astype(np.float64)
        zero_frac = 1.0 - support
        if zero_frac > 0.0:
            field[m == 0.0] = (d - support) / zero_frac
        return DitherField(field)
    lo, hi = 0.0, 1.0 / peak
    while float(np.mean(np.clip(hi * m, 0.0, 1.0))) < d:
        hi *= 2.0
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        if float(np.mean(np.clip(mid * m, 0.0, 1.0))) < d:
            lo = mid
        else:
            hi = mid
    return DitherField(np.clip(hi * m, 0.0, 1.0))


def floyd_steinberg(field: DitherField, seed: Optional[int] = None) -> BinaryMask:
    """Raster-order error diffusion with the classic 7/3/5/1 weights.

    Deterministic; ``seed`` is accepted for interface symmetry with the
    stochastic mask generators and ignored.
    """
    return BinaryMask(get_kernels().floyd_steinberg(field.values))


def mask_belhachmi(f: GrayImage, d: float, seed: Optional[int] = None) -> BinaryMask:
    """Analytic mask pipeline: field rescaling + dithering, zero inpaintings."""
    return floyd_steinberg(belhachmi_field(f, d), seed)
