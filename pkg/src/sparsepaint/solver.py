"""Inpainting solvers and the global inpainting counter.

``inpaint`` eliminates the known pixels into the right-hand side and runs
conjugate gradients on the resulting symmetric positive definite system.
``inpaint_jacobi`` is the reference fixed-point solver for general
(non-binary) confidence grids; on binary masks the two agree and serve as
mutual oracles.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .backend import get_kernels
from .errors import DimensionMismatchError, NoKnownDataError, ValidationError
from .image import BinaryMask, GrayImage, ProbMask
from .pde import Confidence, confidence_array


@dataclass(frozen=True)
class SolveConfig:
    """Stopping criteria; max_iter defaults to 10 * n_pixels when None.

    ``preconditioner`` is a hook mapping a residual grid to a search grid;
    it routes the solve through the (slower) python-level PCG path.
    """

    tol: float = 1e-6
    max_iter: Optional[int] = None
    preconditioner: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if not self.tol > 0.0:
            raise ValidationError(f"tol must be positive, got {self.tol}")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValidationError(f"max_iter must be >= 1, got {self.max_iter}")

    def iter_cap(self, n_pixels: int) -> int:
        return self.max_iter if self.max_iter is not None else 10 * n_pixels


@dataclass(frozen=True)
class SolveStats:
    iterations: int
    final_relative_residual: float
    converged: bool
    counted_as_inpainting: bool = True


class _Counter:
    """Atomic accumulator for Fig.-style inpainting accounting."""

    def __init__(self):
        self._lock = threading.Lock()
        self._count = 0

    def increment(self) -> None:
        with self._lock:
            self._count += 1

    def reset(self) -> None:
        with self._lock:
            self._count = 0

    @property
    def count(self) -> int:
        with self._lock:
            return self._count


_counter = _Counter()


def inpainting_counter() -> int:
    """Number of inpaint()/inpaint_jacobi() calls since the last reset."""
    return _counter.count


def reset_inpainting_counter() -> None:
    _counter.reset()


def _project_bounds(u: np.ndarray, anchors: np.ndarray) -> None:
    """Clamp the iterate to the range spanned by the anchored values.

    The exact solution obeys the discrete maximum principle, so projecting
    onto [min(anchors), max(anchors)] never increases the solution error but
    removes the tiny overshoot a residual-based stopping rule can leave.
    """
    np.clip(u, anchors.min(), anchors.max(), out=u)


def inpaint(
    f: GrayImage, mask: BinaryMask, cfg: SolveConfig = SolveConfig()
) -> tuple[GrayImage, SolveStats]:
    """Homogeneous diffusion inpainting with known data fixed bit-exactly."""
    if f.data.shape != mask.known.shape:
        raise DimensionMismatchError(
            f"dimension mismatch: image {f.data.shape} vs mask {mask.known.shape}"
        )
    if not mask.known.any():
        raise NoKnownDataError()
    _counter.increment()
    u, it, relres, converged = get_kernels().cg_inpaint(
        f.data, mask.known, cfg.tol, cfg.iter_cap(f.data.size), cfg.preconditioner
    )
    _project_bounds(u, f.data[mask.known])
    return GrayImage(u), SolveStats(it, relres, converged)


def inpaint_jacobi(
    f: GrayImage, c: Confidence, cfg: SolveConfig = SolveConfig()
) -> tuple[GrayImage, SolveStats]:
    """Jacobi fixed-point iteration on the confidence-weighted equation."""
    carr = confidence_array(c)
    if f.data.shape != carr.shape:
        raise DimensionMismatchError(
            f"dimension mismatch: image {f.data.shape} vs confidence {carr.shape}"
        )
    if not (carr > 0.0).any():
        raise NoKnownDataError()
    _counter.increment()
    u, it, relres, converged = get_kernels().jacobi_inpaint(
        f.data, carr, cfg.tol, cfg.iter_cap(f.data.size)
    )
    _project_bounds(u, f.data[carr > 0.0])
    return GrayImage(u), SolveStats(it, relres, converged)
