"""Sparse-mask homogeneous diffusion inpainting toolkit."""

from .backend import backend_name, set_backend
from .dither import DitherField, belhachmi_field, floyd_steinberg, mask_belhachmi
from .errors import (
    DimensionMismatchError,
    FormatError,
    NoKnownDataError,
    SparsepaintError,
    ValidationError,
)
from .image import BinaryMask, GrayImage, ProbMask, density, mse, psnr
from .io import (
    load_image,
    load_mask,
    load_prob_mask,
    save_image,
    save_mask,
    save_prob_mask,
)
from .pde import inpainting_residual, laplacian_apply, residual_loss
from .sampling import best_of, binarize
from .solver import (
    SolveConfig,
    SolveStats,
    inpaint,
    inpaint_jacobi,
    inpainting_counter,
    reset_inpainting_counter,
)
from .sparsify import (
    NlpeConfig,
    OptimizationTrace,
    PsConfig,
    nonlocal_pixel_exchange,
    probabilistic_sparsification,
    ps_nlpe,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryMask",
    "DimensionMismatchError",
    "DitherField",
    "FormatError",
    "GrayImage",
    "NlpeConfig",
    "NoKnownDataError",
    "OptimizationTrace",
    "ProbMask",
    "PsConfig",
    "SolveConfig",
    "SolveStats",
    "SparsepaintError",
    "ValidationError",
    "backend_name",
    "belhachmi_field",
    "best_of",
    "binarize",
    "density",
    "floyd_steinberg",
    "inpaint",
    "inpaint_jacobi",
    "inpainting_counter",
    "inpainting_residual",
    "laplacian_apply",
    "load_image",
    "load_mask",
    "load_prob_mask",
    "mask_belhachmi",
    "mse",
    "nonlocal_pixel_exchange",
    "probabilistic_sparsification",
    "ps_nlpe",
    "psnr",
    "reset_inpainting_counter",
    "residual_loss",
    "save_image",
    "save_mask",
    "save_prob_mask",
    "set_backend",
]
