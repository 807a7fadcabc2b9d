"""Binarisation of probability masks by weighted coin flips, with best-of-N
selection by inpainting PSNR."""

from __future__ import annotations

import logging
import math

import numpy as np

from .errors import ValidationError
from .image import BinaryMask, GrayImage, ProbMask, psnr
from .solver import SolveConfig, inpaint

log = logging.getLogger(__name__)


def binarize(c: ProbMask, seed: int = 0) -> BinaryMask:
    """Set each pixel independently with its confidence as probability."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    return BinaryMask(rng.random(c.prob.shape) < c.prob)


def _binarize_with(c: ProbMask, ss: np.random.SeedSequence) -> BinaryMask:
    rng = np.random.default_rng(ss)
    return BinaryMask(rng.random(c.prob.shape) < c.prob)


def best_of(
    c: ProbMask,
    f: GrayImage,
    samples: int = 30,
    seed: int = 0,
    cfg: SolveConfig = SolveConfig(),
) -> tuple[BinaryMask, float]:
    """Draw `samples` binarisations, inpaint each, keep the highest PSNR.

    All-empty draws are discarded and redrawn (logged); each kept sample
    costs exactly one inpainting.
    """
    if samples < 1:
        raise ValidationError(f"samples must be >= 1, got {samples}")
    if float(np.mean(c.prob)) == 0.0:
        raise ValidationError("probability mask has zero mean, nothing to sample")
    best_mask = None
    best_psnr = -math.inf
    redraws = 0
    for k in range(samples):
        ss = np.random.SeedSequence(seed, spawn_key=(k,))
        mask = _binarize_with(c, ss)
        sub = 0
        while not mask.known.any():
            redraws += 1
            sub += 1
            mask = _binarize_with(c, np.random.SeedSequence(seed, spawn_key=(k, sub)))
        u, _ = inpaint(f, mask, cfg)
        score = psnr(u, f)
        if score > best_psnr:
            best_psnr = score
            best_mask = mask
    if redraws:
        log.info("best_of: redrew %d empty samples", redraws)
    return best_mask, best_psnr
