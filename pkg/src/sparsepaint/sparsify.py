"""Stochastic mask optimisation: probabilistic sparsification (PS) and
nonlocal pixel exchange (NLPE).

Both strategies perform exactly one inpainting per iteration; all randomness
flows from the config seed, so identical inputs give identical masks.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ValidationError
from .image import BinaryMask, GrayImage, density, mse
from .solver import SolveConfig, inpaint


@dataclass(frozen=True)
class PsConfig:
    d: float
    p: float = 0.1
    q: float = 0.05
    runs: int = 5
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.p <= 1.0:
            raise ValidationError(f"p must be in (0, 1], got {self.p}")
        if not 0.0 <= self.q < 1.0:
            raise ValidationError(f"q must be in [0, 1), got {self.q}")
        if not 0.0 < self.d < 1.0:
            raise ValidationError(f"density must be in (0, 1), got {self.d}")
        if self.runs < 1:
            raise ValidationError(f"runs must be >= 1, got {self.runs}")


@dataclass(frozen=True)
class NlpeConfig:
    candidates: int = 30
    swap: int = 10
    cycles: int = 10
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.swap <= self.candidates:
            raise ValidationError(
                f"need 1 <= swap <= candidates, got swap={self.swap}, "
                f"candidates={self.candidates}"
            )
        if self.cycles < 1:
            raise ValidationError(f"cycles must be >= 1, got {self.cycles}")


@dataclass(frozen=True)
class TraceStep:
    iteration: int
    density: float
    mse: float
    accepted: bool


@dataclass
class OptimizationTrace:
    steps: list[TraceStep] = field(default_factory=list)
    total_inpaintings: int = 0

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "density", "mse", "accepted"])
            for s in self.steps:
                writer.writerow(
                    [s.iteration, f"{s.density:.9f}", f"{s.mse:.9f}", int(s.accepted)]
                )


def _ranked_by_error(cand: np.ndarray, err: np.ndarray, largest: bool) -> np.ndarray:
    """Candidate indices ordered by |error|, ties broken by lower flat index."""
    order = np.argsort(cand, kind="stable")
    cand, err = cand[order], err[order]
    key = -err if largest else err
    return cand[np.argsort(key, kind="stable")]


def _run_ps(
    f: GrayImage, cfg: PsConfig, rng: np.random.Generator, solve_cfg: SolveConfig
) -> tuple[np.ndarray, OptimizationTrace]:
    n = f.data.size
    target = math.ceil(cfg.d * n)
    known = np.ones(n, dtype=np.bool_)
    m = n
    flat_f = f.data.ravel()
    trace = OptimizationTrace()
    it = 0
    while m > target:
        n_cand = min(math.ceil(cfg.p * m), m - 1)  # keep the system solvable
        cand = rng.choice(np.flatnonzero(known), size=n_cand, replace=False)
        known[cand] = False
        u, _ = inpaint(f, BinaryMask(known.reshape(f.data.shape)), solve_cfg)
        trace.total_inpaintings += 1
        err = np.abs(u.data.ravel()[cand] - flat_f[cand])
        k = math.ceil(cfg.q * n_cand)
        if m - n_cand + k < target:
            k = target - (m - n_cand)  # exact landing on ceil(d * n) pixels
        if k > 0:
            known[_ranked_by_error(cand, err, largest=True)[:k]] = True
        m = m - n_cand + k
        it += 1
        trace.steps.append(TraceStep(it, m / n, mse(u, f), True))
    return known.reshape(f.data.shape), trace


def probabilistic_sparsification(
    f: GrayImage, cfg: PsConfig, solve_cfg: SolveConfig = SolveConfig()
) -> tuple[BinaryMask, OptimizationTrace]:
    """Sparsify from a full mask down to exactly ceil(d * n) pixels.

    With runs > 1, each restart is scored by one extra inpainting of its
    final mask and the lowest-MSE mask wins; the returned trace is the
    winning run's trace with inpaintings summed over all runs.
    """
    best_mask = None
    best_mse = math.inf
    best_trace = None
    total = 0
    for run in range(cfg.runs):
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(run,)))
        known, trace = _run_ps(f, cfg, rng, solve_cfg)
        mask = BinaryMask(known)
        if cfg.runs == 1:
            total += trace.total_inpaintings
            best_mask, best_trace = mask, trace
            break
        u, _ = inpaint(f, mask, solve_cfg)
        trace.total_inpaintings += 1
        total += trace.total_inpaintings
        score = mse(u, f)
        if score < best_mse:
            best_mse = score
            best_mask, best_trace = mask, trace
    best_trace.total_inpaintings = total
    return best_mask, best_trace


def nonlocal_pixel_exchange(
    f: GrayImage,
    mask: BinaryMask,
    cfg: NlpeConfig,
    solve_cfg: SolveConfig = SolveConfig(),
) -> tuple[BinaryMask, OptimizationTrace]:
    """Accept-if-improved random swaps between mask and non-mask pixels.

    One cycle is ceil(m / swap) iterations, so each mask point is exchanged
    once on average.  Density is invariant; accepted-state MSE never
    increases.
    """
    n = mask.known.size
    m = int(np.count_nonzero(mask.known))
    if m == 0 or m == n:
        raise ValidationError("NLPE needs a non-degenerate mask (0 < density < 1)")
    if cfg.candidates > m:
        raise ValidationError(
            f"candidates ({cfg.candidates}) exceeds mask size ({m})"
        )
    if cfg.swap > n - m:
        raise ValidationError(
            f"swap ({cfg.swap}) exceeds non-mask pixel count ({n - m})"
        )
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    known = mask.known.copy().ravel()
    flat_f = f.data.ravel()
    shape = f.data.shape
    u, _ = inpaint(f, BinaryMask(known.reshape(shape)), solve_cfg)
    cur_mse = mse(u, f)
    trace = OptimizationTrace(total_inpaintings=1)
    iters_per_cycle = math.ceil(m / cfg.swap)
    it = 0
    for _cycle in range(cfg.cycles):
        for _ in range(iters_per_cycle):
            cand = rng.choice(np.flatnonzero(known), size=cfg.candidates, replace=False)
            err = np.abs(u.data.ravel()[cand] - flat_f[cand])
            out_pix = _ranked_by_error(cand, err, largest=False)[: cfg.swap]
            in_pix = rng.choice(
                np.flatnonzero(~known), size=cfg.swap, replace=False
            )
            known[out_pix] = False
            known[in_pix] = True
            u_new, _ = inpaint(f, BinaryMask(known.reshape(shape)), solve_cfg)
            trace.total_inpaintings += 1
            new_mse = mse(u_new, f)
            it += 1
            if new_mse < cur_mse:
                u, cur_mse = u_new, new_mse
                trace.steps.append(TraceStep(it, m / n, cur_mse, True))
            else:
                known[in_pix] = False
                known[out_pix] = True
                trace.steps.append(TraceStep(it, m / n, new_mse, False))
    return BinaryMask(known.reshape(shape)), trace


def ps_nlpe(
    f: GrayImage,
    ps_cfg: PsConfig,
    nlpe_cfg: NlpeConfig,
    solve_cfg: SolveConfig = SolveConfig(),
) -> tuple[BinaryMask, OptimizationTrace]:
    """PS followed by NLPE; traces concatenated, inpainting counts summed."""
    mask, ps_trace = probabilistic_sparsification(f, ps_cfg, solve_cfg)
    mask, nlpe_trace = nonlocal_pixel_exchange(f, mask, nlpe_cfg, solve_cfg)
    combined = OptimizationTrace(
        steps=ps_trace.steps + nlpe_trace.steps,
        total_inpaintings=ps_trace.total_inpaintings + nlpe_trace.total_inpaintings,
    )
    return mask, combined
