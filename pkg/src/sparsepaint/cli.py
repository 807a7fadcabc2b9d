"""Command-line front door.

Exit codes: 0 success, 1 usage error, 2 data error (bad files, invalid
configs, solver preconditions).
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from .bench import METHODS, run_benchmark
from .dither import mask_belhachmi
from .errors import SparsepaintError
from .image import psnr
from .io import load_image, load_mask, load_prob_mask, save_image, save_mask
from .sampling import best_of
from .solver import SolveConfig, inpaint
from .sparsify import (
    NlpeConfig,
    PsConfig,
    nonlocal_pixel_exchange,
    probabilistic_sparsification,
)

log = logging.getLogger("sparsepaint")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _solve_cfg(args) -> SolveConfig:
    return SolveConfig(tol=args.tol, max_iter=args.max_iter)


def _add_solver_flags(p):
    p.add_argument("--tol", type=float, default=1e-6, help="relative residual tolerance")
    p.add_argument("--max-iter", type=int, default=None, help="iteration cap (default 10*n)")


def _add_common(p):
    p.add_argument("--verbose", action="store_true", help="enable info logging")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sparsepaint", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("inpaint", help="homogeneous diffusion inpainting")
    p.add_argument("--image", required=True, type=Path)
    p.add_argument("--mask", required=True, type=Path)
    p.add_argument("--output", required=True, type=Path)
    _add_solver_flags(p)
    _add_common(p)

    p = sub.add_parser("metric", help="image quality metrics")
    msub = p.add_subparsers(dest="metric", required=True, parser_class=_Parser)
    mp = msub.add_parser("psnr")
    mp.add_argument("--a", required=True, type=Path)
    mp.add_argument("--b", required=True, type=Path)
    _add_common(mp)

    p = sub.add_parser("mask", help="mask generation strategies")
    ksub = p.add_subparsers(dest="strategy", required=True, parser_class=_Parser)

    kp = ksub.add_parser("belhachmi", help="Laplacian-magnitude rescale + dither")
    kp.add_argument("--image", required=True, type=Path)
    kp.add_argument("--density", required=True, type=float)
    kp.add_argument("--output", required=True, type=Path)
    kp.add_argument("--seed", type=int, default=0)
    _add_common(kp)

    kp = ksub.add_parser("ps", help="probabilistic sparsification")
    kp.add_argument("--image", required=True, type=Path)
    kp.add_argument("--density", required=True, type=float)
    kp.add_argument("--output", required=True, type=Path)
    kp.add_argument("--p", type=float, default=0.1, help="candidate fraction")
    kp.add_argument("--q", type=float, default=0.05, help="re-add fraction")
    kp.add_argument("--runs", type=int, default=5)
    kp.add_argument("--seed", type=int, default=0)
    kp.add_argument("--trace", type=Path, help="write trace CSV here")
    _add_solver_flags(kp)
    _add_common(kp)

    kp = ksub.add_parser("nlpe", help="nonlocal pixel exchange")
    kp.add_argument("--image", required=True, type=Path)
    kp.add_argument("--mask", required=True, type=Path)
    kp.add_argument("--output", required=True, type=Path)
    kp.add_argument("--candidates", type=int, default=30)
    kp.add_argument("--swap", type=int, default=10)
    kp.add_argument("--cycles", type=int, default=10)
    kp.add_argument("--seed", type=int, default=0)
    kp.add_argument("--trace", type=Path, help="write trace CSV here")
    _add_solver_flags(kp)
    _add_common(kp)

    kp = ksub.add_parser("sample", help="binarise a probability mask, best-of-N")
    kp.add_argument("--prob", required=True, type=Path, help="PFM probability mask")
    kp.add_argument("--image", required=True, type=Path)
    kp.add_argument("--output", required=True, type=Path)
    kp.add_argument("--samples", type=int, default=30)
    kp.add_argument("--seed", type=int, default=0)
    _add_solver_flags(kp)
    _add_common(kp)

    p = sub.add_parser("bench", help="quality/efficiency benchmark over a corpus")
    p.add_argument("--corpus", required=True, type=Path)
    p.add_argument("--densities", required=True,
                   help="comma-separated densities in (0,1), e.g. 0.01,0.05")
    p.add_argument("--methods", default="belhachmi,ps,ps_nlpe,random",
                   help=f"comma-separated subset of {','.join(METHODS)}")
    p.add_argument("--output", required=True, type=Path, help="CSV output path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--masks-dir", type=Path, help="PFM masks for method 'learned'")
    p.add_argument("--dump-dir", type=Path, help="write masks/reconstructions here")
    p.add_argument("--samples", type=int, default=30, help="samplings for 'learned'")
    _add_solver_flags(p)
    _add_common(p)

    return parser


class _UsageError(Exception):
    """Bad flag values; reported as usage (exit 1), not data (exit 2)."""


def _validate_flags(args) -> None:
    """Range-check numeric flags before touching any files."""
    try:
        if hasattr(args, "tol"):
            SolveConfig(tol=args.tol, max_iter=args.max_iter)
        if args.command == "mask":
            if args.strategy == "belhachmi" and not 0.0 < args.density <= 1.0:
                raise _UsageError(f"--density must be in (0, 1], got {args.density}")
            if args.strategy == "ps":
                PsConfig(
                    d=args.density, p=args.p, q=args.q, runs=args.runs, seed=args.seed
                )
            if args.strategy == "nlpe":
                NlpeConfig(
                    candidates=args.candidates,
                    swap=args.swap,
                    cycles=args.cycles,
                    seed=args.seed,
                )
            if args.strategy == "sample" and args.samples < 1:
                raise _UsageError(f"--samples must be >= 1, got {args.samples}")
        if args.command == "bench":
            for tok in args.densities.split(","):
                if tok and not 0.0 < float(tok) < 1.0:
                    raise _UsageError(f"densities must be in (0, 1), got {tok}")
            for m in args.methods.split(","):
                if m.strip() and m.strip() not in METHODS:
                    raise _UsageError(f"unknown method {m.strip()!r}")
            if args.samples < 1:
                raise _UsageError(f"--samples must be >= 1, got {args.samples}")
    except (SparsepaintError, ValueError) as exc:
        raise _UsageError(str(exc)) from exc


def _cmd_inpaint(args) -> int:
    f = load_image(args.image)
    mask = load_mask(args.mask)
    u, stats = inpaint(f, mask, _solve_cfg(args))
    if not stats.converged:
        log.warning(
            "solver hit max_iter with relative residual %.3e",
            stats.final_relative_residual,
        )
    save_image(u, args.output)
    log.info("inpainted %s in %d CG iterations", args.image, stats.iterations)
    return 0


def _cmd_metric(args) -> int:
    a = load_image(args.a)
    b = load_image(args.b)
    value = psnr(a, b)
    print("inf" if math.isinf(value) else f"{value:.6f}")
    return 0


def _cmd_mask(args) -> int:
    f = load_image(args.image)
    if args.strategy == "belhachmi":
        mask = mask_belhachmi(f, args.density, seed=args.seed)
        save_mask(mask, args.output)
        return 0
    if args.strategy == "ps":
        cfg = PsConfig(d=args.density, p=args.p, q=args.q, runs=args.runs, seed=args.seed)
        mask, trace = probabilistic_sparsification(f, cfg, _solve_cfg(args))
        save_mask(mask, args.output)
        if args.trace:
            trace.write_csv(args.trace)
        log.info("PS used %d inpaintings", trace.total_inpaintings)
        return 0
    if args.strategy == "nlpe":
        start = load_mask(args.mask)
        cfg = NlpeConfig(
            candidates=args.candidates, swap=args.swap, cycles=args.cycles, seed=args.seed
        )
        mask, trace = nonlocal_pixel_exchange(f, start, cfg, _solve_cfg(args))
        save_mask(mask, args.output)
        if args.trace:
            trace.write_csv(args.trace)
        log.info("NLPE used %d inpaintings", trace.total_inpaintings)
        return 0
    if args.strategy == "sample":
        c = load_prob_mask(args.prob)
        mask, value = best_of(c, f, samples=args.samples, seed=args.seed, cfg=_solve_cfg(args))
        save_mask(mask, args.output)
        print("inf" if math.isinf(value) else f"{value:.6f}")
        return 0
    raise AssertionError(args.strategy)


def _cmd_bench(args) -> int:
    densities = [float(tok) for tok in args.densities.split(",") if tok]
    methods = [tok.strip() for tok in args.methods.split(",") if tok.strip()]
    run_benchmark(
        corpus=args.corpus,
        densities=densities,
        methods=methods,
        seed=args.seed,
        out_csv=args.output,
        solve_cfg=_solve_cfg(args),
        masks_dir=args.masks_dir,
        dump_dir=args.dump_dir,
        samples=args.samples,
    )
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        _validate_flags(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.command == "inpaint":
            return _cmd_inpaint(args)
        if args.command == "metric":
            return _cmd_metric(args)
        if args.command == "mask":
            return _cmd_mask(args)
        if args.command == "bench":
            return _cmd_bench(args)
    except SparsepaintError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError(args.command)


if __name__ == "__main__":
    sys.exit(main())
