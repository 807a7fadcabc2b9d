"""Benchmark harness: quality (PSNR) versus mask density and inpainting count.

For each (image, density, method) cell the harness builds a mask, counts the
inpaintings spent on mask construction, then scores the mask with one
additional (uncounted) inpainting.  Cells run sequentially in sorted order so
reruns with the same seed reproduce every CSV field except wall_ms.
"""

from __future__ import annotations

import csv
import logging
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .dither import mask_belhachmi
from .errors import SparsepaintError, ValidationError
from .image import BinaryMask, GrayImage, density, psnr
from .io import load_image, load_prob_mask, save_image, save_mask
from .sampling import best_of
from .solver import (
    SolveConfig,
    inpaint,
    inpainting_counter,
    reset_inpainting_counter,
)
from .sparsify import NlpeConfig, PsConfig, nonlocal_pixel_exchange, ps_nlpe, probabilistic_sparsification

log = logging.getLogger(__name__)

CSV_HEADER = "image,method,density_target,density_actual,psnr_db,inpaintings,wall_ms,seed"

METHODS = ("belhachmi", "ps", "ps_nlpe", "learned", "random")
_METHOD_ID = {name: i for i, name in enumerate(METHODS)}


@dataclass(frozen=True)
class BenchRecord:
    image_id: str
    method: str
    density_target: float
    density_actual: float
    psnr_db: float
    inpaintings: int
    wall_ms: float
    seed: int

    def as_row(self) -> list[str]:
        return [
            self.image_id,
            self.method,
            f"{self.density_target:g}",
            f"{self.density_actual:.9f}",
            "inf" if math.isinf(self.psnr_db) else f"{self.psnr_db:.6f}",
            str(self.inpaintings),
            f"{self.wall_ms:.3f}",
            str(self.seed),
        ]


def _cell_seed(seed: int, image_idx: int, method: str, d: float) -> int:
    ss = np.random.SeedSequence(
        seed, spawn_key=(image_idx, _METHOD_ID[method], int(round(d * 1e9)))
    )
    return int(ss.generate_state(1)[0])


def _build_mask(
    method: str,
    f: GrayImage,
    d: float,
    seed: int,
    image_idx: int,
    stem: str,
    solve_cfg: SolveConfig,
    masks_dir: Optional[Path],
    samples: int,
) -> BinaryMask:
    if method == "belhachmi":
        return mask_belhachmi(f, d, seed=_cell_seed(seed, image_idx, method, d))
    if method in ("ps", "ps_nlpe"):
        # the PS stage of ps_nlpe reuses the plain-PS seed so that NLPE can
        # only improve on the PS result for the same (image, density, seed)
        ps_cfg = PsConfig(d=d, seed=_cell_seed(seed, image_idx, "ps", d))
        if method == "ps":
            mask, _ = probabilistic_sparsification(f, ps_cfg, solve_cfg)
            return mask
        nlpe_cfg = NlpeConfig(seed=_cell_seed(seed, image_idx, "ps_nlpe", d))
        mask, _ = ps_nlpe(f, ps_cfg, nlpe_cfg, solve_cfg)
        return mask
    if method == "learned":
        if masks_dir is None:
            raise ValidationError("method 'learned' requires a masks directory")
        pfm = masks_dir / f"{stem}.pfm"
        if not pfm.exists():
            raise ValidationError(f"no probability mask for {stem!r} at {pfm}")
        c = load_prob_mask(pfm)
        mask, _ = best_of(
            c, f, samples=samples, seed=_cell_seed(seed, image_idx, method, d), cfg=solve_cfg
        )
        return mask
    if method == "random":
        n = f.data.size
        count = math.ceil(d * n)
        rng = np.random.default_rng(
            np.random.SeedSequence(_cell_seed(seed, image_idx, method, d))
        )
        known = np.zeros(n, dtype=np.bool_)
        known[rng.choice(n, size=count, replace=False)] = True
        return BinaryMask(known.reshape(f.data.shape))
    raise ValidationError(f"unknown method {method!r}")


def run_benchmark(
    corpus: Path,
    densities: Sequence[float],
    methods: Sequence[str],
    seed: int,
    out_csv: Path,
    solve_cfg: SolveConfig = SolveConfig(),
    masks_dir: Optional[Path] = None,
    dump_dir: Optional[Path] = None,
    samples: int = 30,
) -> list[BenchRecord]:
    """Run every (image, density, method) cell and write the CSV + average TSV."""
    corpus = Path(corpus)
    paths = sorted(corpus.glob("*.pgm"))
    if not paths:
        raise ValidationError(f"no PGM images found in {corpus}")
    for d in densities:
        if not 0.0 < d < 1.0:
            raise ValidationError(f"density must be in (0, 1), got {d}")
    for method in methods:
        if method not in METHODS:
            raise ValidationError(f"unknown method {method!r}")
    if dump_dir is not None:
        dump_dir = Path(dump_dir)
        dump_dir.mkdir(parents=True, exist_ok=True)

    records: list[BenchRecord] = []
    failures = 0
    for image_idx, path in enumerate(paths):
        stem = path.stem
        try:
            f = load_image(path)
        except SparsepaintError as exc:
            log.warning("skipping unreadable image %s: %s", path, exc)
            failures += 1
            continue
        for method in methods:
            for d in sorted(densities):
                t0 = time.perf_counter()
                reset_inpainting_counter()
                try:
                    mask = _build_mask(
                        method, f, d, seed, image_idx, stem, solve_cfg, masks_dir, samples
                    )
                except SparsepaintError as exc:
                    log.warning(
                        "skipping cell (%s, %s, %g): %s", stem, method, d, exc
                    )
                    failures += 1
                    continue
                count = inpainting_counter()
                u, _ = inpaint(f, mask, solve_cfg)  # scoring solve, not counted
                wall_ms = (time.perf_counter() - t0) * 1000.0
                records.append(
                    BenchRecord(
                        image_id=stem,
                        method=method,
                        density_target=d,
                        density_actual=density(mask),
                        psnr_db=psnr(u, f),
                        inpaintings=count,
                        wall_ms=wall_ms,
                        seed=seed,
                    )
                )
                if dump_dir is not None:
                    tag = f"{stem}_{method}_{d:g}"
                    save_mask(mask, dump_dir / f"{tag}_mask.pgm")
                    save_image(u, dump_dir / f"{tag}_recon.pgm")
    if not records:
        raise ValidationError("all benchmark cells failed")
    records.sort(key=lambda r: (r.image_id, r.method, r.density_target))
    write_csv(records, out_csv)
    write_average_tsv(records, Path(out_csv).with_suffix("").parent
                      / (Path(out_csv).stem + "_avg.tsv"))
    if failures:
        log.warning("%d cells/images were skipped", failures)
    return records


def write_csv(records: Sequence[BenchRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER.split(","))
        for rec in records:
            writer.writerow(rec.as_row())


def write_average_tsv(records: Sequence[BenchRecord], path) -> None:
    """Per-(method, density) averages, plot-ready for PSNR/count vs density."""
    groups: dict[tuple[str, float], list[BenchRecord]] = {}
    for rec in records:
        groups.setdefault((rec.method, rec.density_target), []).append(rec)
    with open(path, "w", newline="") as fh:
        fh.write("density\tmethod\tpsnr_db\tinpaintings\n")
        for (method, d) in sorted(groups, key=lambda k: (k[0], k[1])):
            cell = groups[(method, d)]
            avg_psnr = sum(r.psnr_db for r in cell) / len(cell)
            avg_count = sum(r.inpaintings for r in cell) / len(cell)
            psnr_str = "inf" if math.isinf(avg_psnr) else f"{avg_psnr:.6f}"
            fh.write(f"{d:g}\t{method}\t{psnr_str}\t{avg_count:.3f}\n")


def read_csv(path) -> list[BenchRecord]:
    """Parse a benchmark CSV back into records (round-trip check support)."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER.split(","):
            raise ValidationError(f"unexpected CSV header in {path}")
        for row in reader:
            out.append(
                BenchRecord(
                    image_id=row["image"],
                    method=row["method"],
                    density_target=float(row["density_target"]),
                    density_actual=float(row["density_actual"]),
                    psnr_db=float(row["psnr_db"]),
                    inpaintings=int(row["inpaintings"]),
                    wall_ms=float(row["wall_ms"]),
                    seed=int(row["seed"]),
                )
            )
    return out
