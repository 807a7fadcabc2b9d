import * as fs from 'fs';
import * as path from 'path';
import { Grid, writePgm } from './formats';

/** Small deterministic PRNG (mulberry32); good enough for toy corpora. */
export function makeRng(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/**
 * Synthetic grayscale image: a gentle background gradient with a few flat
 * disks and rectangles at distinct gray levels, in [0, 255]. Piecewise-
 * constant content with sharp contours is the regime where mask placement
 * matters most for diffusion inpainting: points on the contours carry far
 * more information than points inside the flat regions.
 */
export function synthImage(seed: number, size: number): Grid {
  const rng = makeRng(seed * 2654435761 + 1);
  const data = new Float32Array(size * size);
  const gx = (rng() - 0.5) * 60;
  const gy = (rng() - 0.5) * 60;
  const base = 60 + rng() * 60;
  for (let y = 0; y < size; y++) {
    for (let x = 0; x < size; x++) {
      data[y * size + x] = base + (gx * x) / size + (gy * y) / size;
    }
  }
  const shapes = 3 + Math.floor(rng() * 3);
  for (let s = 0; s < shapes; s++) {
    const level = 20 + rng() * 215;
    if (rng() < 0.5) {
      const cx = rng() * size;
      const cy = rng() * size;
      const r = size * (0.08 + rng() * 0.18);
      const r2 = r * r;
      for (let y = 0; y < size; y++) {
        for (let x = 0; x < size; x++) {
          if ((x - cx) ** 2 + (y - cy) ** 2 <= r2) data[y * size + x] = level;
        }
      }
    } else {
      const x0 = Math.floor(rng() * size * 0.7);
      const y0 = Math.floor(rng() * size * 0.7);
      const w = Math.floor(size * (0.15 + rng() * 0.3));
      const h = Math.floor(size * (0.15 + rng() * 0.3));
      for (let y = y0; y < Math.min(size, y0 + h); y++) {
        for (let x = x0; x < Math.min(size, x0 + w); x++) {
          data[y * size + x] = level;
        }
      }
    }
  }
  for (let i = 0; i < data.length; i++) data[i] = Math.min(255, Math.max(0, data[i]));
  return { width: size, height: size, data };
}

/** Uniform random binary mask at an exact pixel count; 255 = known. */
export function randomMask(seed: number, size: number, count: number): Grid {
  const rng = makeRng(seed * 40503 + 7);
  const n = size * size;
  const idx = Array.from({ length: n }, (_, i) => i);
  for (let i = n - 1; i > 0; i--) {
    const j = Math.floor(rng() * (i + 1));
    [idx[i], idx[j]] = [idx[j], idx[i]];
  }
  const data = new Float32Array(n);
  for (let k = 0; k < count; k++) data[idx[k]] = 255;
  return { width: size, height: size, data };
}

export function writeCorpus(corpus: Grid[], names: string[], dir: string): void {
  fs.mkdirSync(dir, { recursive: true });
  corpus.forEach((g, i) => writePgm(path.join(dir, names[i]), g));
}
