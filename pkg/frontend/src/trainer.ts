import * as fs from 'fs';
import * as path from 'path';
import { add, Adam, detach, scale, Tensor, tensor, Variable } from './engine';
import { makeRng } from './corpus';
import { Grid } from './formats';
import { inpaintingLoss, residualLoss, varianceRegularizer } from './losses';
import { InpaintNet, MaskNet } from './model';
import { routedGradients } from './routing';
import { deskSpec, fullSpec, UNetSpec } from './unet';

export interface TrainConfig {
  density: number;
  alpha: number;
  epsilon: number;
  lr: number;
  epochs: number;
  batchSize: number;
  seed: number;
  fullScale: boolean;
}

export function defaultConfig(overrides: Partial<TrainConfig> = {}): TrainConfig {
  return {
    density: 0.05,
    alpha: 0.01,
    epsilon: 1e-8,
    lr: 5e-4,
    epochs: 200,
    batchSize: 4,
    seed: 0,
    fullScale: false,
    ...overrides,
  };
}

export interface EpochLog {
  epoch: number;
  inpaintingLoss: number;
  residualLoss: number;
  regularizer: number;
  maskMean: number;
  maskVariance: number;
}

export class Trainer {
  readonly cfg: TrainConfig;
  readonly maskNet: MaskNet;
  readonly inpaintNet: InpaintNet;
  readonly logs: EpochLog[] = [];
  private readonly maskOpt: Adam;
  private readonly inpOpt: Adam;
  private lastFinite: Map<string, Float32Array> | null = null;
  private readonly rng: () => number;

  constructor(cfg: TrainConfig) {
    if (!(cfg.density > 0 && cfg.density < 1)) {
      throw new Error(`density must be in (0, 1), got ${cfg.density}`);
    }
    if (cfg.alpha < 0) throw new Error(`alpha must be >= 0, got ${cfg.alpha}`);
    if (!(cfg.epsilon > 0)) throw new Error(`epsilon must be > 0, got ${cfg.epsilon}`);
    this.cfg = cfg;
    const spec: (inC: number) => UNetSpec = cfg.fullScale ? fullSpec : deskSpec;
    this.maskNet = new MaskNet(spec(1), cfg.density, cfg.seed);
    this.inpaintNet = new InpaintNet(spec(2), cfg.seed + 1000);
    this.maskOpt = new Adam(cfg.lr);
    this.inpOpt = new Adam(cfg.lr);
    this.rng = makeRng(cfg.seed * 97 + 13);
  }

  /** Detached binary mask, one coin flip per pixel at the density budget. */
  private randomBinaryMask(shape: number[]): Tensor {
    const n = shape.reduce((a, b) => a * b, 1);
    const data = new Float32Array(n);
    for (let i = 0; i < n; i++) data[i] = this.rng() < this.cfg.density ? 1 : 0;
    return tensor(shape.slice(), data);
  }

  allVariables(): Variable[] {
    return [...this.maskNet.variables(), ...this.inpaintNet.variables()];
  }

  /** One optimizer step on a [b, h, w, 1] batch scaled to [0, 1]. */
  step(f: Tensor): { li: number; lr: number } {
    const maskVars = this.maskNet.variables();
    const inpVars = this.inpaintNet.variables();

    // reconstruction objective moves only the mask generator
    let cSnapshot: Tensor | null = null;
    let liPure = 0;
    const maskRoute = routedGradients(() => {
      const c = this.maskNet.forward(f);
      cSnapshot = detach(c);
      const u = this.inpaintNet.forward(f, c);
      const li = inpaintingLoss(u, f);
      liPure = li.item();
      const reg = varianceRegularizer(c, this.cfg.epsilon);
      return add(li, scale(reg, this.cfg.alpha));
    }, maskVars, inpVars);

    // equation residual moves only the surrogate solver; the mask is data here
    const cDetached = cSnapshot!;
    const inpRoute = routedGradients(() => {
      const u = this.inpaintNet.forward(f, cDetached);
      return residualLoss(u, f, cDetached);
    }, inpVars, maskVars);

    // extra residual update on a random equal-density binary mask: the
    // surrogate must learn what anchors do independently of wherever the
    // mask generator currently puts them, otherwise the reconstruction
    // loss carries no placement signal back to the mask generator
    const cRandom = this.randomBinaryMask(f.shape);
    const augRoute = routedGradients(() => {
      const u = this.inpaintNet.forward(f, cRandom);
      return residualLoss(u, f, cRandom);
    }, inpVars, maskVars);

    if (
      !Number.isFinite(maskRoute.value) ||
      !Number.isFinite(inpRoute.value) ||
      !Number.isFinite(augRoute.value)
    ) {
      this.restore();
      throw new Error(
        `training diverged: L_I=${maskRoute.value}, L_R=${inpRoute.value}; ` +
          'last finite state restored'
      );
    }
    this.maskOpt.applyGradients(maskVars, maskRoute.grads);
    this.inpOpt.applyGradients(inpVars, inpRoute.grads);
    this.inpOpt.applyGradients(inpVars, augRoute.grads);
    this.snapshot();
    return { li: liPure, lr: inpRoute.value };
  }

  private snapshot(): void {
    this.lastFinite = new Map(this.allVariables().map((v) => [v.name, v.data.slice()]));
  }

  private restore(): void {
    if (!this.lastFinite) return;
    for (const v of this.allVariables()) {
      const saved = this.lastFinite.get(v.name);
      if (saved) v.data.set(saved);
    }
  }

  /** Train on a fixed in-memory corpus of equally sized grids. */
  fit(corpus: Grid[], onEpoch?: (log: EpochLog) => void): void {
    if (corpus.length === 0) throw new Error('empty corpus');
    const size = corpus[0].width;
    const batches: Tensor[] = [];
    for (let i = 0; i < corpus.length; i += this.cfg.batchSize) {
      const chunk = corpus.slice(i, i + this.cfg.batchSize);
      const flat = new Float32Array(chunk.length * size * size);
      chunk.forEach((g, j) => {
        for (let p = 0; p < size * size; p++) flat[j * size * size + p] = g.data[p] / 255;
      });
      batches.push(tensor([chunk.length, size, size, 1], flat));
    }
    for (let epoch = 0; epoch < this.cfg.epochs; epoch++) {
      let li = 0;
      let lr = 0;
      for (const batch of batches) {
        const losses = this.step(batch);
        li += losses.li;
        lr += losses.lr;
      }
      const c = this.maskNet.forward(batches[0]);
      let maskMean = 0;
      for (let i = 0; i < c.size; i++) maskMean += c.data[i];
      maskMean /= c.size;
      let maskVariance = 0;
      for (let i = 0; i < c.size; i++) maskVariance += (c.data[i] - maskMean) ** 2;
      maskVariance /= c.size;
      const log: EpochLog = {
        epoch,
        inpaintingLoss: li / batches.length,
        residualLoss: lr / batches.length,
        regularizer: 1 / (maskVariance + this.cfg.epsilon),
        maskMean,
        maskVariance,
      };
      this.logs.push(log);
      if (onEpoch) onEpoch(log);
    }
  }

  /** Per-image probability mask for export, shaped like the input grid. */
  exportMask(image: Grid): Grid {
    const n = image.width * image.height;
    const flat = new Float32Array(n);
    for (let i = 0; i < n; i++) flat[i] = image.data[i] / 255;
    const c = this.maskNet.forward(tensor([1, image.height, image.width, 1], flat));
    // clamp away float round-off so downstream range validation never trips
    const out = new Float32Array(n);
    for (let i = 0; i < n; i++) out[i] = Math.min(1, Math.max(0, c.data[i]));
    return { width: image.width, height: image.height, data: out };
  }

  writeLogCsv(filePath: string): void {
    const lines = ['epoch,inpainting_loss,residual_loss,regularizer,mask_mean,mask_variance'];
    for (const l of this.logs) {
      lines.push(
        `${l.epoch},${l.inpaintingLoss},${l.residualLoss},${l.regularizer},` +
          `${l.maskMean},${l.maskVariance}`
      );
    }
    fs.writeFileSync(filePath, lines.join('\n') + '\n');
  }

  saveCheckpoint(filePath: string): void {
    const weights: Record<string, { shape: number[]; values: number[] }> = {};
    for (const v of this.allVariables()) {
      weights[v.name] = { shape: v.shape.slice(), values: Array.from(v.data) };
    }
    const payload = {
      config: this.cfg,
      architecture: {
        skipConnections: 'concatenate',
        padding: 'zero',
        downsampling: 'average-pool',
        upsampling: 'bilinear',
      },
      weights,
    };
    fs.mkdirSync(path.dirname(filePath), { recursive: true });
    fs.writeFileSync(filePath, JSON.stringify(payload));
  }

  loadCheckpoint(filePath: string): void {
    const payload = JSON.parse(fs.readFileSync(filePath, 'utf8'));
    for (const v of this.allVariables()) {
      const entry = payload.weights[v.name];
      if (!entry) throw new Error(`checkpoint missing variable ${v.name}`);
      v.assign(entry.values);
    }
  }
}
