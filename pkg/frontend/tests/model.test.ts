import { describe, expect, it } from 'vitest';
import { randomNormal, rescaleToDensity, tensor } from '../src/engine';
import { EPSILON, residualLoss, varianceRegularizer } from '../src/losses';
import { InpaintNet, MaskNet } from '../src/model';
import { deskSpec } from '../src/unet';

function image(seed: number, n = 1, size = 16) {
  const data = randomNormal([n, size, size, 1], 0.2, seed);
  for (let i = 0; i < data.length; i++) data[i] = Math.min(1, Math.max(0, data[i] + 0.5));
  return tensor([n, size, size, 1], data);
}

describe('mask generator', () => {
  it('outputs stay in [0, 1] with per-image mean at most d', () => {
    const net = new MaskNet(deskSpec(1), 0.05, 3);
    const c = net.forward(image(1, 3));
    const per = c.size / 3;
    for (let b = 0; b < 3; b++) {
      let mean = 0;
      for (let i = 0; i < per; i++) {
        const v = c.data[b * per + i];
        expect(v).toBeGreaterThanOrEqual(0);
        expect(v).toBeLessThanOrEqual(1);
        mean += v;
      }
      expect(mean / per).toBeLessThanOrEqual(0.05 + 1e-6);
    }
  });

  it('raw mean 0.2 rescales to exactly 0.1', () => {
    const c = tensor([1, 4, 4, 1], new Float32Array(16).fill(0.2));
    const scaled = rescaleToDensity(c, 0.1);
    let mean = 0;
    for (let i = 0; i < 16; i++) mean += scaled.data[i];
    expect(mean / 16).toBeCloseTo(0.1, 6);
  });

  it('means below the budget pass through untouched', () => {
    const c = tensor([1, 4, 4, 1], new Float32Array(16).fill(0.03));
    const scaled = rescaleToDensity(c, 0.1);
    expect(Array.from(scaled.data)).toEqual(Array.from(c.data));
  });

  it('rejects out-of-range densities', () => {
    expect(() => new MaskNet(deskSpec(1), 0, 0)).toThrow();
    expect(() => new MaskNet(deskSpec(1), 1.2, 0)).toThrow();
  });
});

describe('surrogate solver', () => {
  it('preserves the input shape', () => {
    const net = new InpaintNet(deskSpec(2), 0);
    const f = image(2, 2, 16);
    const c = tensor([2, 16, 16, 1], new Float32Array(512).fill(0.05));
    const u = net.forward(f, c);
    expect(u.shape).toEqual([2, 16, 16, 1]);
  });

  it('rejects mismatched shapes', () => {
    const net = new InpaintNet(deskSpec(2), 0);
    const f = image(3, 1, 16);
    const c = tensor([1, 8, 8, 1], new Float32Array(64));
    expect(() => net.forward(f, c)).toThrow(/shape mismatch/);
  });
});

describe('variance regularizer', () => {
  it('flat mask at 0.3 gives 1e8 with the default epsilon', () => {
    const c = tensor([1, 8, 8, 1], new Float32Array(64).fill(0.3));
    expect(varianceRegularizer(c, EPSILON).item()).toBeCloseTo(1e8, -2);
  });

  it('half zeros, half ones gives about 4', () => {
    const data = new Float32Array(64);
    data.fill(1, 0, 32);
    const c = tensor([1, 8, 8, 1], data);
    expect(varianceRegularizer(c).item()).toBeCloseTo(4, 3);
  });

  it('strictly decreases as variance increases', () => {
    let prev = Infinity;
    for (const spread of [0.1, 0.2, 0.3, 0.4, 0.5]) {
      const data = new Float32Array(64);
      for (let i = 0; i < 64; i++) data[i] = 0.5 + (i % 2 === 0 ? spread : -spread);
      const r = varianceRegularizer(tensor([1, 8, 8, 1], data)).item();
      expect(r).toBeLessThan(prev);
      prev = r;
    }
  });
});

describe('residual loss', () => {
  it('is zero when u solves the equation for a full mask', () => {
    const f = image(4, 1, 8);
    const ones = tensor([1, 8, 8, 1], new Float32Array(64).fill(1));
    // c = 1 reduces the equation to u = f
    expect(residualLoss(f, f, ones).item()).toBeCloseTo(0, 10);
  });

  it('penalizes non-harmonic fill-in where c = 0', () => {
    const f = image(5, 1, 8);
    const zeros = tensor([1, 8, 8, 1], new Float32Array(64));
    expect(residualLoss(f, f, zeros).item()).toBeGreaterThan(0);
  });
});
