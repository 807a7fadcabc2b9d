/**
 * Gradient checks for the autodiff engine: every hand-written backward pass
 * is compared against central finite differences on random small inputs.
 */

import { describe, expect, it } from 'vitest';
import {
  Adam,
  avgPool2,
  backward,
  concatC,
  conv3x3,
  detach,
  laplacian,
  mean,
  mul,
  oneMinus,
  randomNormal,
  relu,
  rescaleToDensity,
  scale,
  sigmoid,
  square,
  sub,
  Tensor,
  tensor,
  upBilinear2,
  Variable,
  varianceRegularizer,
} from '../src/engine';

function variable(name: string, shape: number[], seed: number, std = 1): Variable {
  return new Variable(name, shape, randomNormal(shape, std, seed));
}

/** max |analytic - finite difference| over all entries of v. */
function gradCheck(lossFn: () => Tensor, v: Variable, eps = 1e-3): number {
  v.grad = null;
  backward(lossFn);
  const analytic = v.grad ? (v.grad as Float32Array).slice() : new Float32Array(v.size);
  let worst = 0;
  for (let i = 0; i < v.size; i++) {
    const keep = v.data[i];
    v.data[i] = keep + eps;
    const plus = lossFn().item();
    v.data[i] = keep - eps;
    const minus = lossFn().item();
    v.data[i] = keep;
    const fd = (plus - minus) / (2 * eps);
    worst = Math.max(worst, Math.abs(analytic[i] - fd));
  }
  v.grad = null;
  return worst;
}

describe('gradient checks', () => {
  it('conv3x3 w.r.t. input, kernel and bias', () => {
    const x = variable('x', [2, 5, 4, 3], 1, 0.5);
    const k = variable('k', [3, 3, 3, 2], 2, 0.5);
    const b = variable('b', [2], 3, 0.5);
    const loss = () => mean(square(conv3x3(x, k, b)));
    expect(gradCheck(loss, x)).toBeLessThan(1e-3);
    expect(gradCheck(loss, k)).toBeLessThan(1e-3);
    expect(gradCheck(loss, b)).toBeLessThan(1e-3);
  });

  it('avgPool2 and upBilinear2', () => {
    const x = variable('x', [1, 4, 6, 2], 4, 0.5);
    expect(gradCheck(() => mean(square(avgPool2(x))), x)).toBeLessThan(1e-3);
    expect(gradCheck(() => mean(square(upBilinear2(x))), x)).toBeLessThan(1e-3);
  });

  it('laplacian (symmetric stencil)', () => {
    const x = variable('x', [1, 5, 5, 1], 5, 0.5);
    expect(gradCheck(() => mean(square(laplacian(x))), x)).toBeLessThan(1e-3);
  });

  it('sigmoid, relu, concat and elementwise chain', () => {
    const x = variable('x', [1, 4, 4, 2], 6, 0.5);
    const loss = () => {
      const s = sigmoid(x);
      const r = relu(sub(s, scale(oneMinus(s), 0.3)));
      return mean(square(mul(concatC(r, s), concatC(s, r))));
    };
    expect(gradCheck(loss, x)).toBeLessThan(1e-3);
  });

  it('rescaleToDensity in the rescaling regime', () => {
    const x = variable('x', [2, 3, 3, 1], 7, 0.1);
    for (let i = 0; i < x.size; i++) x.data[i] = 0.3 + 0.4 * Math.abs(x.data[i]);
    const loss = () => mean(square(rescaleToDensity(x, 0.1)));
    expect(gradCheck(loss, x, 1e-4)).toBeLessThan(1e-3);
  });

  it('rescaleToDensity in the identity regime', () => {
    const x = variable('x', [1, 3, 3, 1], 8, 0.01);
    for (let i = 0; i < x.size; i++) x.data[i] = Math.abs(x.data[i]);
    const loss = () => mean(square(rescaleToDensity(x, 0.9)));
    expect(gradCheck(loss, x, 1e-4)).toBeLessThan(1e-3);
  });

  it('varianceRegularizer', () => {
    const x = variable('x', [1, 4, 4, 1], 9, 0.3);
    const loss = () => varianceRegularizer(x, 1e-2);
    expect(gradCheck(loss, x, 1e-4)).toBeLessThan(2e-2);
  });
});

describe('forward semantics', () => {
  it('laplacian of a linear ramp vanishes in the interior', () => {
    const x = tensor([1, 3, 5, 1], [0, 1, 2, 3, 4, 0, 1, 2, 3, 4, 0, 1, 2, 3, 4]);
    const lap = laplacian(x);
    // interior columns see balanced neighbors horizontally
    expect(lap.data[1 * 5 + 2]).toBeCloseTo(0, 6);
  });

  it('detach blocks gradient flow', () => {
    const x = variable('x', [1, 2, 2, 1], 10, 0.5);
    backward(() => mean(square(detach(sigmoid(x)))));
    expect(x.grad).toBeNull();
  });

  it('adam moves parameters against the gradient', () => {
    const v = new Variable('v', [2], Float32Array.of(1, -1));
    const opt = new Adam(0.1);
    opt.applyGradients([v], new Map([['v', Float32Array.of(1, -1)]]));
    expect(v.data[0]).toBeLessThan(1);
    expect(v.data[1]).toBeGreaterThan(-1);
  });
});
