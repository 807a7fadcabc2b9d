/**
 * Minimal reverse-mode autodiff over Float32Array tensors.
 *
 * Tensors are NHWC ([batch, height, width, channels]); scalars have shape [].
 * Each op records a backward closure on a global tape; backward(loss) replays
 * it in reverse. The op set is exactly what the two U-nets and their losses
 * need, with hand-written gradients tuned for CPU throughput.
 */

export class Tensor {
  readonly shape: number[];
  readonly data: Float32Array;
  grad: Float32Array | null = null;
  readonly requiresGrad: boolean;

  constructor(shape: number[], data: Float32Array, requiresGrad: boolean) {
    this.shape = shape;
    this.data = data;
    this.requiresGrad = requiresGrad;
  }

  get size(): number {
    return this.data.length;
  }

  item(): number {
    if (this.size !== 1) throw new Error(`item() on tensor of size ${this.size}`);
    return this.data[0];
  }

  ensureGrad(): Float32Array {
    if (!this.grad) this.grad = new Float32Array(this.size);
    return this.grad;
  }
}

export class Variable extends Tensor {
  readonly name: string;

  constructor(name: string, shape: number[], data: Float32Array) {
    super(shape, data, true);
    this.name = name;
  }

  assign(values: Float32Array | number[]): void {
    if (values.length !== this.size) {
      throw new Error(`assign size mismatch for ${this.name}`);
    }
    this.data.set(values);
  }
}

interface TapeNode {
  out: Tensor;
  backward: () => void;
}

let tape: TapeNode[] | null = null;

function record(out: Tensor, backward: () => void): void {
  if (tape && out.requiresGrad) tape.push({ out, backward });
}

function numel(shape: number[]): number {
  return shape.reduce((a, b) => a * b, 1);
}

export function tensor(shape: number[], data?: Float32Array | number[]): Tensor {
  const n = numel(shape);
  let arr: Float32Array;
  if (data === undefined) arr = new Float32Array(n);
  else if (data instanceof Float32Array) arr = data;
  else arr = Float32Array.from(data);
  if (arr.length !== n) throw new Error(`data length ${arr.length} != shape size ${n}`);
  return new Tensor(shape, arr, false);
}

/** Detached copy: gradients never flow into the source through this. */
export function detach(x: Tensor): Tensor {
  return new Tensor(x.shape.slice(), x.data.slice(), false);
}

/**
 * Run fn under a fresh tape, backpropagate from its scalar result, and
 * return the loss value. Gradients land in .grad of reachable tensors.
 */
export function backward(fn: () => Tensor): number {
  const prev = tape;
  tape = [];
  try {
    const loss = fn();
    if (loss.size !== 1) throw new Error('backward() needs a scalar loss');
    loss.ensureGrad()[0] = 1;
    for (let i = tape.length - 1; i >= 0; i--) {
      // nodes off the path to the loss never receive a gradient
      if (tape[i].out.grad !== null) tape[i].backward();
    }
    return loss.data[0];
  } finally {
    tape = prev;
  }
}

function unary(
  x: Tensor,
  fwd: (v: number) => number,
  dfdx: (v: number, y: number) => number
): Tensor {
  const out = new Tensor(x.shape.slice(), new Float32Array(x.size), x.requiresGrad);
  for (let i = 0; i < x.size; i++) out.data[i] = fwd(x.data[i]);
  record(out, () => {
    if (!x.requiresGrad) return;
    const g = out.grad!;
    const gx = x.ensureGrad();
    for (let i = 0; i < x.size; i++) gx[i] += dfdx(x.data[i], out.data[i]) * g[i];
  });
  return out;
}

export function relu(x: Tensor): Tensor {
  return unary(x, (v) => (v > 0 ? v : 0), (v) => (v > 0 ? 1 : 0));
}

export function sigmoid(x: Tensor): Tensor {
  return unary(
    x,
    (v) => 1 / (1 + Math.exp(-v)),
    (_v, y) => y * (1 - y)
  );
}

export function square(x: Tensor): Tensor {
  return unary(x, (v) => v * v, (v) => 2 * v);
}

function assertSameShape(a: Tensor, b: Tensor): void {
  if (a.size !== b.size || a.shape.length !== b.shape.length) {
    throw new Error(`shape mismatch: [${a.shape}] vs [${b.shape}]`);
  }
}

function binary(
  a: Tensor,
  b: Tensor,
  fwd: (x: number, y: number) => number,
  da: (x: number, y: number) => number,
  db: (x: number, y: number) => number
): Tensor {
  assertSameShape(a, b);
  const requires = a.requiresGrad || b.requiresGrad;
  const out = new Tensor(a.shape.slice(), new Float32Array(a.size), requires);
  for (let i = 0; i < a.size; i++) out.data[i] = fwd(a.data[i], b.data[i]);
  record(out, () => {
    const g = out.grad!;
    if (a.requiresGrad) {
      const ga = a.ensureGrad();
      for (let i = 0; i < a.size; i++) ga[i] += da(a.data[i], b.data[i]) * g[i];
    }
    if (b.requiresGrad) {
      const gb = b.ensureGrad();
      for (let i = 0; i < a.size; i++) gb[i] += db(a.data[i], b.data[i]) * g[i];
    }
  });
  return out;
}

export function add(a: Tensor, b: Tensor): Tensor {
  return binary(a, b, (x, y) => x + y, () => 1, () => 1);
}

export function sub(a: Tensor, b: Tensor): Tensor {
  return binary(a, b, (x, y) => x - y, () => 1, () => -1);
}

export function mul(a: Tensor, b: Tensor): Tensor {
  return binary(a, b, (x, y) => x * y, (_x, y) => y, (x) => x);
}

export function scale(x: Tensor, s: number): Tensor {
  return unary(x, (v) => v * s, () => s);
}

export function oneMinus(x: Tensor): Tensor {
  return unary(x, (v) => 1 - v, () => -1);
}

export function mean(x: Tensor): Tensor {
  let sum = 0;
  for (let i = 0; i < x.size; i++) sum += x.data[i];
  const out = new Tensor([], Float32Array.of(sum / x.size), x.requiresGrad);
  record(out, () => {
    if (!x.requiresGrad) return;
    const g = out.grad![0] / x.size;
    const gx = x.ensureGrad();
    for (let i = 0; i < x.size; i++) gx[i] += g;
  });
  return out;
}

/** Concatenate along the channel axis. */
export function concatC(a: Tensor, b: Tensor): Tensor {
  const [n, h, w, ca] = a.shape;
  const [n2, h2, w2, cb] = b.shape;
  if (n !== n2 || h !== h2 || w !== w2) {
    throw new Error(`shape mismatch: [${a.shape}] vs [${b.shape}]`);
  }
  const cout = ca + cb;
  const out = new Tensor(
    [n, h, w, cout],
    new Float32Array(n * h * w * cout),
    a.requiresGrad || b.requiresGrad
  );
  const pixels = n * h * w;
  for (let p = 0; p < pixels; p++) {
    out.data.set(a.data.subarray(p * ca, (p + 1) * ca), p * cout);
    out.data.set(b.data.subarray(p * cb, (p + 1) * cb), p * cout + ca);
  }
  record(out, () => {
    const g = out.grad!;
    if (a.requiresGrad) {
      const ga = a.ensureGrad();
      for (let p = 0; p < pixels; p++)
        for (let c = 0; c < ca; c++) ga[p * ca + c] += g[p * cout + c];
    }
    if (b.requiresGrad) {
      const gb = b.ensureGrad();
      for (let p = 0; p < pixels; p++)
        for (let c = 0; c < cb; c++) gb[p * cb + c] += g[p * cout + ca + c];
    }
  });
  return out;
}

/** 3x3 convolution, stride 1, zero padding, NHWC; kernel is [3,3,cin,cout]. */
export function conv3x3(x: Tensor, kernel: Tensor, bias: Tensor): Tensor {
  const [n, h, w, cin] = x.shape;
  const [kh, kw, kcin, cout] = kernel.shape;
  if (kh !== 3 || kw !== 3 || kcin !== cin) {
    throw new Error(`kernel [${kernel.shape}] does not fit input [${x.shape}]`);
  }
  if (bias.size !== cout) throw new Error('bias size mismatch');
  const requires = x.requiresGrad || kernel.requiresGrad || bias.requiresGrad;
  const out = new Tensor([n, h, w, cout], new Float32Array(n * h * w * cout), requires);
  const xd = x.data;
  const kd = kernel.data;
  const od = out.data;
  for (let b = 0; b < n; b++) {
    const xb = b * h * w * cin;
    const ob = b * h * w * cout;
    for (let i = 0; i < h; i++) {
      for (let j = 0; j < w; j++) {
        const oo = ob + (i * w + j) * cout;
        for (let co = 0; co < cout; co++) od[oo + co] = bias.data[co];
        for (let dy = -1; dy <= 1; dy++) {
          const ii = i + dy;
          if (ii < 0 || ii >= h) continue;
          for (let dx = -1; dx <= 1; dx++) {
            const jj = j + dx;
            if (jj < 0 || jj >= w) continue;
            const xo = xb + (ii * w + jj) * cin;
            const ko = ((dy + 1) * 3 + (dx + 1)) * cin * cout;
            for (let ci = 0; ci < cin; ci++) {
              const xv = xd[xo + ci];
              if (xv === 0) continue;
              const kb = ko + ci * cout;
              for (let co = 0; co < cout; co++) od[oo + co] += xv * kd[kb + co];
            }
          }
        }
      }
    }
  }
  record(out, () => {
    const g = out.grad!;
    const gx = x.requiresGrad ? x.ensureGrad() : null;
    const gk = kernel.requiresGrad ? kernel.ensureGrad() : null;
    const gb = bias.requiresGrad ? bias.ensureGrad() : null;
    if (gb) {
      for (let p = 0; p < n * h * w; p++)
        for (let co = 0; co < cout; co++) gb[co] += g[p * cout + co];
    }
    if (!gx && !gk) return;
    for (let b = 0; b < n; b++) {
      const xb = b * h * w * cin;
      const ob = b * h * w * cout;
      for (let i = 0; i < h; i++) {
        for (let j = 0; j < w; j++) {
          const oo = ob + (i * w + j) * cout;
          for (let dy = -1; dy <= 1; dy++) {
            const ii = i + dy;
            if (ii < 0 || ii >= h) continue;
            for (let dx = -1; dx <= 1; dx++) {
              const jj = j + dx;
              if (jj < 0 || jj >= w) continue;
              const xo = xb + (ii * w + jj) * cin;
              const ko = ((dy + 1) * 3 + (dx + 1)) * cin * cout;
              for (let ci = 0; ci < cin; ci++) {
                const kb = ko + ci * cout;
                let acc = 0;
                if (gk) {
                  const xv = xd[xo + ci];
                  for (let co = 0; co < cout; co++) {
                    const gv = g[oo + co];
                    gk[kb + co] += xv * gv;
                    acc += kd[kb + co] * gv;
                  }
                } else {
                  for (let co = 0; co < cout; co++) acc += kd[kb + co] * g[oo + co];
                }
                if (gx) gx[xo + ci] += acc;
              }
            }
          }
        }
      }
    }
  });
  return out;
}

/** 2x2 average pooling, stride 2; spatial dims must be even. */
export function avgPool2(x: Tensor): Tensor {
  const [n, h, w, c] = x.shape;
  if (h % 2 || w % 2) throw new Error(`avgPool2 needs even dims, got ${h}x${w}`);
  const oh = h / 2;
  const ow = w / 2;
  const out = new Tensor([n, oh, ow, c], new Float32Array(n * oh * ow * c), x.requiresGrad);
  for (let b = 0; b < n; b++) {
    for (let i = 0; i < oh; i++) {
      for (let j = 0; j < ow; j++) {
        const o = ((b * oh + i) * ow + j) * c;
        const i0 = ((b * h + 2 * i) * w + 2 * j) * c;
        const i1 = i0 + c;
        const i2 = i0 + w * c;
        const i3 = i2 + c;
        for (let ch = 0; ch < c; ch++) {
          out.data[o + ch] =
            0.25 * (x.data[i0 + ch] + x.data[i1 + ch] + x.data[i2 + ch] + x.data[i3 + ch]);
        }
      }
    }
  }
  record(out, () => {
    if (!x.requiresGrad) return;
    const g = out.grad!;
    const gx = x.ensureGrad();
    for (let b = 0; b < n; b++) {
      for (let i = 0; i < oh; i++) {
        for (let j = 0; j < ow; j++) {
          const o = ((b * oh + i) * ow + j) * c;
          const i0 = ((b * h + 2 * i) * w + 2 * j) * c;
          for (let ch = 0; ch < c; ch++) {
            const gv = 0.25 * g[o + ch];
            gx[i0 + ch] += gv;
            gx[i0 + c + ch] += gv;
            gx[i0 + w * c + ch] += gv;
            gx[i0 + w * c + c + ch] += gv;
          }
        }
      }
    }
  });
  return out;
}

// factor-2 bilinear weights with half-pixel centers: each output sample mixes
// its nearest source (3/4) with the next-nearest (1/4), clamped at the border
function up2Index(i: number, n: number): [number, number, number] {
  const main = i >> 1;
  const other = i % 2 === 0 ? Math.max(main - 1, 0) : Math.min(main + 1, n - 1);
  return [main, other, 0.75];
}

/** Bilinear 2x upsampling (separable, half-pixel centers). */
export function upBilinear2(x: Tensor): Tensor {
  const [n, h, w, c] = x.shape;
  const oh = h * 2;
  const ow = w * 2;
  const out = new Tensor([n, oh, ow, c], new Float32Array(n * oh * ow * c), x.requiresGrad);
  const rows = new Int32Array(oh * 2);
  const cols = new Int32Array(ow * 2);
  for (let i = 0; i < oh; i++) {
    const [m, o] = up2Index(i, h);
    rows[2 * i] = m;
    rows[2 * i + 1] = o;
  }
  for (let j = 0; j < ow; j++) {
    const [m, o] = up2Index(j, w);
    cols[2 * j] = m;
    cols[2 * j + 1] = o;
  }
  const mix = (
    target: Float32Array,
    source: Float32Array,
    write: boolean
  ) => {
    // write: forward out += w_i*w_j*x; else accumulate transpose into grad
    for (let b = 0; b < n; b++) {
      for (let i = 0; i < oh; i++) {
        const im = rows[2 * i];
        const io = rows[2 * i + 1];
        for (let j = 0; j < ow; j++) {
          const jm = cols[2 * j];
          const jo = cols[2 * j + 1];
          const o = ((b * oh + i) * ow + j) * c;
          const s00 = ((b * h + im) * w + jm) * c;
          const s01 = ((b * h + im) * w + jo) * c;
          const s10 = ((b * h + io) * w + jm) * c;
          const s11 = ((b * h + io) * w + jo) * c;
          for (let ch = 0; ch < c; ch++) {
            if (write) {
              target[o + ch] =
                0.5625 * source[s00 + ch] +
                0.1875 * (source[s01 + ch] + source[s10 + ch]) +
                0.0625 * source[s11 + ch];
            } else {
              const gv = source[o + ch];
              target[s00 + ch] += 0.5625 * gv;
              target[s01 + ch] += 0.1875 * gv;
              target[s10 + ch] += 0.1875 * gv;
              target[s11 + ch] += 0.0625 * gv;
            }
          }
        }
      }
    }
  };
  mix(out.data, x.data, true);
  record(out, () => {
    if (!x.requiresGrad) return;
    mix(x.ensureGrad(), out.grad!, false);
  });
  return out;
}

/**
 * 5-point Laplacian with reflecting boundaries (off-grid neighbors replicate
 * the edge pixel). The operator is symmetric, so the gradient is the same
 * stencil applied to the incoming gradient.
 */
export function laplacian(x: Tensor): Tensor {
  const [n, h, w, c] = x.shape;
  const out = new Tensor(x.shape.slice(), new Float32Array(x.size), x.requiresGrad);
  const apply = (dst: Float32Array, src: Float32Array) => {
    for (let b = 0; b < n; b++) {
      for (let i = 0; i < h; i++) {
        const iu = i > 0 ? i - 1 : 0;
        const id = i < h - 1 ? i + 1 : h - 1;
        for (let j = 0; j < w; j++) {
          const jl = j > 0 ? j - 1 : 0;
          const jr = j < w - 1 ? j + 1 : w - 1;
          const at = (ii: number, jj: number) => ((b * h + ii) * w + jj) * c;
          const o = at(i, j);
          for (let ch = 0; ch < c; ch++) {
            dst[o + ch] +=
              src[at(iu, j) + ch] +
              src[at(id, j) + ch] +
              src[at(i, jl) + ch] +
              src[at(i, jr) + ch] -
              4 * src[o + ch];
          }
        }
      }
    }
  };
  apply(out.data, x.data);
  record(out, () => {
    if (!x.requiresGrad) return;
    apply(x.ensureGrad(), out.grad!);
  });
  return out;
}

/**
 * Per-image density ceiling: multiply each image by min(d / mean(c_b), 1).
 * Gradient accounts for the dependence of the factor on the mean.
 */
export function rescaleToDensity(c: Tensor, d: number): Tensor {
  const [n] = c.shape;
  const per = c.size / n;
  const out = new Tensor(c.shape.slice(), new Float32Array(c.size), c.requiresGrad);
  const means = new Float32Array(n);
  const factors = new Float32Array(n);
  for (let b = 0; b < n; b++) {
    let sum = 0;
    for (let i = 0; i < per; i++) sum += c.data[b * per + i];
    means[b] = sum / per;
    factors[b] = means[b] > d ? d / means[b] : 1;
    for (let i = 0; i < per; i++) out.data[b * per + i] = c.data[b * per + i] * factors[b];
  }
  record(out, () => {
    if (!c.requiresGrad) return;
    const g = out.grad!;
    const gc = c.ensureGrad();
    for (let b = 0; b < n; b++) {
      const f = factors[b];
      if (f === 1) {
        for (let i = 0; i < per; i++) gc[b * per + i] += g[b * per + i];
      } else {
        // out = c * d / mean(c): product rule through the per-image mean
        let dot = 0;
        for (let i = 0; i < per; i++) dot += g[b * per + i] * c.data[b * per + i];
        const corr = (d / (per * means[b] * means[b])) * dot;
        for (let i = 0; i < per; i++) gc[b * per + i] += f * g[b * per + i] - corr;
      }
    }
  });
  return out;
}

/** Inverse-variance penalty 1 / (var(c) + eps) as a scalar tensor. */
export function varianceRegularizer(c: Tensor, epsilon: number): Tensor {
  let m = 0;
  for (let i = 0; i < c.size; i++) m += c.data[i];
  m /= c.size;
  let v = 0;
  for (let i = 0; i < c.size; i++) v += (c.data[i] - m) ** 2;
  v /= c.size;
  const r = 1 / (v + epsilon);
  const out = new Tensor([], Float32Array.of(r), c.requiresGrad);
  record(out, () => {
    if (!c.requiresGrad) return;
    const g = out.grad![0];
    const gc = c.ensureGrad();
    const coef = (-g * r * r * 2) / c.size;
    for (let i = 0; i < c.size; i++) gc[i] += coef * (c.data[i] - m);
  });
  return out;
}

/** Deterministic normal samples (mulberry32 + Box-Muller). */
export function randomNormal(shape: number[], std: number, seed: number): Float32Array {
  let a = seed >>> 0;
  const rng = () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
  const out = new Float32Array(numel(shape));
  for (let i = 0; i < out.length; i += 2) {
    const u1 = Math.max(rng(), 1e-12);
    const u2 = rng();
    const r = Math.sqrt(-2 * Math.log(u1));
    out[i] = r * Math.cos(2 * Math.PI * u2) * std;
    if (i + 1 < out.length) out[i + 1] = r * Math.sin(2 * Math.PI * u2) * std;
  }
  return out;
}

/** Adam with bias correction; one state slot per variable. */
export class Adam {
  readonly lr: number;
  private readonly beta1 = 0.9;
  private readonly beta2 = 0.999;
  private readonly eps = 1e-8;
  private t = 0;
  private readonly m = new Map<string, Float32Array>();
  private readonly v = new Map<string, Float32Array>();

  constructor(lr: number) {
    this.lr = lr;
  }

  applyGradients(vars: Variable[], grads: Map<string, Float32Array>): void {
    this.t++;
    const c1 = 1 - this.beta1 ** this.t;
    const c2 = 1 - this.beta2 ** this.t;
    for (const variable of vars) {
      const g = grads.get(variable.name);
      if (!g) throw new Error(`missing gradient for ${variable.name}`);
      let m = this.m.get(variable.name);
      let v = this.v.get(variable.name);
      if (!m) {
        m = new Float32Array(variable.size);
        v = new Float32Array(variable.size);
        this.m.set(variable.name, m);
        this.v.set(variable.name, v!);
      }
      for (let i = 0; i < variable.size; i++) {
        m[i] = this.beta1 * m[i] + (1 - this.beta1) * g[i];
        v![i] = this.beta2 * v![i] + (1 - this.beta2) * g[i] * g[i];
        variable.data[i] -= (this.lr * (m[i] / c1)) / (Math.sqrt(v![i] / c2) + this.eps);
      }
    }
  }
}
