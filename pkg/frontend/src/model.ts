import { add, concatC, rescaleToDensity, sigmoid, Tensor, Variable } from './engine';
import { UNet, UNetSpec } from './unet';

/**
 * Mask generator: image in, per-pixel mask probability out.
 *
 * Sigmoid bounds the output to (0, 1); if the per-image mean exceeds the
 * density budget the whole mask is scaled down multiplicatively. No lower
 * bound is enforced, the budget is a ceiling.
 */
export class MaskNet {
  readonly net: UNet;
  readonly density: number;

  constructor(spec: UNetSpec, density: number, seed: number) {
    if (!(density > 0 && density < 1)) {
      throw new Error(`density must be in (0, 1), got ${density}`);
    }
    this.net = new UNet(spec, seed, 'mask');
    this.density = density;
  }

  variables(): Variable[] {
    return this.net.variables();
  }

  /** f is [b, h, w, 1] in [0, 1]; returns c in [0, 1] with mean(c) <= d per image. */
  forward(f: Tensor): Tensor {
    return rescaleToDensity(sigmoid(this.net.apply(f)), this.density);
  }
}

/**
 * Surrogate solver: (image, mask) in, reconstruction out.
 *
 * Approximates the diffusion inpainting solution so that training never has
 * to backpropagate through an iterative numerical solver. Not meant for
 * standalone inpainting at test time.
 */
export class InpaintNet {
  readonly net: UNet;

  constructor(spec: UNetSpec, seed: number) {
    // zero head: the residual starts at exactly zero, so u = f at
    // initialization and early reconstructions are never wild
    this.net = new UNet(spec, seed, 'inpaint', 0);
  }

  variables(): Variable[] {
    return this.net.variables();
  }

  forward(f: Tensor, c: Tensor): Tensor {
    if (f.shape[1] !== c.shape[1] || f.shape[2] !== c.shape[2]) {
      throw new Error(`shape mismatch: image [${f.shape}] vs mask [${c.shape}]`);
    }
    // residual head: predicting u - f converges much faster than u
    return add(this.net.apply(concatC(f, c)), f);
  }
}
