import {
  avgPool2,
  concatC,
  conv3x3,
  randomNormal,
  relu,
  Tensor,
  upBilinear2,
  Variable,
} from './engine';

export interface UNetSpec {
  scales: number;
  layersPerScale: number;
  /** Channels at the finest scale; doubled on every coarser scale. */
  baseChannels: number;
  inChannels: number;
  outChannels: number;
}

export function deskSpec(inChannels: number): UNetSpec {
  return { scales: 2, layersPerScale: 2, baseChannels: 4, inChannels, outChannels: 1 };
}

export function fullSpec(inChannels: number): UNetSpec {
  return { scales: 5, layersPerScale: 3, baseChannels: 10, inChannels, outChannels: 1 };
}

interface ConvParams {
  kernel: Variable;
  bias: Variable;
}

export class UNet {
  readonly spec: UNetSpec;
  private readonly down: ConvParams[][] = [];
  private readonly up: ConvParams[][] = [];
  private readonly head: ConvParams;

  constructor(spec: UNetSpec, seed: number, namePrefix: string, headStd?: number) {
    if (spec.scales < 1) throw new Error(`scales must be >= 1, got ${spec.scales}`);
    this.spec = spec;
    let idx = 0;
    const mk = (inC: number, outC: number, stdOverride?: number): ConvParams => {
      // He-style fan-in scaling keeps activations bounded at init
      const std = stdOverride ?? Math.sqrt(2 / (9 * inC));
      const kernel = new Variable(
        `${namePrefix}/conv${idx}/kernel`,
        [3, 3, inC, outC],
        randomNormal([3, 3, inC, outC], std, seed * 7919 + idx)
      );
      const bias = new Variable(
        `${namePrefix}/conv${idx}/bias`,
        [outC],
        new Float32Array(outC)
      );
      idx++;
      return { kernel, bias };
    };

    const chans = (s: number) => spec.baseChannels * 2 ** s;
    for (let s = 0; s < spec.scales; s++) {
      const block: ConvParams[] = [];
      for (let l = 0; l < spec.layersPerScale; l++) {
        const inC = l === 0 ? (s === 0 ? spec.inChannels : chans(s - 1)) : chans(s);
        block.push(mk(inC, chans(s)));
      }
      this.down.push(block);
    }
    for (let s = spec.scales - 2; s >= 0; s--) {
      const block: ConvParams[] = [];
      for (let l = 0; l < spec.layersPerScale; l++) {
        // first layer of each block sees the upsampled map plus the skip
        const inC = l === 0 ? chans(s + 1) + chans(s) : chans(s);
        block.push(mk(inC, chans(s)));
      }
      this.up.push(block);
    }
    this.head = mk(chans(0), spec.outChannels, headStd);
  }

  variables(): Variable[] {
    const all: Variable[] = [];
    for (const block of [...this.down, ...this.up, [this.head]]) {
      for (const p of block) all.push(p.kernel, p.bias);
    }
    return all;
  }

  /** Raw (pre-activation) output; input and output are [b, h, w, c]. */
  apply(x: Tensor): Tensor {
    const skips: Tensor[] = [];
    let t = x;
    for (let s = 0; s < this.spec.scales; s++) {
      for (const p of this.down[s]) t = relu(conv3x3(t, p.kernel, p.bias));
      if (s < this.spec.scales - 1) {
        skips.push(t);
        t = avgPool2(t);
      }
    }
    for (let i = 0; i < this.up.length; i++) {
      const skip = skips[skips.length - 1 - i];
      t = concatC(upBilinear2(t), skip);
      for (const p of this.up[i]) t = relu(conv3x3(t, p.kernel, p.bias));
    }
    return conv3x3(t, this.head.kernel, this.head.bias);
  }
}
