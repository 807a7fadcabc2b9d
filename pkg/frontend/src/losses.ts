import {
  laplacian,
  mean,
  mul,
  oneMinus,
  square,
  sub,
  Tensor,
  varianceRegularizer as varReg,
} from './engine';

export const EPSILON = 1e-8;

/** Mean squared error between a reconstruction and the original. */
export function inpaintingLoss(u: Tensor, f: Tensor): Tensor {
  return mean(square(sub(u, f)));
}

/**
 * Inverse-variance mask penalty: 1 / (var(c) + eps).
 *
 * Flat masks have zero variance and are punished hardest, which is exactly
 * the degenerate optimum the mask generator falls into without this term.
 */
export function varianceRegularizer(c: Tensor, epsilon: number = EPSILON): Tensor {
  return varReg(c, epsilon);
}

/**
 * Residual of the inpainting equation, (1 - c) * (A u) - c * (u - f),
 * squared and averaged. Zero iff u solves the equation exactly for mask c.
 */
export function residualLoss(u: Tensor, f: Tensor, c: Tensor): Tensor {
  const r = sub(mul(oneMinus(c), laplacian(u)), mul(c, sub(u, f)));
  return mean(square(r));
}
