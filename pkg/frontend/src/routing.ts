import { backward, Tensor, Variable } from './engine';

export interface RoutedResult {
  value: number;
  /** Gradient for every variable: computed on-route, exact zeros off-route. */
  grads: Map<string, Float32Array>;
}

/**
 * Compute gradients of a loss restricted to one sub-network.
 *
 * Off-route variables get exact-zero gradient arrays by construction; their
 * tape gradients are never read, so an optimizer fed this map provably never
 * moves them. This implements the split update scheme where the
 * reconstruction loss trains the mask generator while the equation-residual
 * loss trains the surrogate solver.
 */
export function routedGradients(
  lossFn: () => Tensor,
  onRoute: Variable[],
  offRoute: Variable[]
): RoutedResult {
  const value = backward(lossFn);
  const grads = new Map<string, Float32Array>();
  for (const v of onRoute) {
    grads.set(v.name, v.grad ? v.grad.slice() : new Float32Array(v.size));
  }
  for (const v of offRoute) {
    grads.set(v.name, new Float32Array(v.size));
  }
  // clear accumulators so the next tape starts clean
  for (const v of [...onRoute, ...offRoute]) v.grad = null;
  return { value, grads };
}
