/** The normalized l1 feature penalty: gamma * sum_j ||x_j||_1 / dim(x_j).
 *
 * dim(x_j) is the per-sample element count of tap j, so each tap
 * contributes its mean absolute activation and no single wide layer can
 * dominate the term. Over a batch the penalty uses the batch mean,
 * which makes each tap term exactly tf.mean(|x_j|).
 */

import * as tf from '@tensorflow/tfjs';

import { ActivationName } from './model.js';

export class TapNotFound extends Error {
  override name = 'TapNotFound';
}

export interface PenaltyConfig {
  gamma: number;
  taps: string[];
}

/** Per-architecture gamma defaults for each activation. */
export function defaultGamma(activation: ActivationName): number {
  switch (activation) {
    case 'relu':
      return 1e-3;
    case 'elu':
      return 1e-2;
    case 'mish':
      return 1e-4;
  }
}

export function validatePenalty(config: PenaltyConfig,
                                available: string[]): void {
  if (!(config.gamma >= 0) || !Number.isFinite(config.gamma)) {
    throw new RangeError(`gamma must be finite and >= 0, got ${config.gamma}`);
  }
  if (config.taps.length === 0) {
    throw new TapNotFound('penalty needs at least one tap point');
  }
  for (const tap of config.taps) {
    if (!available.includes(tap)) {
      throw new TapNotFound(
        `tap ${tap} not in model (have: ${available.join(', ')})`);
    }
  }
}

/** gamma * sum over taps of mean |activation|, as a scalar tensor. */
export function penaltyTerm(config: PenaltyConfig,
                            taps: Record<string, tf.Tensor>): tf.Scalar {
  let total: tf.Scalar = tf.scalar(0);
  for (const name of config.taps) {
    const tap = taps[name];
    if (tap === undefined) {
      throw new TapNotFound(`tap ${name} missing from forward result`);
    }
    total = tf.add(total, tf.mean(tf.abs(tap)));
  }
  return tf.mul(total, config.gamma);
}
