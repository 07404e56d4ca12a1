/** The training loop: small CNN, cross-entropy plus the tap penalty.
 *
 * Everything is seeded (weight init, batch order) and runs on the pure
 * CPU backend, so a (seed, options) pair reproduces its metrics exactly.
 * With gamma = 0 the penalty branch is skipped entirely and the loop is
 * the plain baseline trainer.
 */

import * as tf from '@tensorflow/tfjs';

import { ImageSet, makeToyImageSet } from './data.js';
import { ActivationName, LenetModel } from './model.js';
import { PenaltyConfig, penaltyTerm, validatePenalty } from './penalty.js';
import { mulberry32, permutation } from './rng.js';

export class NonFiniteLoss extends Error {
  override name = 'NonFiniteLoss';
}

export interface TrainOptions {
  arch?: 'lenet';
  activation?: ActivationName;
  gamma: number;
  taps: string[];
  epochs: number;
  seed?: number;
  /** total training images for the built-in toy set (ignored with data) */
  images?: number;
  batchSize?: number;
  learningRate?: number;
  data?: ImageSet;
  label?: string;
}

export interface EpochMetrics {
  epoch: number;
  /** mean optimized objective over the epoch (includes the penalty) */
  trainLoss: number;
  testAccuracy: number;
  /** gamma * sum_j mean |x_j| measured on the test set */
  penalty: number;
  /** per-tap mean |activation| / implicit dim normalizer, on the test set */
  l1Dim: Record<string, number>;
  l1DimMean: number;
}

export interface MetricsRecord {
  label: string;
  arch: string;
  activation: ActivationName;
  gamma: number;
  taps: string[];
  epochs: number;
  seed: number;
  rows: EpochMetrics[];
}

const MAX_IMAGES = 5000;

function batchSlices(n: number, batchSize: number): [number, number][] {
  const out: [number, number][] = [];
  for (let i = 0; i < n; i += batchSize) {
    out.push([i, Math.min(batchSize, n - i)]);
  }
  return out;
}

/** Test accuracy plus per-tap mean |activation| in one pass. */
function evaluate(model: LenetModel, data: ImageSet, taps: string[],
                  batchSize: number):
    { accuracy: number; l1Dim: Record<string, number> } {
  const pixels = data.size * data.size;
  let correct = 0;
  const sums: Record<string, number> = {};
  const counts: Record<string, number> = {};
  for (const tap of taps) {
    sums[tap] = 0;
    counts[tap] = 0;
  }
  for (const [start, len] of batchSlices(data.testCount, batchSize)) {
    tf.tidy(() => {
      const xb = tf.tensor4d(
        data.testImages.subarray(start * pixels, (start + len) * pixels),
        [len, data.size, data.size, 1]);
      const out = model.forward(xb);
      const pred = tf.argMax(out.logits, 1).dataSync();
      for (let i = 0; i < len; i++) {
        if (pred[i] === data.testLabels[start + i]) correct++;
      }
      for (const tap of taps) {
        const t = out.taps[tap];
        sums[tap] += tf.sum(tf.abs(t)).dataSync()[0];
        counts[tap] += t.size;
      }
    });
  }
  const l1Dim: Record<string, number> = {};
  for (const tap of taps) l1Dim[tap] = sums[tap] / counts[tap];
  return { accuracy: correct / data.testCount, l1Dim };
}

export async function train(options: TrainOptions): Promise<MetricsRecord> {
  await tf.ready();
  const arch = options.arch ?? 'lenet';
  if (arch !== 'lenet') throw new RangeError(`unknown arch ${arch}`);
  const activation = options.activation ?? 'relu';
  const epochs = options.epochs;
  if (!Number.isInteger(epochs) || epochs < 1) {
    throw new RangeError('epochs must be a positive integer');
  }
  const seed = options.seed ?? 0;
  const batchSize = options.batchSize ?? 32;
  const learningRate = options.learningRate ?? 0.02;
  const images = options.images ?? 768;
  const data = options.data ?? makeToyImageSet({
    seed: seed + 1,
    trainPerClass: Math.floor(images / 4),
    testPerClass: Math.max(1, Math.floor(images / 12)),
  });
  if (data.trainCount > MAX_IMAGES) {
    throw new RangeError(
      `${data.trainCount} training images exceeds the desk-scale cap ` +
      `${MAX_IMAGES}`);
  }
  const penalty: PenaltyConfig = { gamma: options.gamma, taps: options.taps };

  const model = new LenetModel({
    inputSize: data.size, classes: data.classes, activation, seed,
  });
  validatePenalty(penalty, model.tapNames);
  const vars = model.trainableVariables();
  const optimizer = tf.train.adam(learningRate);
  const shuffle = mulberry32(seed + 2);
  const pixels = data.size * data.size;
  const rows: EpochMetrics[] = [];

  const xShuf = new Float32Array(data.trainCount * pixels);
  const yShuf = new Int32Array(data.trainCount);
  try {
    for (let epoch = 1; epoch <= epochs; epoch++) {
      const order = permutation(data.trainCount, shuffle);
      for (let i = 0; i < data.trainCount; i++) {
        const src = order[i];
        xShuf.set(
          data.trainImages.subarray(src * pixels, (src + 1) * pixels),
          i * pixels);
        yShuf[i] = data.trainLabels[src];
      }
      let lossSum = 0;
      let steps = 0;
      for (const [start, len] of batchSlices(data.trainCount, batchSize)) {
        const cost = tf.tidy(() => {
          const xb = tf.tensor4d(
            xShuf.subarray(start * pixels, (start + len) * pixels),
            [len, data.size, data.size, 1]);
          const yb = tf.oneHot(
            tf.tensor1d(yShuf.subarray(start, start + len), 'int32'),
            data.classes);
          return optimizer.minimize(() => {
            const out = model.forward(xb);
            const ce = tf.losses.softmaxCrossEntropy(yb, out.logits)
              .asScalar();
            if (penalty.gamma > 0) {
              return tf.add(ce, penaltyTerm(penalty, out.taps)) as tf.Scalar;
            }
            return ce;
          }, true, vars)!;
        });
        const value = cost.dataSync()[0];
        cost.dispose();
        if (!Number.isFinite(value)) {
          throw new NonFiniteLoss(
            `loss ${value} at epoch ${epoch} step ${steps} ` +
            `(gamma=${penalty.gamma}, lr=${learningRate})`);
        }
        lossSum += value;
        steps++;
      }
      const evalRes = evaluate(model, data, penalty.taps, 128);
      let l1Mean = 0;
      for (const tap of penalty.taps) l1Mean += evalRes.l1Dim[tap];
      rows.push({
        epoch,
        trainLoss: lossSum / steps,
        testAccuracy: evalRes.accuracy,
        penalty: penalty.gamma * l1Mean,
        l1Dim: evalRes.l1Dim,
        l1DimMean: l1Mean / penalty.taps.length,
      });
    }
  } finally {
    optimizer.dispose();
    model.dispose();
  }
  return {
    label: options.label ?? `gamma=${options.gamma}`,
    arch,
    activation,
    gamma: options.gamma,
    taps: [...options.taps],
    epochs,
    seed,
    rows,
  };
}
