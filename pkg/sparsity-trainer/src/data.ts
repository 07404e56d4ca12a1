/** Synthetic toy image set: oriented gratings, one orientation per class.
 *
 * Small enough to train a CNN on the CPU backend in seconds while still
 * needing real convolutional features, which is all the sparsity
 * experiment requires. Full-scale datasets are out of scope here.
 */

import { gaussian, mulberry32 } from './rng.js';

export interface ImageSet {
  /** side length of the square grayscale images */
  size: number;
  classes: number;
  trainImages: Float32Array;
  trainLabels: Int32Array;
  trainCount: number;
  testImages: Float32Array;
  testLabels: Int32Array;
  testCount: number;
}

export interface ToyOptions {
  seed?: number;
  trainPerClass?: number;
  testPerClass?: number;
  size?: number;
  classes?: number;
  noise?: number;
}

function renderGrating(
  out: Float32Array,
  offset: number,
  size: number,
  angle: number,
  freq: number,
  phase: number,
  noise: number,
  gauss: () => number,
): void {
  const c = Math.cos(angle);
  const s = Math.sin(angle);
  const half = (size - 1) / 2;
  for (let y = 0; y < size; y++) {
    for (let x = 0; x < size; x++) {
      const u = ((x - half) * c + (y - half) * s) / size;
      out[offset + y * size + x] =
        Math.cos(2 * Math.PI * freq * u + phase) + noise * gauss();
    }
  }
}

/** Build a balanced, seeded train/test split of oriented gratings. */
export function makeToyImageSet(options: ToyOptions = {}): ImageSet {
  const seed = options.seed ?? 0;
  const trainPerClass = options.trainPerClass ?? 192;
  const testPerClass = options.testPerClass ?? 64;
  const size = options.size ?? 16;
  const classes = options.classes ?? 4;
  const noise = options.noise ?? 0.3;
  if (trainPerClass < 1 || testPerClass < 1) {
    throw new RangeError('per-class counts must be positive');
  }
  const uniform = mulberry32(seed);
  const gauss = gaussian(uniform);
  const pixels = size * size;

  const fill = (perClass: number, images: Float32Array, labels: Int32Array) => {
    let i = 0;
    for (let cls = 0; cls < classes; cls++) {
      const angle = (Math.PI * cls) / classes;
      for (let k = 0; k < perClass; k++, i++) {
        const freq = 2 + uniform();
        const phase = 2 * Math.PI * uniform();
        renderGrating(images, i * pixels, size, angle, freq, phase, noise,
                      gauss);
        labels[i] = cls;
      }
    }
  };

  const trainCount = trainPerClass * classes;
  const testCount = testPerClass * classes;
  const set: ImageSet = {
    size,
    classes,
    trainImages: new Float32Array(trainCount * pixels),
    trainLabels: new Int32Array(trainCount),
    trainCount,
    testImages: new Float32Array(testCount * pixels),
    testLabels: new Int32Array(testCount),
    testCount,
  };
  fill(trainPerClass, set.trainImages, set.trainLabels);
  fill(testPerClass, set.testImages, set.testLabels);
  return set;
}
