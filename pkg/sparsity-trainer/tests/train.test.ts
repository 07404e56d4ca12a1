import { describe, expect, it } from 'vitest';

import { ImageSet, makeToyImageSet } from '../src/data.js';
import { TapNotFound } from '../src/penalty.js';
import { NonFiniteLoss, train } from '../src/train.js';

// a dataset small enough for a couple-of-seconds training run
const tiny = () => makeToyImageSet({ seed: 4, trainPerClass: 24,
                                     testPerClass: 8 });

describe('training loop', () => {
  it('reproduces metrics exactly for a fixed seed', async () => {
    const opts = {
      gamma: 1e-3, taps: ['conv1', 'conv2'], epochs: 2, seed: 11,
      data: tiny(),
    };
    const a = await train(opts);
    const b = await train({ ...opts, data: tiny() });
    expect(a.rows).toEqual(b.rows);
    expect(a.rows.length).toBe(2);
    expect(a.label).toBe('gamma=0.001');
  });

  it('records an exactly zero penalty on the gamma zero path', async () => {
    const rec = await train({
      gamma: 0, taps: ['conv1', 'conv2'], epochs: 2, seed: 1, data: tiny(),
    });
    for (const row of rec.rows) {
      expect(row.penalty).toBe(0);
      expect(row.l1DimMean).toBeGreaterThan(0);
    }
  });

  it('rejects unknown taps and bad options', async () => {
    const data = tiny();
    await expect(train({ gamma: 0, taps: ['conv7'], epochs: 1, data }))
      .rejects.toThrow(TapNotFound);
    await expect(train({ gamma: -1, taps: ['conv1'], epochs: 1, data }))
      .rejects.toThrow(RangeError);
    await expect(train({ gamma: 0, taps: ['conv1'], epochs: 0, data }))
      .rejects.toThrow(/positive integer/);
    await expect(train({
      arch: 'vgg' as never, gamma: 0, taps: ['conv1'], epochs: 1, data,
    })).rejects.toThrow(/unknown arch/);
  });

  it('enforces the desk-scale image cap', async () => {
    const data = tiny();
    const huge: ImageSet = { ...data, trainCount: 5001 };
    await expect(train({ gamma: 0, taps: ['conv1'], epochs: 1, data: huge }))
      .rejects.toThrow(/desk-scale cap/);
  });

  it('aborts with diagnostics when the loss leaves the reals', async () => {
    const data = tiny();
    const poisoned: ImageSet = {
      ...data,
      trainImages: Float32Array.from(data.trainImages),
    };
    poisoned.trainImages[5] = NaN;
    await expect(train({
      gamma: 1e-3, taps: ['conv1'], epochs: 1, seed: 2, data: poisoned,
    })).rejects.toThrow(NonFiniteLoss);
    await expect(train({
      gamma: 1e-3, taps: ['conv1'], epochs: 1, seed: 2, data: poisoned,
    })).rejects.toThrow(/epoch 1/);
  });
});
