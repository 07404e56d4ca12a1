/** A LeNet-like CNN with named tap points after each conv activation.
 *
 * Layers are applied manually (instead of tf.sequential) so the forward
 * pass can hand back intermediate activations; the penalty and the
 * sparsity metrics both read those taps.
 */

import * as tf from '@tensorflow/tfjs';

export type ActivationName = 'relu' | 'elu' | 'mish';

export const ACTIVATIONS: ActivationName[] = ['relu', 'elu', 'mish'];

function activationFn(name: ActivationName): (t: tf.Tensor) => tf.Tensor {
  switch (name) {
    case 'relu':
      return (t) => tf.relu(t);
    case 'elu':
      return (t) => tf.elu(t);
    case 'mish':
      return (t) => tf.mul(t, tf.tanh(tf.softplus(t)));
  }
}

export interface ModelOptions {
  inputSize: number;
  classes: number;
  activation: ActivationName;
  seed: number;
}

export interface ForwardResult {
  logits: tf.Tensor2D;
  taps: Record<string, tf.Tensor>;
}

export class LenetModel {
  readonly tapNames = ['conv1', 'conv2'];
  readonly inputSize: number;
  readonly classes: number;
  readonly activation: ActivationName;
  private readonly act: (t: tf.Tensor) => tf.Tensor;
  private readonly conv1: tf.layers.Layer;
  private readonly conv2: tf.layers.Layer;
  private readonly pool1: tf.layers.Layer;
  private readonly pool2: tf.layers.Layer;
  private readonly flatten: tf.layers.Layer;
  private readonly fc1: tf.layers.Layer;
  private readonly fc2: tf.layers.Layer;

  constructor(options: ModelOptions) {
    this.inputSize = options.inputSize;
    this.classes = options.classes;
    this.activation = options.activation;
    this.act = activationFn(options.activation);
    const seed = options.seed;
    const init = (k: number) => tf.initializers.glorotUniform({
      seed: seed * 1000 + k,
    });
    this.conv1 = tf.layers.conv2d({
      filters: 4, kernelSize: 5, kernelInitializer: init(1),
    });
    this.pool1 = tf.layers.averagePooling2d({ poolSize: 2 });
    this.conv2 = tf.layers.conv2d({
      filters: 8, kernelSize: 3, kernelInitializer: init(2),
    });
    this.pool2 = tf.layers.averagePooling2d({ poolSize: 2 });
    this.flatten = tf.layers.flatten();
    this.fc1 = tf.layers.dense({ units: 32, kernelInitializer: init(3) });
    this.fc2 = tf.layers.dense({
      units: options.classes, kernelInitializer: init(4),
    });
    // materialize the weights now so the optimizer can list them
    tf.tidy(() => {
      this.forward(tf.zeros([1, this.inputSize, this.inputSize, 1]));
    });
  }

  forward(x: tf.Tensor4D | tf.Tensor): ForwardResult {
    let t = this.conv1.apply(x) as tf.Tensor;
    const tap1 = this.act(t);
    t = this.pool1.apply(tap1) as tf.Tensor;
    t = this.conv2.apply(t) as tf.Tensor;
    const tap2 = this.act(t);
    t = this.pool2.apply(tap2) as tf.Tensor;
    t = this.flatten.apply(t) as tf.Tensor;
    t = tf.relu(this.fc1.apply(t) as tf.Tensor);
    const logits = this.fc2.apply(t) as tf.Tensor2D;
    return { logits, taps: { conv1: tap1, conv2: tap2 } };
  }

  trainableVariables(): tf.Variable[] {
    const layers = [this.conv1, this.conv2, this.fc1, this.fc2];
    return layers.flatMap((l) => l.trainableWeights.map(
      (w) => (w as unknown as { val: tf.Variable }).val));
  }

  dispose(): void {
    for (const v of this.trainableVariables()) v.dispose();
  }
}
