/**
 * Feature extraction from a checkpoint at the family-specific layer: the
 * input of the classification head for CNNs (pre-fully-connected) and the
 * declared pre-MLP layer for transformer models.
 */

import * as tf from '@tensorflow/tfjs';
import { Checkpoint } from './checkpoint.js';
import { Image } from './images.js';

export type LayerSelector = 'cnn-pre-fc' | 'vit-pre-mlp';

const SELECTOR_FAMILY: Record<LayerSelector, 'cnn' | 'vit'> = {
  'cnn-pre-fc': 'cnn',
  'vit-pre-mlp': 'vit',
};

export class FeatureExtractor {
  private constructor(
    private readonly extractor: tf.LayersModel,
    readonly layerName: string,
    readonly inputHeight: number,
    readonly inputWidth: number,
  ) {}

  static fromCheckpoint(checkpoint: Checkpoint, selector: LayerSelector): FeatureExtractor {
    const { model, meta } = checkpoint;
    if (meta.family !== SELECTOR_FAMILY[selector]) {
      throw new Error(
        `layer selector ${selector} does not match checkpoint family '${meta.family}'`,
      );
    }
    return FeatureExtractor.atLayer(model, resolveFeatureLayer(model, selector, meta.featureLayer));
  }

  /** Joint-space embedding of an image tower: the declared feature layer if
   * any, otherwise the model's own output. */
  static fromModelOutput(checkpoint: Checkpoint): FeatureExtractor {
    const { model, meta } = checkpoint;
    const layer =
      meta.featureLayer !== undefined
        ? model.getLayer(meta.featureLayer)
        : model.layers[model.layers.length - 1];
    return FeatureExtractor.atLayer(model, layer);
  }

  private static atLayer(model: tf.LayersModel, layer: tf.layers.Layer): FeatureExtractor {
    const extractor = tf.model({ inputs: model.inputs, outputs: layer.output as tf.SymbolicTensor });
    const shape = model.inputs[0].shape; // [batch, height, width, channels]
    if (shape.length !== 4 || shape[3] !== 3) {
      throw new Error(`model input must be [batch, h, w, 3], got [${shape.join(', ')}]`);
    }
    return new FeatureExtractor(extractor, layer.name, shape[1] as number, shape[2] as number);
  }

  /** Flattened activations of the feature layer, one vector per image. */
  embed(images: Image[]): number[][] {
    if (images.length === 0) return [];
    return tf.tidy(() => {
      const batch = tf.stack(images.map((img) => this.toInput(img)));
      const features = this.extractor.predict(batch) as tf.Tensor;
      const flat = features.reshape([images.length, -1]);
      const values = flat.arraySync() as number[][];
      return values;
    });
  }

  private toInput(image: Image): tf.Tensor3D {
    const pixels = tf.tensor3d(
      Float32Array.from(image.data, (v) => v / 255),
      [image.height, image.width, 3],
    );
    if (image.height === this.inputHeight && image.width === this.inputWidth) {
      return pixels;
    }
    return tf.image.resizeBilinear(pixels, [this.inputHeight, this.inputWidth]);
  }
}

function resolveFeatureLayer(
  model: tf.LayersModel,
  selector: LayerSelector,
  declared: string | undefined,
): tf.layers.Layer {
  if (declared !== undefined) {
    return model.getLayer(declared);
  }
  if (selector === 'cnn-pre-fc') {
    // output of the last layer before the first dense (classification) layer
    const layers = model.layers;
    const firstDense = layers.findIndex((l) => l.getClassName() === 'Dense');
    if (firstDense > 0) {
      return layers[firstDense - 1];
    }
    if (firstDense === 0) {
      throw new Error('cannot take pre-fully-connected features: model starts with a dense layer');
    }
    return layers[layers.length - 1];
  }
  // transformer blocks vary too much to guess; require a named layer
  const candidate = model.layers.find((l) => /pre_mlp/i.test(l.name));
  if (candidate === undefined) {
    throw new Error(
      "vit-pre-mlp needs userDefinedMetadata.featureLayer or a layer named like 'pre_mlp'",
    );
  }
  return candidate;
}
