import { spawnSync } from 'node:child_process';
import { mkdirSync, writeFileSync } from 'node:fs';
import { dirname, join, resolve } from 'node:path';
import { fileURLToPath } from 'node:url';
import * as tf from '@tensorflow/tfjs';
import { CheckpointMetadata, saveCheckpoint } from '../src/checkpoint.js';
import { Image, writeImage } from '../src/images.js';

export const REPO_ROOT = resolve(dirname(fileURLToPath(import.meta.url)), '..', '..');
export const OCCUPATIONS = join(REPO_ROOT, 'src', 'biaslens', 'data', 'occupations.txt');

/** small conv net: conv -> flatten -> dense features -> softmax head */
export async function makeCnnCheckpoint(dir: string, name = 'tiny_cnn'): Promise<void> {
  const model = tf.sequential();
  model.add(tf.layers.conv2d({
    inputShape: [8, 8, 3], filters: 4, kernelSize: 3, activation: 'relu', name: 'conv1',
  }));
  model.add(tf.layers.flatten({ name: 'flatten' }));
  model.add(tf.layers.dense({ units: 6, activation: 'relu', name: 'head_dense' }));
  model.add(tf.layers.dense({ units: 4, activation: 'softmax', name: 'classifier' }));
  await saveCheckpoint(model, { family: 'cnn', name }, dir);
}

/** dense stack standing in for a transformer tower, pre-MLP layer named */
export async function makeVitCheckpoint(
  dir: string, opts: { declareFeatureLayer?: boolean; name?: string } = {},
): Promise<void> {
  const model = tf.sequential();
  model.add(tf.layers.flatten({ inputShape: [8, 8, 3], name: 'patchify' }));
  model.add(tf.layers.dense({ units: 12, activation: 'relu', name: 'encoder_block' }));
  model.add(tf.layers.dense({ units: 5, activation: 'linear', name: 'pre_mlp' }));
  model.add(tf.layers.dense({ units: 4, activation: 'softmax', name: 'mlp_head' }));
  const meta: CheckpointMetadata = { family: 'vit', name: opts.name ?? 'tiny_vit' };
  if (opts.declareFeatureLayer) meta.featureLayer = 'pre_mlp';
  await saveCheckpoint(model, meta, dir);
}

/**
 * image tower whose embedding is the per-channel mean: a solid red image
 * maps to [1,0,0], green to [0,1,0], blue to [0,0,1].
 */
export async function makeChannelMeanEncoder(
  dir: string, family: 'cnn' | 'vit' = 'cnn', name = 'toy_encoder',
): Promise<void> {
  const model = tf.sequential();
  model.add(tf.layers.flatten({ inputShape: [4, 4, 3], name: 'flatten' }));
  model.add(tf.layers.dense({ units: 3, useBias: false, name: 'project' }));
  const weights = Array.from({ length: 48 }, (_, i) =>
    [0, 1, 2].map((c) => (i % 3 === c ? 1 / 16 : 0)),
  );
  model.getLayer('project').setWeights([tf.tensor2d(weights)]);
  const meta: CheckpointMetadata =
    family === 'vit'
      ? { family, name, featureLayer: 'project' }
      : { family, name };
  await saveCheckpoint(model, meta, dir);
}

export function solidImage(width: number, height: number, rgb: [number, number, number]): Image {
  const data = new Uint8Array(width * height * 3);
  for (let i = 0; i < width * height; i++) {
    data[i * 3] = rgb[0];
    data[i * 3 + 1] = rgb[1];
    data[i * 3 + 2] = rgb[2];
  }
  return { width, height, data };
}

export function writeSolidImage(
  path: string, width: number, height: number, rgb: [number, number, number],
): void {
  writeImage(solidImage(width, height, rgb), path);
}

export function writeTags(
  path: string, rows: { file: string; gender: 'man' | 'woman'; class?: string }[],
): void {
  const lines = ['file,gender,class'];
  for (const row of rows) {
    lines.push(`${row.file},${row.gender},${row.class ?? ''}`);
  }
  writeFileSync(path, lines.join('\n') + '\n');
}

export function makeImageDir(
  dir: string,
  specs: { file: string; rgb: [number, number, number]; size?: number }[],
): void {
  mkdirSync(dir, { recursive: true });
  for (const spec of specs) {
    const size = spec.size ?? 8;
    writeSolidImage(join(dir, spec.file), size, size, spec.rgb);
  }
}

/** Run the installed biaslens CLI; the primary toolkit is the oracle here. */
export function runBiaslens(args: string[]): { status: number; stdout: string; stderr: string } {
  const run = spawnSync('biaslens', args, { encoding: 'utf-8' });
  if (run.error) {
    throw new Error(`biaslens CLI not runnable (pip install -e . first): ${run.error.message}`);
  }
  return { status: run.status ?? 127, stdout: run.stdout, stderr: run.stderr };
}
