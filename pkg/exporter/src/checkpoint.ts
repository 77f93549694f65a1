/**
 * Checkpoint IO for tfjs layers models in the standard file layout
 * (model.json plus binary weight shards), usable without the node backend.
 * Checkpoints declare their architecture family and optionally the feature
 * layer in userDefinedMetadata.
 */

import { readFileSync, writeFileSync, mkdirSync } from 'node:fs';
import { join } from 'node:path';
import * as tf from '@tensorflow/tfjs';
import { z } from 'zod';

export const checkpointMetadataSchema = z.object({
  family: z.enum(['cnn', 'vit']),
  name: z.string().optional(),
  featureLayer: z.string().optional(),
});

export type CheckpointMetadata = z.infer<typeof checkpointMetadataSchema>;

export interface Checkpoint {
  model: tf.LayersModel;
  meta: CheckpointMetadata;
}

export async function loadCheckpoint(dir: string): Promise<Checkpoint> {
  const manifestPath = join(dir, 'model.json');
  const manifest = JSON.parse(readFileSync(manifestPath, 'utf-8'));
  const weightSpecs: tf.io.WeightsManifestEntry[] = [];
  const shards: Buffer[] = [];
  for (const group of manifest.weightsManifest ?? []) {
    weightSpecs.push(...group.weights);
    for (const path of group.paths) {
      shards.push(readFileSync(join(dir, path)));
    }
  }
  const weightData = Buffer.concat(shards);
  const model = await tf.loadLayersModel({
    load: async () => ({
      modelTopology: manifest.modelTopology,
      format: manifest.format,
      generatedBy: manifest.generatedBy,
      weightSpecs,
      weightData: weightData.buffer.slice(
        weightData.byteOffset,
        weightData.byteOffset + weightData.byteLength,
      ),
      userDefinedMetadata: manifest.userDefinedMetadata,
    }),
  });
  const parsed = checkpointMetadataSchema.safeParse(manifest.userDefinedMetadata ?? {});
  if (!parsed.success) {
    throw new Error(
      `checkpoint ${dir} lacks valid metadata (need userDefinedMetadata.family cnn|vit): ` +
        parsed.error.message,
    );
  }
  return { model, meta: parsed.data };
}

export async function saveCheckpoint(
  model: tf.LayersModel,
  meta: CheckpointMetadata,
  dir: string,
): Promise<void> {
  mkdirSync(dir, { recursive: true });
  await model.save({
    save: async (artifacts) => {
      const weightData = artifacts.weightData as ArrayBuffer;
      writeFileSync(join(dir, 'weights.bin'), Buffer.from(weightData));
      const manifest = {
        modelTopology: artifacts.modelTopology,
        format: artifacts.format,
        generatedBy: artifacts.generatedBy,
        userDefinedMetadata: meta,
        weightsManifest: [{ paths: ['weights.bin'], weights: artifacts.weightSpecs }],
      };
      writeFileSync(join(dir, 'model.json'), JSON.stringify(manifest));
      return {
        modelArtifactsInfo: {
          dateSaved: new Date(),
          modelTopologyType: 'JSON' as const,
        },
      };
    },
  });
}
