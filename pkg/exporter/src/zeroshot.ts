/**
 * Zero-shot prediction over a label vocabulary: the checkpoint's image
 * embedding is scored by cosine against precomputed text embeddings, and the
 * best label wins. Text embeddings are supplied as a bank file produced by
 * the matching text encoder; the bank records the prompt template it used
 * (conventionally "a photo of a {label}").
 */

import { readFileSync } from 'node:fs';
import { basename, join } from 'node:path';
import { z } from 'zod';
import { loadCheckpoint } from './checkpoint.js';
import { Gender, PredictionRow, writePredictions } from './formats.js';
import { Image, listImages, readImage } from './images.js';
import { FeatureExtractor } from './model.js';
import { readTags } from './embeddings.js';

export const textBankSchema = z.object({
  format: z.literal('biaslens-text-emb'),
  version: z.literal(1),
  template: z.string(),
  dim: z.number().int().positive(),
  embeddings: z.record(z.string(), z.array(z.number())),
});

export type TextBank = z.infer<typeof textBankSchema>;

export function readTextBank(path: string): TextBank {
  const bank = textBankSchema.parse(JSON.parse(readFileSync(path, 'utf-8')));
  for (const [label, vec] of Object.entries(bank.embeddings)) {
    if (vec.length !== bank.dim) {
      throw new Error(`text bank ${path}: embedding for '${label}' has length ${vec.length}, dim is ${bank.dim}`);
    }
  }
  return bank;
}

export interface ZeroShotJob {
  checkpointDir: string;
  imagesDir: string;
  tagsPath: string;
  textBankPath: string;
  vocabulary: string[];
  outPath: string;
  encoderId?: string;
}

export interface ZeroShotResult {
  written: number;
  template: string;
  skipped: { file: string; reason: string }[];
}

function normalize(vec: number[]): number[] {
  const norm = Math.sqrt(vec.reduce((acc, x) => acc + x * x, 0));
  if (norm === 0) throw new Error('zero embedding cannot be scored');
  return vec.map((x) => x / norm);
}

export async function exportZeroShot(job: ZeroShotJob): Promise<ZeroShotResult> {
  if (job.vocabulary.length === 0) {
    throw new Error('vocabulary is empty');
  }
  const bank = readTextBank(job.textBankPath);
  const missing = job.vocabulary.filter((label) => !(label in bank.embeddings));
  if (missing.length > 0) {
    throw new Error(
      `text bank lacks embeddings for ${missing.length} vocabulary labels ` +
        `(first: '${missing[0]}'); regenerate it with template '${bank.template}'`,
    );
  }

  const checkpoint = await loadCheckpoint(job.checkpointDir);
  const extractor = FeatureExtractor.fromModelOutput(checkpoint);
  const encoderId = job.encoderId ?? checkpoint.meta.name ?? basename(job.checkpointDir);
  const tags = readTags(job.tagsPath, 'unused');

  // vocabulary order, labels pre-normalized; ties break toward the earlier
  // label after sorting, so predictions are deterministic
  const labels = [...job.vocabulary].sort();
  const text = labels.map((label) => normalize(bank.embeddings[label]));

  const skipped: { file: string; reason: string }[] = [];
  const files: string[] = [];
  const images: Image[] = [];
  const genders: Gender[] = [];
  for (const file of listImages(job.imagesDir)) {
    const tag = tags.get(file);
    if (tag === undefined) {
      skipped.push({ file, reason: 'no tags entry' });
      continue;
    }
    try {
      images.push(readImage(join(job.imagesDir, file)));
      files.push(file);
      genders.push(tag.gender);
    } catch (err) {
      skipped.push({ file, reason: (err as Error).message });
    }
  }
  if (files.length === 0) {
    throw new Error(`no usable images in ${job.imagesDir}`);
  }

  const vectors = extractor.embed(images);
  if (vectors[0].length !== bank.dim) {
    throw new Error(
      `image embeddings have dim ${vectors[0].length}, text bank has dim ${bank.dim}`,
    );
  }
  const rows: PredictionRow[] = files.map((file, i) => {
    const image = normalize(vectors[i]);
    let best = 0;
    let bestScore = -Infinity;
    for (let j = 0; j < labels.length; j++) {
      const score = text[j].reduce((acc, x, k) => acc + x * image[k], 0);
      if (score > bestScore) {
        bestScore = score;
        best = j;
      }
    }
    return {
      imageId: file,
      gender: genders[i],
      label: labels[best],
      encoder: encoderId,
      family: checkpoint.meta.family,
    };
  });
  writePredictions(rows, job.outPath);
  return { written: rows.length, template: bank.template, skipped };
}
