/**
 * Embedding export: run every tagged image through the checkpoint's feature
 * layer and write one biaslens embedding record per image.
 */

import { readFileSync } from 'node:fs';
import { basename, join } from 'node:path';
import { loadCheckpoint } from './checkpoint.js';
import { EmbeddingRecord, Gender, Variant, writeEmbeddings } from './formats.js';
import { Image, listImages, readImage } from './images.js';
import { FeatureExtractor, LayerSelector } from './model.js';

export interface ImageTags {
  gender: Gender;
  class: string;
}

export interface ExportJob {
  checkpointDir: string;
  imagesDir: string;
  tagsPath: string;
  layerSelector: LayerSelector;
  variant: Variant;
  iteration: number;
  masked: boolean;
  outPath: string;
  /** defaults to the checkpoint's metadata name, then the directory name */
  modelId?: string;
  /** default class for tag rows that omit one */
  defaultClass?: string;
}

export interface ExportResult {
  written: number;
  dim: number;
  skipped: { file: string; reason: string }[];
}

/** tags file: CSV with header `file,gender[,class]`, one row per image. */
export function readTags(path: string, defaultClass?: string): Map<string, ImageTags> {
  const lines = readFileSync(path, 'utf-8').split('\n').filter((l) => l.trim().length > 0);
  if (lines.length === 0) throw new Error(`tags file ${path} is empty`);
  const header = lines[0].split(',').map((c) => c.trim());
  if (header[0] !== 'file' || header[1] !== 'gender' || (header.length > 2 && header[2] !== 'class')) {
    throw new Error(`tags file ${path} must start with header 'file,gender[,class]'`);
  }
  const tags = new Map<string, ImageTags>();
  for (const line of lines.slice(1)) {
    const cells = line.split(',').map((c) => c.trim());
    const [file, gender, cls] = cells;
    if (gender !== 'man' && gender !== 'woman') {
      throw new Error(`tags file ${path}: gender for ${file} must be man|woman, got '${gender}'`);
    }
    const classLabel = cls || defaultClass;
    if (classLabel === undefined) {
      throw new Error(`tags file ${path}: no class for ${file} and no default given`);
    }
    if (tags.has(file)) {
      throw new Error(`tags file ${path}: duplicate entry for ${file}`);
    }
    tags.set(file, { gender, class: classLabel });
  }
  return tags;
}

export async function exportEmbeddings(job: ExportJob): Promise<ExportResult> {
  const checkpoint = await loadCheckpoint(job.checkpointDir);
  const extractor = FeatureExtractor.fromCheckpoint(checkpoint, job.layerSelector);
  const modelId = job.modelId ?? checkpoint.meta.name ?? basename(job.checkpointDir);
  const tags = readTags(job.tagsPath, job.defaultClass);

  const skipped: { file: string; reason: string }[] = [];
  const files: string[] = [];
  const images: Image[] = [];
  for (const file of listImages(job.imagesDir)) {
    if (!tags.has(file)) {
      skipped.push({ file, reason: 'no tags entry' });
      continue;
    }
    try {
      images.push(readImage(join(job.imagesDir, file)));
      files.push(file);
    } catch (err) {
      skipped.push({ file, reason: (err as Error).message });
    }
  }
  if (files.length === 0) {
    throw new Error(`no usable images in ${job.imagesDir}`);
  }

  const vectors = extractor.embed(images);
  const condition = job.masked ? 'masked' : 'unmasked';
  const records: EmbeddingRecord[] = files.map((file, i) => {
    const tag = tags.get(file)!;
    return {
      id: `${modelId}:${job.variant}:it${job.iteration}:${condition}:${file}`,
      vec: vectors[i],
      gender: tag.gender,
      class: tag.class,
      masked: job.masked,
      model: modelId,
      family: checkpoint.meta.family,
      variant: job.variant,
      iteration: job.iteration,
    };
  });
  writeEmbeddings(records, job.outPath);
  return { written: records.length, dim: vectors[0].length, skipped };
}
