/**
 * Writers for the biaslens ingest formats. The toolkit owns these contracts;
 * everything here must load there with zero violations.
 */

import { readFileSync, writeFileSync } from 'node:fs';

export type Gender = 'man' | 'woman';
export type Family = 'cnn' | 'vit';
export type Variant = 'biased' | 'unbiased';

export interface EmbeddingRecord {
  id: string;
  vec: number[];
  gender: Gender;
  class: string;
  masked: boolean;
  model: string;
  family: Family;
  variant: Variant;
  iteration: number;
}

export interface PredictionRow {
  imageId: string;
  gender: Gender;
  label: string;
  encoder: string;
  family: Family;
}

const EMB_FORMAT = 'biaslens-emb';
const EMB_VERSION = 1;

export function writeEmbeddings(records: EmbeddingRecord[], path: string): void {
  if (records.length === 0) {
    throw new Error('refusing to write an empty embedding file');
  }
  const dim = records[0].vec.length;
  const ids = new Set<string>();
  for (const record of records) {
    if (record.vec.length !== dim) {
      throw new Error(
        `record ${record.id}: vec length ${record.vec.length} does not match dim ${dim}`,
      );
    }
    if (!record.vec.every(Number.isFinite)) {
      throw new Error(`record ${record.id}: vec contains non-finite values`);
    }
    if (record.vec.every((x) => x === 0)) {
      throw new Error(`record ${record.id}: vec is the zero vector`);
    }
    if (ids.has(record.id)) {
      throw new Error(`duplicate record id ${record.id}`);
    }
    ids.add(record.id);
  }
  const lines = [
    JSON.stringify({ format: EMB_FORMAT, version: EMB_VERSION, dim, count: records.length }),
    ...records.map((r) =>
      JSON.stringify({
        id: r.id,
        vec: r.vec,
        gender: r.gender,
        class: r.class,
        masked: r.masked,
        model: r.model,
        family: r.family,
        variant: r.variant,
        iteration: r.iteration,
      }),
    ),
  ];
  writeFileSync(path, lines.join('\n') + '\n', 'utf-8');
}

function csvCell(value: string): string {
  return /[",\n]/.test(value) ? `"${value.replaceAll('"', '""')}"` : value;
}

export function writePredictions(rows: PredictionRow[], path: string): void {
  const lines = ['image_id,gender,label,encoder,family'];
  for (const row of rows) {
    lines.push(
      [row.imageId, row.gender, row.label, row.encoder, row.family].map(csvCell).join(','),
    );
  }
  writeFileSync(path, lines.join('\n') + '\n', 'utf-8');
}

/** One lowercase label per line, blanks skipped (the biaslens vocabulary format). */
export function readVocabulary(path: string): string[] {
  const labels = readFileSync(path, 'utf-8')
    .split('\n')
    .map((line) => line.trim().toLowerCase())
    .filter((line) => line.length > 0);
  if (labels.length === 0) {
    throw new Error(`vocabulary file ${path} holds no labels`);
  }
  const seen = new Set<string>();
  for (const label of labels) {
    if (seen.has(label)) {
      throw new Error(`duplicate vocabulary label '${label}'`);
    }
    seen.add(label);
  }
  return labels;
}
