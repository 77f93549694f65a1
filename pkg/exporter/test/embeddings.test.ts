import { mkdtempSync, readFileSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { beforeAll, describe, expect, it } from 'vitest';
import { exportEmbeddings, readTags } from '../src/embeddings.js';
import {
  makeCnnCheckpoint,
  makeImageDir,
  makeVitCheckpoint,
  runBiaslens,
  writeTags,
} from './helpers.js';

let root: string;
let cnnDir: string;
let imagesDir: string;
let tagsPath: string;

const IMAGES: { file: string; rgb: [number, number, number] }[] = [];
for (let i = 0; i < 8; i++) {
  IMAGES.push({ file: `aman${i}.png`, rgb: [200, 40 + i * 5, 40] });
  IMAGES.push({ file: `awoman${i}.png`, rgb: [40, 40 + i * 5, 200] });
}
for (let i = 0; i < 2; i++) {
  IMAGES.push({ file: `cman${i}.ppm`, rgb: [120, 160, 40 + i * 10] });
  IMAGES.push({ file: `cwoman${i}.ppm`, rgb: [120, 40 + i * 10, 160] });
}

beforeAll(async () => {
  root = mkdtempSync(join(tmpdir(), 'emb-'));
  cnnDir = join(root, 'cnn_ckpt');
  await makeCnnCheckpoint(cnnDir);
  imagesDir = join(root, 'images');
  makeImageDir(imagesDir, IMAGES);
  tagsPath = join(root, 'tags.csv');
  writeTags(
    tagsPath,
    IMAGES.map(({ file }) => ({
      file,
      gender: file.includes('woman') ? ('woman' as const) : ('man' as const),
      class: file.startsWith('c') ? 'ceo' : 'person',
    })),
  );
});

function baseJob(outPath: string) {
  return {
    checkpointDir: cnnDir,
    imagesDir,
    tagsPath,
    layerSelector: 'cnn-pre-fc' as const,
    variant: 'unbiased' as const,
    iteration: 1,
    masked: false,
    outPath,
  };
}

describe('exportEmbeddings', () => {
  it('writes one record per image with a uniform dimension', async () => {
    const out = join(root, 'pool.embj');
    const result = await exportEmbeddings(baseJob(out));
    expect(result.written).toBe(20);
    expect(result.skipped).toEqual([]);

    const lines = readFileSync(out, 'utf-8').trim().split('\n');
    const header = JSON.parse(lines[0]);
    expect(header).toMatchObject({ format: 'biaslens-emb', version: 1, count: 20 });
    const records = lines.slice(1).map((l) => JSON.parse(l));
    expect(records).toHaveLength(20);
    for (const record of records) {
      expect(record.vec).toHaveLength(header.dim);
      expect(record.model).toBe('tiny_cnn');
      expect(record.family).toBe('cnn');
      expect(record.masked).toBe(false);
    }
    expect(new Set(records.map((r) => r.class))).toEqual(new Set(['person', 'ceo']));
  });

  it('round-trips through biaslens validate with zero violations', async () => {
    const out = join(root, 'roundtrip.embj');
    await exportEmbeddings(baseJob(out));
    const manifest = join(root, 'sets.manifest');
    writeFileSync(
      manifest,
      [
        '[attributes]', 'class = person', 'size_per_gender = 8', '',
        '[targets.ceo]', 'size_per_gender = 2', '',
        '[protocol]', 'iterations = 1', 'masked = false', '',
      ].join('\n'),
    );
    const check = runBiaslens(['validate', '--embeddings', out, '--manifest', manifest]);
    expect(check.stderr).toBe('');
    expect(check.status).toBe(0);
    expect(check.stdout.trim()).toBe('0 violations');
  });

  it('is deterministic across runs', async () => {
    const a = join(root, 'det_a.embj');
    const b = join(root, 'det_b.embj');
    await exportEmbeddings(baseJob(a));
    await exportEmbeddings(baseJob(b));
    expect(readFileSync(a, 'utf-8')).toBe(readFileSync(b, 'utf-8'));
  });

  it('rejects a selector that does not match the checkpoint family', async () => {
    await expect(
      exportEmbeddings({ ...baseJob(join(root, 'x.embj')), layerSelector: 'vit-pre-mlp' }),
    ).rejects.toThrow(/does not match checkpoint family 'cnn'/);
  });

  it('resolves the transformer feature layer from metadata or by name', async () => {
    const declared = join(root, 'vit_declared');
    await makeVitCheckpoint(declared, { declareFeatureLayer: true });
    const byName = join(root, 'vit_named');
    await makeVitCheckpoint(byName, { declareFeatureLayer: false });
    for (const dir of [declared, byName]) {
      const out = join(root, `${dir.split('/').pop()}.embj`);
      const result = await exportEmbeddings({
        ...baseJob(out), checkpointDir: dir, layerSelector: 'vit-pre-mlp',
      });
      const header = JSON.parse(readFileSync(out, 'utf-8').split('\n')[0]);
      expect(header.dim).toBe(5); // pre_mlp width, not the 4-way head
      expect(result.written).toBe(20);
    }
  });

  it('skips untagged images and reports them', async () => {
    const sparseTags = join(root, 'sparse_tags.csv');
    writeTags(sparseTags, [
      { file: 'aman0.png', gender: 'man', class: 'person' },
      { file: 'awoman0.png', gender: 'woman', class: 'person' },
    ]);
    const out = join(root, 'sparse.embj');
    const result = await exportEmbeddings({ ...baseJob(out), tagsPath: sparseTags });
    expect(result.written).toBe(2);
    expect(result.skipped).toHaveLength(18);
    expect(result.skipped[0].reason).toBe('no tags entry');
  });

  it('resizes images that do not match the model input', async () => {
    const bigDir = join(root, 'big_images');
    makeImageDir(bigDir, [{ file: 'aman0.png', rgb: [200, 40, 40], size: 12 }]);
    const tags = join(root, 'big_tags.csv');
    writeTags(tags, [{ file: 'aman0.png', gender: 'man', class: 'person' }]);
    const out = join(root, 'big.embj');
    const result = await exportEmbeddings({ ...baseJob(out), imagesDir: bigDir, tagsPath: tags });
    expect(result.written).toBe(1);
  });
});

describe('readTags', () => {
  it('applies the default class only when a row omits one', () => {
    const path = join(root, 'default_tags.csv');
    writeFileSync(path, 'file,gender,class\na.png,man,\nb.png,woman,nurse\n');
    const tags = readTags(path, 'person');
    expect(tags.get('a.png')).toEqual({ gender: 'man', class: 'person' });
    expect(tags.get('b.png')).toEqual({ gender: 'woman', class: 'nurse' });
  });

  it('rejects unknown genders and duplicates', () => {
    const bad = join(root, 'bad_tags.csv');
    writeFileSync(bad, 'file,gender,class\na.png,other,person\n');
    expect(() => readTags(bad)).toThrow(/man\|woman/);
    const dup = join(root, 'dup_tags.csv');
    writeFileSync(dup, 'file,gender,class\na.png,man,person\na.png,man,person\n');
    expect(() => readTags(dup)).toThrow(/duplicate/);
  });
});
