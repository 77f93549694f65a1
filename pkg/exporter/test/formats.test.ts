import { mkdtempSync, readFileSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { beforeAll, describe, expect, it } from 'vitest';
import {
  EmbeddingRecord,
  readVocabulary,
  writeEmbeddings,
  writePredictions,
} from '../src/formats.js';
import { OCCUPATIONS } from './helpers.js';

let root: string;

beforeAll(() => {
  root = mkdtempSync(join(tmpdir(), 'fmt-'));
});

function record(id: string, vec: number[]): EmbeddingRecord {
  return {
    id, vec, gender: 'man', class: 'person', masked: false,
    model: 'm', family: 'cnn', variant: 'unbiased', iteration: 1,
  };
}

describe('writeEmbeddings', () => {
  it('writes header then one record per line', () => {
    const path = join(root, 'ok.embj');
    writeEmbeddings([record('a', [0.5, 1]), record('b', [2, 3])], path);
    const lines = readFileSync(path, 'utf-8').trim().split('\n');
    expect(JSON.parse(lines[0])).toEqual({
      format: 'biaslens-emb', version: 1, dim: 2, count: 2,
    });
    expect(JSON.parse(lines[1]).vec).toEqual([0.5, 1]);
  });

  it('rejects invalid collections before touching disk', () => {
    const path = join(root, 'never.embj');
    expect(() => writeEmbeddings([], path)).toThrow(/empty/);
    expect(() => writeEmbeddings([record('a', [1]), record('a', [2])], path)).toThrow(/duplicate/);
    expect(() => writeEmbeddings([record('a', [1]), record('b', [1, 2])], path)).toThrow(/dim/);
    expect(() => writeEmbeddings([record('a', [0, 0])], path)).toThrow(/zero vector/);
    expect(() => writeEmbeddings([record('a', [NaN])], path)).toThrow(/non-finite/);
  });
});

describe('writePredictions', () => {
  it('escapes cells that contain commas or quotes', () => {
    const path = join(root, 'preds.csv');
    writePredictions(
      [
        { imageId: 'img,with,commas', gender: 'man', label: 'investment banker', encoder: 'e', family: 'cnn' },
        { imageId: 'plain', gender: 'woman', label: 'nurse', encoder: 'e', family: 'cnn' },
      ],
      path,
    );
    const lines = readFileSync(path, 'utf-8').trim().split('\n');
    expect(lines[0]).toBe('image_id,gender,label,encoder,family');
    expect(lines[1]).toBe('"img,with,commas",man,investment banker,e,cnn');
    expect(lines[2]).toBe('plain,woman,nurse,e,cnn');
  });
});

describe('readVocabulary', () => {
  it('reads the primary toolkit vocabulary', () => {
    const vocabulary = readVocabulary(OCCUPATIONS);
    expect(vocabulary).toHaveLength(100);
    expect(vocabulary).toContain('chief executive officer');
  });

  it('normalizes case and rejects duplicates', () => {
    const path = join(root, 'vocab.txt');
    writeFileSync(path, 'Nurse\npilot\n\n');
    expect(readVocabulary(path)).toEqual(['nurse', 'pilot']);
    writeFileSync(path, 'nurse\nNURSE\n');
    expect(() => readVocabulary(path)).toThrow(/duplicate/);
  });
});
