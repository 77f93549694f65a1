/**
 * Face masking: fill detected face boxes with solid black. Detection is
 * pluggable; the built-in backend reads boxes from a JSON file so any
 * external detector's output can drive it. Images with no detections are
 * copied unchanged and listed in the report.
 */

import { readFileSync, writeFileSync, mkdirSync, copyFileSync } from 'node:fs';
import { join } from 'node:path';
import { z } from 'zod';
import { Box, blackoutBoxes, listImages, readImage, writeImage } from './images.js';

export interface FaceDetector {
  detect(file: string): Box[];
}

const boxSchema = z.object({
  x: z.number(),
  y: z.number(),
  width: z.number().positive(),
  height: z.number().positive(),
});

const boxesFileSchema = z.record(z.string(), z.array(boxSchema));

/** Detections precomputed by an external detector, keyed by file name. */
export class BoxesFileDetector implements FaceDetector {
  private readonly boxes: Record<string, Box[]>;

  constructor(path: string) {
    this.boxes = boxesFileSchema.parse(JSON.parse(readFileSync(path, 'utf-8')));
  }

  detect(file: string): Box[] {
    return this.boxes[file] ?? [];
  }
}

export interface MaskReport {
  masked: { file: string; boxes: number }[];
  copied: { file: string; warning: string }[];
  failed: { file: string; reason: string }[];
}

export function maskFaces(imagesDir: string, outDir: string, detector: FaceDetector): MaskReport {
  mkdirSync(outDir, { recursive: true });
  const report: MaskReport = { masked: [], copied: [], failed: [] };
  for (const file of listImages(imagesDir)) {
    const source = join(imagesDir, file);
    const target = join(outDir, file);
    let boxes: Box[];
    try {
      boxes = detector.detect(file);
    } catch (err) {
      report.failed.push({ file, reason: (err as Error).message });
      continue;
    }
    if (boxes.length === 0) {
      copyFileSync(source, target);
      report.copied.push({ file, warning: 'no face detected; copied unmodified' });
      continue;
    }
    try {
      writeImage(blackoutBoxes(readImage(source), boxes), target);
      report.masked.push({ file, boxes: boxes.length });
    } catch (err) {
      report.failed.push({ file, reason: (err as Error).message });
    }
  }
  writeFileSync(join(outDir, 'mask_report.json'), JSON.stringify(report, null, 2) + '\n');
  return report;
}
