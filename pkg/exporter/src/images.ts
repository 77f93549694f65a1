/**
 * Minimal image IO: PNG (via pngjs) and binary PPM/P6. Pixels are kept as
 * 8-bit RGB; models receive them scaled to [0, 1].
 */

import { readFileSync, writeFileSync, readdirSync } from 'node:fs';
import { extname, join } from 'node:path';
import { PNG } from 'pngjs';

export interface Image {
  width: number;
  height: number;
  /** RGB, row-major, 3 bytes per pixel */
  data: Uint8Array;
}

export const IMAGE_EXTENSIONS = ['.png', '.ppm'];

export function listImages(dir: string): string[] {
  return readdirSync(dir)
    .filter((name) => IMAGE_EXTENSIONS.includes(extname(name).toLowerCase()))
    .sort();
}

export function readImage(path: string): Image {
  const ext = extname(path).toLowerCase();
  if (ext === '.png') return readPng(path);
  if (ext === '.ppm') return readPpm(path);
  throw new Error(`unsupported image format: ${path}`);
}

export function writeImage(image: Image, path: string): void {
  const ext = extname(path).toLowerCase();
  if (ext === '.png') return writePng(image, path);
  if (ext === '.ppm') return writePpm(image, path);
  throw new Error(`unsupported image format: ${path}`);
}

function readPng(path: string): Image {
  const png = PNG.sync.read(readFileSync(path));
  const data = new Uint8Array(png.width * png.height * 3);
  for (let i = 0; i < png.width * png.height; i++) {
    data[i * 3] = png.data[i * 4];
    data[i * 3 + 1] = png.data[i * 4 + 1];
    data[i * 3 + 2] = png.data[i * 4 + 2];
  }
  return { width: png.width, height: png.height, data };
}

function writePng(image: Image, path: string): void {
  const png = new PNG({ width: image.width, height: image.height });
  for (let i = 0; i < image.width * image.height; i++) {
    png.data[i * 4] = image.data[i * 3];
    png.data[i * 4 + 1] = image.data[i * 3 + 1];
    png.data[i * 4 + 2] = image.data[i * 3 + 2];
    png.data[i * 4 + 3] = 255;
  }
  writeFileSync(path, PNG.sync.write(png));
}

function readPpm(path: string): Image {
  const buffer = readFileSync(path);
  // header: "P6" <width> <height> <maxval>, whitespace separated, then raw RGB
  let offset = 0;
  const tokens: string[] = [];
  while (tokens.length < 4) {
    while (offset < buffer.length && /\s/.test(String.fromCharCode(buffer[offset]))) offset++;
    if (String.fromCharCode(buffer[offset]) === '#') {
      while (offset < buffer.length && buffer[offset] !== 0x0a) offset++;
      continue;
    }
    let token = '';
    while (offset < buffer.length && !/\s/.test(String.fromCharCode(buffer[offset]))) {
      token += String.fromCharCode(buffer[offset]);
      offset++;
    }
    tokens.push(token);
  }
  offset++; // single whitespace after maxval
  const [magic, w, h, maxval] = tokens;
  if (magic !== 'P6' || maxval !== '255') {
    throw new Error(`unsupported PPM variant in ${path} (need P6, maxval 255)`);
  }
  const width = parseInt(w, 10);
  const height = parseInt(h, 10);
  const data = new Uint8Array(buffer.subarray(offset, offset + width * height * 3));
  if (data.length !== width * height * 3) {
    throw new Error(`truncated PPM data in ${path}`);
  }
  return { width, height, data };
}

function writePpm(image: Image, path: string): void {
  const header = Buffer.from(`P6\n${image.width} ${image.height}\n255\n`, 'ascii');
  writeFileSync(path, Buffer.concat([header, Buffer.from(image.data)]));
}

export interface Box {
  x: number;
  y: number;
  width: number;
  height: number;
}

/** Fill each box with solid black, clamped to the image bounds. */
export function blackoutBoxes(image: Image, boxes: Box[]): Image {
  const data = new Uint8Array(image.data);
  for (const box of boxes) {
    const x0 = Math.max(0, Math.floor(box.x));
    const y0 = Math.max(0, Math.floor(box.y));
    const x1 = Math.min(image.width, Math.ceil(box.x + box.width));
    const y1 = Math.min(image.height, Math.ceil(box.y + box.height));
    for (let y = y0; y < y1; y++) {
      for (let x = x0; x < x1; x++) {
        const i = (y * image.width + x) * 3;
        data[i] = 0;
        data[i + 1] = 0;
        data[i + 2] = 0;
      }
    }
  }
  return { width: image.width, height: image.height, data };
}
