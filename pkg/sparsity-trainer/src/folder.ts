/** Load a standard image-folder dataset: one subdirectory per class.
 *
 * Supports 8-bit PNG (color is averaged to grayscale) and binary PGM.
 * Images are nearest-neighbor resized to the requested side length and
 * scaled to [-1, 1]. Train/test are split per class with a fixed seed
 * so repeated loads produce the same split.
 */

import * as fs from 'node:fs';
import * as path from 'node:path';
import { PNG } from 'pngjs';

import { ImageSet } from './data.js';
import { mulberry32, permutation } from './rng.js';

interface RawImage {
  width: number;
  height: number;
  gray: Float32Array; // values in [0, 255]
}

function decodePng(buf: Buffer): RawImage {
  const png = PNG.sync.read(buf);
  const gray = new Float32Array(png.width * png.height);
  for (let i = 0; i < gray.length; i++) {
    const o = i * 4;
    gray[i] = (png.data[o] + png.data[o + 1] + png.data[o + 2]) / 3;
  }
  return { width: png.width, height: png.height, gray };
}

function decodePgm(buf: Buffer): RawImage {
  // P5 header: magic, width, height, maxval, then raw bytes
  let pos = 0;
  const token = () => {
    while (pos < buf.length && /\s/.test(String.fromCharCode(buf[pos]))) pos++;
    if (buf[pos] === 0x23) { // comment line
      while (pos < buf.length && buf[pos] !== 0x0a) pos++;
      return token();
    }
    let start = pos;
    while (pos < buf.length && !/\s/.test(String.fromCharCode(buf[pos]))) pos++;
    return buf.toString('ascii', start, pos);
  };
  if (token() !== 'P5') throw new Error('not a binary PGM file');
  const width = parseInt(token(), 10);
  const height = parseInt(token(), 10);
  const maxval = parseInt(token(), 10);
  pos++; // single whitespace after maxval
  if (!(width > 0 && height > 0 && maxval > 0 && maxval < 65536)) {
    throw new Error('bad PGM header');
  }
  const gray = new Float32Array(width * height);
  const scale = 255 / maxval;
  if (maxval < 256) {
    for (let i = 0; i < gray.length; i++) gray[i] = buf[pos + i] * scale;
  } else {
    for (let i = 0; i < gray.length; i++) {
      gray[i] = buf.readUInt16BE(pos + 2 * i) * scale;
    }
  }
  return { width, height, gray };
}

function resizeNearest(img: RawImage, size: number): Float32Array {
  const out = new Float32Array(size * size);
  for (let y = 0; y < size; y++) {
    const sy = Math.min(img.height - 1, Math.floor((y * img.height) / size));
    for (let x = 0; x < size; x++) {
      const sx = Math.min(img.width - 1, Math.floor((x * img.width) / size));
      out[y * size + x] = img.gray[sy * img.width + sx] / 127.5 - 1;
    }
  }
  return out;
}

export interface FolderOptions {
  size?: number;
  testFraction?: number;
  seed?: number;
}

/** Read `dir/<class>/<image>.{png,pgm}` into a train/test ImageSet. */
export function loadImageFolder(dir: string,
                                options: FolderOptions = {}): ImageSet {
  const size = options.size ?? 16;
  const testFraction = options.testFraction ?? 0.25;
  const seed = options.seed ?? 0;
  const classDirs = fs.readdirSync(dir, { withFileTypes: true })
    .filter((e) => e.isDirectory())
    .map((e) => e.name)
    .sort();
  if (classDirs.length < 2) {
    throw new Error(`need at least 2 class subdirectories in ${dir}`);
  }
  const perClass: Float32Array[][] = [];
  for (const cls of classDirs) {
    const files = fs.readdirSync(path.join(dir, cls))
      .filter((f) => /\.(png|pgm)$/i.test(f))
      .sort();
    if (files.length === 0) {
      throw new Error(`class directory ${cls} has no png/pgm images`);
    }
    const images: Float32Array[] = [];
    for (const f of files) {
      const buf = fs.readFileSync(path.join(dir, cls, f));
      const raw = /\.png$/i.test(f) ? decodePng(buf) : decodePgm(buf);
      images.push(resizeNearest(raw, size));
    }
    perClass.push(images);
  }

  const uniform = mulberry32(seed);
  const pixels = size * size;
  const train: { img: Float32Array; label: number }[] = [];
  const test: { img: Float32Array; label: number }[] = [];
  perClass.forEach((images, label) => {
    const order = permutation(images.length, uniform);
    const nTest = Math.max(1, Math.round(images.length * testFraction));
    order.forEach((idx, rank) => {
      (rank < nTest ? test : train).push({ img: images[idx], label });
    });
  });
  if (train.length === 0) {
    throw new Error('test fraction leaves no training images');
  }

  const pack = (rows: { img: Float32Array; label: number }[]) => {
    const images = new Float32Array(rows.length * pixels);
    const labels = new Int32Array(rows.length);
    rows.forEach((r, i) => {
      images.set(r.img, i * pixels);
      labels[i] = r.label;
    });
    return { images, labels };
  };
  const tr = pack(train);
  const te = pack(test);
  return {
    size,
    classes: classDirs.length,
    trainImages: tr.images,
    trainLabels: tr.labels,
    trainCount: train.length,
    testImages: te.images,
    testLabels: te.labels,
    testCount: test.length,
  };
}
