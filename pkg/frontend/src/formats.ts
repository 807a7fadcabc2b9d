/**
 * Binary PGM (P5) and grayscale PFM (Pf) readers/writers.
 *
 * Conventions shared with the solver CLI:
 *  - PGM: 8-bit, maxval 255, '#' comments allowed between header tokens.
 *    Masks use 255 = known, 0 = unknown.
 *  - PFM: float32, scale -1.0 (little-endian), rows stored bottom-up,
 *    values in [0, 1].
 */

import * as fs from 'fs';

export interface Grid {
  width: number;
  height: number;
  /** Row-major, top-down, length width*height. */
  data: Float32Array;
}

function readHeaderTokens(buf: Buffer, magic: string, count: number) {
  if (buf.length < 2 || buf.toString('latin1', 0, 2) !== magic) {
    throw new Error(`unsupported magic, expected ${magic}`);
  }
  const tokens: string[] = [];
  let pos = 2;
  while (tokens.length < count) {
    if (pos >= buf.length) throw new Error('malformed header');
    const ch = buf[pos];
    if (ch === 0x23) {
      // comment: skip to end of line
      while (pos < buf.length && buf[pos] !== 0x0a) pos++;
      pos++;
      continue;
    }
    if (ch === 0x20 || ch === 0x09 || ch === 0x0a || ch === 0x0d) {
      pos++;
      continue;
    }
    let end = pos;
    while (end < buf.length && !/\s/.test(String.fromCharCode(buf[end])) && buf[end] !== 0x23) {
      end++;
    }
    tokens.push(buf.toString('latin1', pos, end));
    pos = end;
  }
  // exactly one whitespace byte separates the header from the payload
  if (pos >= buf.length) throw new Error('malformed header');
  pos++;
  return { tokens, payloadStart: pos };
}

export function readPgm(path: string): Grid {
  const buf = fs.readFileSync(path);
  const { tokens, payloadStart } = readHeaderTokens(buf, 'P5', 3);
  const [width, height, maxval] = tokens.map(Number);
  if (!Number.isInteger(width) || !Number.isInteger(height) || width < 1 || height < 1) {
    throw new Error('malformed header');
  }
  if (maxval !== 255) throw new Error(`unsupported maxval ${maxval}`);
  const n = width * height;
  if (buf.length < payloadStart + n) throw new Error('truncated payload');
  const data = new Float32Array(n);
  for (let i = 0; i < n; i++) data[i] = buf[payloadStart + i];
  return { width, height, data };
}

export function writePgm(path: string, grid: Grid): void {
  const header = Buffer.from(`P5\n${grid.width} ${grid.height}\n255\n`, 'latin1');
  const payload = Buffer.alloc(grid.width * grid.height);
  for (let i = 0; i < payload.length; i++) {
    payload[i] = Math.min(255, Math.max(0, Math.floor(grid.data[i] + 0.5)));
  }
  fs.writeFileSync(path, Buffer.concat([header, payload]));
}

export function writePfm(path: string, grid: Grid): void {
  for (let i = 0; i < grid.data.length; i++) {
    const v = grid.data[i];
    if (!(v >= 0 && v <= 1)) throw new Error(`value out of range at index ${i}: ${v}`);
  }
  const header = Buffer.from(`Pf\n${grid.width} ${grid.height}\n-1.0\n`, 'latin1');
  const payload = Buffer.alloc(grid.width * grid.height * 4);
  // PFM stores rows bottom-up
  for (let y = 0; y < grid.height; y++) {
    const srcRow = grid.height - 1 - y;
    for (let x = 0; x < grid.width; x++) {
      payload.writeFloatLE(grid.data[srcRow * grid.width + x], (y * grid.width + x) * 4);
    }
  }
  fs.writeFileSync(path, Buffer.concat([header, payload]));
}

export function readPfm(path: string): Grid {
  const buf = fs.readFileSync(path);
  const { tokens, payloadStart } = readHeaderTokens(buf, 'Pf', 3);
  const [width, height] = tokens.slice(0, 2).map(Number);
  const scale = Number(tokens[2]);
  if (!(scale < 0)) throw new Error('unsupported byte order');
  const n = width * height;
  if (buf.length < payloadStart + 4 * n) throw new Error('truncated payload');
  const data = new Float32Array(n);
  for (let y = 0; y < height; y++) {
    const dstRow = height - 1 - y;
    for (let x = 0; x < width; x++) {
      data[dstRow * width + x] = buf.readFloatLE(payloadStart + (y * width + x) * 4);
    }
  }
  return { width, height, data };
}
