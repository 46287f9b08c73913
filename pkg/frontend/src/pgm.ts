import * as fs from 'node:fs';

/** Single-channel 8-bit image. */
export interface GrayImage {
  width: number;
  height: number;
  data: Uint8Array; // row-major, length width*height
}

/** Serialize as binary PGM (P5) with maxval 255. */
export function encodePgm(image: GrayImage): Buffer {
  const header = Buffer.from(`P5\n${image.width} ${image.height}\n255\n`, 'ascii');
  return Buffer.concat([header, Buffer.from(image.data)]);
}

export function writePgm(path: string, image: GrayImage): void {
  fs.writeFileSync(path, encodePgm(image));
}

/** Parse a binary PGM; only single-byte maxval is supported. */
export function readPgm(buffer: Buffer): GrayImage {
  const tokens: string[] = [];
  let pos = 0;
  while (tokens.length < 4 && pos < buffer.length) {
    const ch = buffer[pos];
    if (ch === 0x23) {
      // '#' comment runs to end of line
      while (pos < buffer.length && buffer[pos] !== 0x0a) pos++;
      pos++;
    } else if (ch === 0x20 || ch === 0x09 || ch === 0x0a || ch === 0x0d) {
      pos++;
    } else {
      let end = pos;
      while (end < buffer.length && !/\s/.test(String.fromCharCode(buffer[end]))) end++;
      tokens.push(buffer.subarray(pos, end).toString('ascii'));
      pos = end;
    }
  }
  if (tokens.length < 4 || tokens[0] !== 'P5') {
    throw new Error('not a binary (P5) PGM');
  }
  const width = Number(tokens[1]);
  const height = Number(tokens[2]);
  const maxval = Number(tokens[3]);
  if (!Number.isInteger(width) || !Number.isInteger(height) || maxval <= 0 || maxval > 255) {
    throw new Error('malformed PGM header');
  }
  const pixels = buffer.subarray(pos + 1, pos + 1 + width * height);
  if (pixels.length !== width * height) {
    throw new Error('truncated PGM pixel data');
  }
  return { width, height, data: new Uint8Array(pixels) };
}
