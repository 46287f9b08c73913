/**
 * Render the checked-in test clip: a 2-second synthetic face video in
 * YUV4MPEG2 (C444). The face blinks each eye at different frames and the
 * final two frames hold no face at all, exercising the skip path. Output is
 * fully deterministic.
 */

import * as fs from 'node:fs';
import * as path from 'node:path';

import { rgbToYcbcr } from '../src/y4m';

const WIDTH = 128;
const HEIGHT = 128;
const FPS = 12;
const FRAMES = 24;

const IMAGE_LEFT_EYE_CLOSED = new Set([6, 7, 8, 18, 19, 20]); // subject's right eye
const IMAGE_RIGHT_EYE_CLOSED = new Set([12, 13]); // subject's left eye
const FACELESS = new Set([22, 23]);

type Rgb = [number, number, number];

const BACKGROUND: Rgb = [58, 66, 80];
const SKIN: Rgb = [214, 176, 148];
const EYE: Rgb = [38, 28, 28];
const BROW: Rgb = [92, 62, 40];
const MOUTH: Rgb = [152, 82, 82];

function renderFrame(index: number): Rgb[] {
  const pixels: Rgb[] = new Array(WIDTH * HEIGHT).fill(BACKGROUND);
  if (FACELESS.has(index)) return pixels;

  const put = (x: number, y: number, color: Rgb) => {
    if (x >= 0 && x < WIDTH && y >= 0 && y < HEIGHT) pixels[y * WIDTH + x] = color;
  };
  const fillRect = (x0: number, y0: number, x1: number, y1: number, color: Rgb) => {
    for (let y = y0; y < y1; y++) for (let x = x0; x < x1; x++) put(x, y, color);
  };

  // face oval centered at (64, 64)
  for (let y = 14; y < 116; y++) {
    for (let x = 22; x < 106; x++) {
      const dx = (x - 64) / 42;
      const dy = (y - 64) / 50;
      if (dx * dx + dy * dy <= 1) put(x, y, SKIN);
    }
  }
  // brows
  fillRect(38, 40, 58, 44, BROW);
  fillRect(70, 40, 90, 44, BROW);
  // eyes: open = dark block, closed = thin lash line on skin
  if (IMAGE_LEFT_EYE_CLOSED.has(index)) {
    fillRect(40, 52, 56, 54, EYE);
  } else {
    fillRect(40, 48, 56, 57, EYE);
  }
  if (IMAGE_RIGHT_EYE_CLOSED.has(index)) {
    fillRect(72, 52, 88, 54, EYE);
  } else {
    fillRect(72, 48, 88, 57, EYE);
  }
  // nose hint and mouth
  fillRect(62, 66, 67, 78, [190, 150, 122]);
  fillRect(50, 88, 78, 96, MOUTH);
  return pixels;
}

function main(): void {
  const chunks: Buffer[] = [Buffer.from(`YUV4MPEG2 W${WIDTH} H${HEIGHT} F${FPS}:1 Ip A1:1 C444\n`, 'ascii')];
  for (let index = 0; index < FRAMES; index++) {
    const rgb = renderFrame(index);
    const y = Buffer.alloc(WIDTH * HEIGHT);
    const cb = Buffer.alloc(WIDTH * HEIGHT);
    const cr = Buffer.alloc(WIDTH * HEIGHT);
    for (let i = 0; i < rgb.length; i++) {
      const [yy, cbb, crr] = rgbToYcbcr(rgb[i][0], rgb[i][1], rgb[i][2]);
      y[i] = yy;
      cb[i] = cbb;
      cr[i] = crr;
    }
    chunks.push(Buffer.from('FRAME\n', 'ascii'), y, cb, cr);
  }
  const outPath = path.join(__dirname, '..', 'fixtures', 'clip.y4m');
  fs.mkdirSync(path.dirname(outPath), { recursive: true });
  fs.writeFileSync(outPath, Buffer.concat(chunks));
  console.log(`wrote ${outPath} (${FRAMES} frames @ ${FPS} fps, ${WIDTH}x${HEIGHT})`);
}

main();
