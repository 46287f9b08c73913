import { strict as assert } from 'node:assert';
import { test } from 'node:test';

import { frameToRgb, parseY4m, rgbToYcbcr } from '../src/y4m';

function makeStream(chroma: string, width: number, height: number, frames: number): Buffer {
  const chunks: Buffer[] = [Buffer.from(`YUV4MPEG2 W${width} H${height} F25:1 C${chroma}\n`)];
  const cw = chroma.startsWith('444') ? width : chroma.startsWith('422') ? width / 2 : width / 2;
  const ch = chroma.startsWith('420') ? height / 2 : height;
  for (let f = 0; f < frames; f++) {
    chunks.push(Buffer.from('FRAME\n'));
    chunks.push(Buffer.alloc(width * height, 100 + f));
    if (chroma !== 'mono') {
      chunks.push(Buffer.alloc(cw * ch, 120));
      chunks.push(Buffer.alloc(cw * ch, 130));
    }
  }
  return Buffer.concat(chunks);
}

test('parses C444 geometry, fps, and luma values', () => {
  const video = parseY4m(makeStream('444', 4, 2, 3));
  assert.equal(video.width, 4);
  assert.equal(video.height, 2);
  assert.equal(video.fps, 25);
  assert.equal(video.frames.length, 3);
  assert.equal(video.frames[0].y[0], 100);
  assert.equal(video.frames[2].y[7], 102);
  assert.equal(video.frames[0].cb[5], 120);
});

test('C420 chroma is upsampled to full resolution', () => {
  const video = parseY4m(makeStream('420mpeg2', 4, 4, 1));
  const frame = video.frames[0];
  assert.equal(frame.cb.length, 16);
  assert.ok(frame.cb.every((v) => v === 120));
  assert.ok(frame.cr.every((v) => v === 130));
});

test('mono streams fill neutral chroma', () => {
  const video = parseY4m(makeStream('mono', 2, 2, 1));
  assert.ok(video.frames[0].cb.every((v) => v === 128));
});

test('fractional frame rates parse', () => {
  const buffer = Buffer.concat([
    Buffer.from('YUV4MPEG2 W2 H2 F30000:1001 C444\n'),
    Buffer.from('FRAME\n'),
    Buffer.alloc(4 * 3, 90),
  ]);
  assert.ok(Math.abs(parseY4m(buffer).fps - 29.97) < 0.01);
});

test('bad magic, truncated frames, and empty streams are rejected', () => {
  assert.throws(() => parseY4m(Buffer.from('RIFF....')), /YUV4MPEG2|header/);
  const truncated = makeStream('444', 4, 4, 1).subarray(0, 30);
  assert.throws(() => parseY4m(truncated), /truncated/);
  assert.throws(() => parseY4m(Buffer.from('YUV4MPEG2 W2 H2 F25:1 C444\n')), /no frames/);
});

test('color encode and decode stay close through studio range', () => {
  const colors: Array<[number, number, number]> = [
    [214, 176, 148],
    [38, 28, 28],
    [58, 66, 80],
  ];
  for (const [r, g, b] of colors) {
    const [y, cb, cr] = rgbToYcbcr(r, g, b);
    const frame = {
      width: 1,
      height: 1,
      y: new Uint8Array([y]),
      cb: new Uint8Array([cb]),
      cr: new Uint8Array([cr]),
    };
    const rgb = frameToRgb(frame);
    assert.ok(Math.abs(rgb[0] - r) <= 3, `r ${rgb[0]} vs ${r}`);
    assert.ok(Math.abs(rgb[1] - g) <= 3, `g ${rgb[1]} vs ${g}`);
    assert.ok(Math.abs(rgb[2] - b) <= 3, `b ${rgb[2]} vs ${b}`);
  }
});
