import { UnreadableVideo } from './errors';

/** One decoded frame: the luma plane plus full-resolution chroma. */
export interface YuvFrame {
  width: number;
  height: number;
  y: Uint8Array; // width*height, BT.601 studio range
  cb: Uint8Array; // upsampled to width*height
  cr: Uint8Array;
}

export interface Y4mVideo {
  width: number;
  height: number;
  fps: number;
  frames: YuvFrame[];
}

const MAGIC = 'YUV4MPEG2';

interface ChromaLayout {
  xShift: number;
  yShift: number;
}

function chromaLayout(tag: string): ChromaLayout | 'mono' {
  if (tag === 'mono') return 'mono';
  if (tag.startsWith('420')) return { xShift: 1, yShift: 1 };
  if (tag.startsWith('422')) return { xShift: 1, yShift: 0 };
  if (tag.startsWith('444')) return { xShift: 0, yShift: 0 };
  throw new UnreadableVideo(`unsupported chroma layout C${tag}`);
}

/** Nearest-neighbor chroma upsample to full resolution. */
function upsample(
  plane: Uint8Array,
  cw: number,
  ch: number,
  width: number,
  height: number,
  layout: ChromaLayout,
): Uint8Array {
  if (layout.xShift === 0 && layout.yShift === 0) return plane;
  const out = new Uint8Array(width * height);
  for (let yPix = 0; yPix < height; yPix++) {
    const sy = Math.min(yPix >> layout.yShift, ch - 1);
    for (let xPix = 0; xPix < width; xPix++) {
      const sx = Math.min(xPix >> layout.xShift, cw - 1);
      out[yPix * width + xPix] = plane[sy * cw + sx];
    }
  }
  return out;
}

/** Parse a whole YUV4MPEG2 stream held in memory. */
export function parseY4m(buffer: Buffer): Y4mVideo {
  const headerEnd = buffer.indexOf(0x0a);
  if (headerEnd < 0) throw new UnreadableVideo('missing stream header');
  const header = buffer.subarray(0, headerEnd).toString('ascii');
  const fields = header.split(' ');
  if (fields[0] !== MAGIC) throw new UnreadableVideo('not a YUV4MPEG2 stream');

  let width = 0;
  let height = 0;
  let fps = 0;
  let chromaTag = '420mpeg2';
  for (const field of fields.slice(1)) {
    const code = field[0];
    const value = field.slice(1);
    if (code === 'W') width = Number(value);
    else if (code === 'H') height = Number(value);
    else if (code === 'F') {
      const [num, den] = value.split(':').map(Number);
      if (!num || !den) throw new UnreadableVideo(`bad frame rate ${field}`);
      fps = num / den;
    } else if (code === 'C') chromaTag = value;
  }
  if (width <= 0 || height <= 0) throw new UnreadableVideo('missing frame dimensions');
  if (fps <= 0) throw new UnreadableVideo('missing frame rate');

  const layout = chromaLayout(chromaTag);
  const lumaSize = width * height;
  let cw = 0;
  let ch = 0;
  let chromaSize = 0;
  if (layout !== 'mono') {
    cw = width >> layout.xShift;
    ch = height >> layout.yShift;
    chromaSize = cw * ch;
  }

  const frames: YuvFrame[] = [];
  let pos = headerEnd + 1;
  while (pos < buffer.length) {
    const lineEnd = buffer.indexOf(0x0a, pos);
    if (lineEnd < 0) throw new UnreadableVideo('truncated frame header');
    const marker = buffer.subarray(pos, lineEnd).toString('ascii');
    if (!marker.startsWith('FRAME')) throw new UnreadableVideo(`bad frame marker ${marker}`);
    pos = lineEnd + 1;
    const need = lumaSize + 2 * chromaSize;
    if (pos + need > buffer.length) throw new UnreadableVideo('truncated frame data');

    const y = new Uint8Array(buffer.subarray(pos, pos + lumaSize));
    pos += lumaSize;
    let cb: Uint8Array;
    let cr: Uint8Array;
    if (layout === 'mono') {
      cb = new Uint8Array(lumaSize).fill(128);
      cr = new Uint8Array(lumaSize).fill(128);
    } else {
      cb = upsample(new Uint8Array(buffer.subarray(pos, pos + chromaSize)), cw, ch, width, height, layout);
      pos += chromaSize;
      cr = upsample(new Uint8Array(buffer.subarray(pos, pos + chromaSize)), cw, ch, width, height, layout);
      pos += chromaSize;
    }
    frames.push({ width, height, y, cb, cr });
  }
  if (frames.length === 0) throw new UnreadableVideo('stream holds no frames');
  return { width, height, fps, frames };
}

function clampByte(v: number): number {
  return v < 0 ? 0 : v > 255 ? 255 : Math.round(v);
}

/** BT.601 studio-range YCbCr to interleaved RGB. */
export function frameToRgb(frame: YuvFrame): Uint8Array {
  const n = frame.width * frame.height;
  const rgb = new Uint8Array(n * 3);
  for (let i = 0; i < n; i++) {
    const yv = 1.164383 * (frame.y[i] - 16);
    const cb = frame.cb[i] - 128;
    const cr = frame.cr[i] - 128;
    rgb[i * 3] = clampByte(yv + 1.596027 * cr);
    rgb[i * 3 + 1] = clampByte(yv - 0.391762 * cb - 0.812968 * cr);
    rgb[i * 3 + 2] = clampByte(yv + 2.017232 * cb);
  }
  return rgb;
}

/** BT.601 studio-range RGB to YCbCr (used by the fixture generator). */
export function rgbToYcbcr(r: number, g: number, b: number): [number, number, number] {
  const y = 16 + 0.256788 * r + 0.504129 * g + 0.097906 * b;
  const cb = 128 - 0.148223 * r - 0.290993 * g + 0.439216 * b;
  const cr = 128 + 0.439216 * r - 0.367788 * g - 0.071427 * b;
  return [clampByte(y), clampByte(cb), clampByte(cr)];
}
