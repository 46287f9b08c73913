import { GrayImage } from './pgm';

export const CROP_SIZE = 50;
export const PAD_FRACTION = 0.25;

export interface Box {
  x0: number;
  y0: number;
  x1: number; // exclusive
  y1: number;
}

/** Tight bounding box of a point set, grown by PAD_FRACTION per side and
 * clamped to the frame. */
export function paddedBox(
  points: Array<{ x: number; y: number }>,
  width: number,
  height: number,
): Box {
  let minX = Infinity;
  let minY = Infinity;
  let maxX = -Infinity;
  let maxY = -Infinity;
  for (const p of points) {
    minX = Math.min(minX, p.x);
    minY = Math.min(minY, p.y);
    maxX = Math.max(maxX, p.x);
    maxY = Math.max(maxY, p.y);
  }
  const padX = (maxX - minX) * PAD_FRACTION;
  const padY = (maxY - minY) * PAD_FRACTION;
  return {
    x0: Math.max(0, Math.floor(minX - padX)),
    y0: Math.max(0, Math.floor(minY - padY)),
    x1: Math.min(width, Math.ceil(maxX + padX) + 1),
    y1: Math.min(height, Math.ceil(maxY + padY) + 1),
  };
}

/** Crop a box out of a plane and bilinearly resize it to CROP_SIZE squared. */
export function cropResize(
  plane: Uint8Array,
  width: number,
  box: Box,
  outSize: number = CROP_SIZE,
): GrayImage {
  const boxW = box.x1 - box.x0;
  const boxH = box.y1 - box.y0;
  if (boxW < 1 || boxH < 1) {
    throw new Error(`degenerate crop box ${JSON.stringify(box)}`);
  }
  const out = new Uint8Array(outSize * outSize);
  const scaleX = boxW / outSize;
  const scaleY = boxH / outSize;
  for (let oy = 0; oy < outSize; oy++) {
    const sy = Math.min(Math.max((oy + 0.5) * scaleY - 0.5, 0), boxH - 1);
    const y0 = Math.floor(sy);
    const y1 = Math.min(y0 + 1, boxH - 1);
    const fy = sy - y0;
    for (let ox = 0; ox < outSize; ox++) {
      const sx = Math.min(Math.max((ox + 0.5) * scaleX - 0.5, 0), boxW - 1);
      const x0 = Math.floor(sx);
      const x1 = Math.min(x0 + 1, boxW - 1);
      const fx = sx - x0;
      const base = (box.y0 + y0) * width + box.x0;
      const baseNext = (box.y0 + y1) * width + box.x0;
      const top = plane[base + x0] * (1 - fx) + plane[base + x1] * fx;
      const bottom = plane[baseNext + x0] * (1 - fx) + plane[baseNext + x1] * fx;
      out[oy * outSize + ox] = Math.round(top * (1 - fy) + bottom * fy);
    }
  }
  return { width: outSize, height: outSize, data: out };
}

/** Mirror an image left-right (an involution). */
export function flipHorizontal(image: GrayImage): GrayImage {
  const out = new Uint8Array(image.data.length);
  for (let y = 0; y < image.height; y++) {
    const row = y * image.width;
    for (let x = 0; x < image.width; x++) {
      out[row + x] = image.data[row + (image.width - 1 - x)];
    }
  }
  return { width: image.width, height: image.height, data: out };
}
