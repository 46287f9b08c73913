import * as fs from 'node:fs';
import * as path from 'node:path';

import { cropResize, flipHorizontal } from './image';
import { EyeLocator } from './locator';
import { ManifestRow, writeManifest } from './manifest';
import { writePgm } from './pgm';
import { openVideo } from './video';

export interface ExtractOptions {
  fpsOverride?: number;
  videoId?: string;
  modelDir?: string;
}

export interface ExtractSummary {
  videoId: string;
  fps: number;
  frameTotal: number;
  usable: number;
  skipped: number;
}

/**
 * Decode a video, localize both eyes per frame, and write one 50x50
 * grayscale PGM pair per usable frame plus the manifest. The subject-left
 * crop is mirrored to right-eye orientation before writing. Frames without
 * a detectable face are skipped and recorded.
 */
export async function extractEyeCrops(
  videoPath: string,
  outDir: string,
  options: ExtractOptions = {},
): Promise<ExtractSummary> {
  const video = openVideo(videoPath);
  const fps = options.fpsOverride ?? video.fps;
  const videoId = options.videoId ?? path.basename(videoPath).replace(/\.[^.]+$/, '');
  const locator = await EyeLocator.create(options.modelDir);

  fs.mkdirSync(outDir, { recursive: true });
  const rows: ManifestRow[] = [];
  let usable = 0;
  for (let index = 0; index < video.frames.length; index++) {
    const frame = video.frames[index];
    const eyes = await locator.locate(frame);
    if (!eyes) {
      rows.push({ frameIndex: index, leftFile: '', rightFile: '', skipped: true });
      continue;
    }
    const leftName = `frame_${index}_L.pgm`;
    const rightName = `frame_${index}_R.pgm`;
    const leftCrop = flipHorizontal(cropResize(frame.y, frame.width, eyes.subjectLeft));
    const rightCrop = cropResize(frame.y, frame.width, eyes.subjectRight);
    writePgm(path.join(outDir, leftName), leftCrop);
    writePgm(path.join(outDir, rightName), rightCrop);
    rows.push({ frameIndex: index, leftFile: leftName, rightFile: rightName, skipped: false });
    usable++;
  }
  writeManifest(outDir, videoId, fps, rows);
  return {
    videoId,
    fps,
    frameTotal: video.frames.length,
    usable,
    skipped: video.frames.length - usable,
  };
}
