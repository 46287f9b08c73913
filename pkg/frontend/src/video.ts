import * as fs from 'node:fs';
import { spawnSync } from 'node:child_process';

import { UnreadableVideo } from './errors';
import { parseY4m, Y4mVideo } from './y4m';

/**
 * Decode a video into raw frames. `.y4m` streams are parsed directly; any
 * other container is piped through ffmpeg when available.
 */
export function openVideo(path: string): Y4mVideo {
  if (!fs.existsSync(path)) {
    throw new UnreadableVideo(`${path}: no such file`);
  }
  if (path.toLowerCase().endsWith('.y4m')) {
    return parseY4m(fs.readFileSync(path));
  }
  const result = spawnSync(
    'ffmpeg',
    ['-v', 'error', '-i', path, '-f', 'yuv4mpegpipe', '-pix_fmt', 'yuv420p', '-'],
    { maxBuffer: 1 << 30 },
  );
  if (result.error) {
    throw new UnreadableVideo(
      `${path}: not a .y4m stream and ffmpeg is unavailable (${result.error.message})`,
    );
  }
  if (result.status !== 0) {
    throw new UnreadableVideo(`${path}: ffmpeg failed: ${result.stderr?.toString().trim()}`);
  }
  return parseY4m(result.stdout);
}
