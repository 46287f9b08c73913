import * as fs from 'node:fs';
import * as path from 'node:path';

export const MANIFEST_NAME = 'manifest.csv';
export const MANIFEST_HEADER = 'frame,left_file,right_file,skipped';

export interface ManifestRow {
  frameIndex: number;
  leftFile: string; // empty when skipped
  rightFile: string;
  skipped: boolean;
}

export function manifestText(videoId: string, fps: number, rows: ManifestRow[]): string {
  const lines = [`# video_id=${videoId}`, `# fps=${fps}`, MANIFEST_HEADER];
  for (const row of rows) {
    lines.push(`${row.frameIndex},${row.leftFile},${row.rightFile},${row.skipped ? 1 : 0}`);
  }
  return lines.join('\n') + '\n';
}

export function writeManifest(dir: string, videoId: string, fps: number, rows: ManifestRow[]): void {
  fs.writeFileSync(path.join(dir, MANIFEST_NAME), manifestText(videoId, fps, rows));
}
