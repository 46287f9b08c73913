import { strict as assert } from 'node:assert';
import { spawnSync } from 'node:child_process';
import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';
import { test } from 'node:test';

import { manifestText } from '../src/manifest';
import { extractEyeCrops } from '../src/extract';
import { readPgm } from '../src/pgm';
import { UnreadableVideo } from '../src/errors';
import { openVideo } from '../src/video';

const FIXTURE = path.join(__dirname, '..', 'fixtures', 'clip.y4m');

function tmpDir(tag: string): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), `ingest-${tag}-`));
}

test('manifest text carries metadata comments and skip rows', () => {
  const text = manifestText('clip', 12, [
    { frameIndex: 0, leftFile: 'frame_0_L.pgm', rightFile: 'frame_0_R.pgm', skipped: false },
    { frameIndex: 1, leftFile: '', rightFile: '', skipped: true },
  ]);
  assert.equal(
    text,
    '# video_id=clip\n# fps=12\nframe,left_file,right_file,skipped\n' +
      '0,frame_0_L.pgm,frame_0_R.pgm,0\n1,,,1\n',
  );
});

test('unreadable inputs are rejected', () => {
  assert.throws(() => openVideo('/nonexistent/clip.y4m'), UnreadableVideo);
  const garbage = path.join(tmpDir('garbage'), 'clip.y4m');
  fs.writeFileSync(garbage, 'not a video');
  assert.throws(() => openVideo(garbage), UnreadableVideo);
});

test('fixture clip extraction honors the crop contract end to end', async () => {
  const outDir = tmpDir('crops');
  const summary = await extractEyeCrops(FIXTURE, outDir);

  assert.equal(summary.videoId, 'clip');
  assert.equal(summary.fps, 12);
  assert.equal(summary.frameTotal, 24);
  assert.equal(summary.skipped, 2); // the two faceless trailing frames
  assert.ok(summary.usable >= 20, `expected most frames usable, got ${summary.usable}`);

  const manifest = fs.readFileSync(path.join(outDir, 'manifest.csv'), 'utf-8');
  const lines = manifest.trim().split('\n');
  assert.equal(lines[0], '# video_id=clip');
  assert.equal(lines[1], '# fps=12');
  assert.equal(lines[2], 'frame,left_file,right_file,skipped');

  const indices: number[] = [];
  for (const line of lines.slice(3)) {
    const [frame, leftFile, rightFile, skipped] = line.split(',');
    indices.push(Number(frame));
    if (skipped === '0') {
      for (const name of [leftFile, rightFile]) {
        const image = readPgm(fs.readFileSync(path.join(outDir, name)));
        assert.equal(image.width, 50);
        assert.equal(image.height, 50);
      }
    } else {
      assert.equal(leftFile, '');
      assert.equal(rightFile, '');
    }
  }
  assert.ok(
    indices.every((v, i) => i === 0 || v > indices[i - 1]),
    'manifest frame indices must be strictly increasing',
  );

  // a closed eye leaves far less dark area in the crop than an open one
  const openEye = readPgm(fs.readFileSync(path.join(outDir, 'frame_0_R.pgm')));
  const closedEye = readPgm(fs.readFileSync(path.join(outDir, 'frame_7_R.pgm')));
  const darkShare = (img: { data: Uint8Array }) =>
    img.data.filter((v) => v < 76).length / img.data.length;
  assert.ok(darkShare(openEye) > 2 * darkShare(closedEye));
});

test('crops load bit-exactly through the screening package loader', async () => {
  const outDir = tmpDir('contract');
  await extractEyeCrops(FIXTURE, outDir);
  const probe = `
import sys
import numpy as np
from blinkscreen.cropdir import load_crop_frames
from blinkscreen.pgm import read_pgm

crops, frames = load_crop_frames(sys.argv[1])
indices = [r.frame_index for r in crops.records]
assert all(a < b for a, b in zip(indices, indices[1:])), "manifest order"
assert crops.fps == 12.0 and crops.video_id == "clip"
import os
for rec in crops.usable:
    for name in (rec.left_file, rec.right_file):
        path = os.path.join(sys.argv[1], name)
        raw = open(path, "rb").read()
        pixels = np.frombuffer(raw[raw.index(b"255\\n") + 4:], dtype=np.uint8)
        loaded = read_pgm(path)
        assert loaded.shape == (50, 50)
        assert np.array_equal(loaded, pixels.reshape(50, 50) / 255.0), name
print("CONTRACT OK", len(frames))
`;
  const result = spawnSync('python3', ['-c', probe, outDir], { encoding: 'utf-8' });
  assert.equal(result.status, 0, result.stderr);
  assert.match(result.stdout, /CONTRACT OK \d+/);
});

test('extraction is deterministic across runs', async () => {
  const a = tmpDir('det-a');
  const b = tmpDir('det-b');
  await extractEyeCrops(FIXTURE, a);
  await extractEyeCrops(FIXTURE, b);
  const names = fs.readdirSync(a).sort();
  assert.deepEqual(fs.readdirSync(b).sort(), names);
  for (const name of names) {
    assert.ok(
      fs.readFileSync(path.join(a, name)).equals(fs.readFileSync(path.join(b, name))),
      `${name} differs between runs`,
    );
  }
});

test('fps override replaces container metadata', async () => {
  const outDir = tmpDir('fps');
  const summary = await extractEyeCrops(FIXTURE, outDir, { fpsOverride: 24 });
  assert.equal(summary.fps, 24);
  const manifest = fs.readFileSync(path.join(outDir, 'manifest.csv'), 'utf-8');
  assert.match(manifest, /# fps=24\n/);
});
