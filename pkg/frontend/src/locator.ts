import * as fs from 'node:fs';
import * as path from 'node:path';

import * as faceapi from '@vladmandic/face-api/dist/face-api.esm-nobundle.js';

import { Box, paddedBox } from './image';
import { YuvFrame, frameToRgb } from './y4m';

interface DisposableTensor {
  dispose(): void;
}

// the published face-api typings only cover a slice of the re-exported tf
interface TfRuntime {
  setBackend(name: string): Promise<boolean>;
  ready(): Promise<void>;
  tensor3d(values: Float32Array, shape: [number, number, number]): DisposableTensor;
}

const tf = faceapi.tf as unknown as TfRuntime;

const MIN_SCORE = 0.1;

/** Eye regions for one frame, in subject terms (subject-left appears on the
 * image's right side for a camera-facing subject). */
export interface EyeBoxes {
  subjectLeft: Box;
  subjectRight: Box;
}

function detectorInputSize(width: number, height: number): number {
  // tiny detector wants a multiple of 32; track the frame's larger side
  const side = Math.max(width, height);
  return Math.min(416, Math.max(128, Math.round(side / 32) * 32));
}

export function defaultModelDir(startDir: string = __dirname): string {
  let dir = startDir;
  for (let i = 0; i < 8; i++) {
    const candidate = path.join(dir, 'node_modules', '@vladmandic', 'face-api', 'model');
    if (fs.existsSync(candidate)) return candidate;
    const parent = path.dirname(dir);
    if (parent === dir) break;
    dir = parent;
  }
  throw new Error('cannot find @vladmandic/face-api model directory; pass --model-dir');
}

/**
 * Facial-landmark eye localizer. Landmarks are used only to place the two
 * eye boxes; detection quality beyond that does not matter downstream.
 */
export class EyeLocator {
  private constructor(private options: faceapi.TinyFaceDetectorOptions) {}

  static async create(modelDir?: string): Promise<EyeLocator> {
    await tf.setBackend('cpu');
    await tf.ready();
    const dir = modelDir ?? defaultModelDir();
    await faceapi.nets.tinyFaceDetector.loadFromDisk(dir);
    await faceapi.nets.faceLandmark68Net.loadFromDisk(dir);
    return new EyeLocator(
      new faceapi.TinyFaceDetectorOptions({ inputSize: 416, scoreThreshold: MIN_SCORE }),
    );
  }

  /** Locate both eyes; null when no face clears the detection threshold. */
  async locate(frame: YuvFrame): Promise<EyeBoxes | null> {
    const options = new faceapi.TinyFaceDetectorOptions({
      inputSize: detectorInputSize(frame.width, frame.height),
      scoreThreshold: MIN_SCORE,
    });
    const rgb = frameToRgb(frame);
    const tensor = tf.tensor3d(Float32Array.from(rgb), [frame.height, frame.width, 3]);
    try {
      const detection = await faceapi
        .detectSingleFace(tensor as unknown as faceapi.TNetInput, options)
        .withFaceLandmarks();
      if (!detection) return null;
      // the 68-landmark model's "left eye" is image-left, i.e. the
      // subject's right eye on a camera-facing subject
      const imageLeft = detection.landmarks.getLeftEye();
      const imageRight = detection.landmarks.getRightEye();
      return {
        subjectRight: paddedBox(imageLeft, frame.width, frame.height),
        subjectLeft: paddedBox(imageRight, frame.width, frame.height),
      };
    } finally {
      tensor.dispose();
    }
  }
}
