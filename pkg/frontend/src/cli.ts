import { AdapterUsageError, NoFaceFound, UnreadableVideo } from './errors';
import { extractEyeCrops } from './extract';

interface CliArgs {
  video: string;
  out: string;
  fpsOverride?: number;
  videoId?: string;
  modelDir?: string;
}

function parseArgs(argv: string[]): CliArgs {
  const args: Partial<CliArgs> = {};
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const next = () => {
      const value = argv[++i];
      if (value === undefined) throw new AdapterUsageError(`${flag} needs a value`);
      return value;
    };
    switch (flag) {
      case '--video':
        args.video = next();
        break;
      case '--out':
        args.out = next();
        break;
      case '--fps-override': {
        const fps = Number(next());
        if (!(fps > 0)) throw new AdapterUsageError('--fps-override must be > 0');
        args.fpsOverride = fps;
        break;
      }
      case '--video-id':
        args.videoId = next();
        break;
      case '--model-dir':
        args.modelDir = next();
        break;
      case '--help':
      case '-h':
        console.log(
          'usage: extract-eye-crops --video <clip> --out <dir> ' +
            '[--fps-override N] [--video-id ID] [--model-dir DIR]',
        );
        process.exit(0);
        break;
      default:
        throw new AdapterUsageError(`unknown flag ${flag}`);
    }
  }
  if (!args.video || !args.out) {
    throw new AdapterUsageError('both --video and --out are required');
  }
  return args as CliArgs;
}

async function main(): Promise<number> {
  try {
    const args = parseArgs(process.argv.slice(2));
    const summary = await extractEyeCrops(args.video, args.out, {
      fpsOverride: args.fpsOverride,
      videoId: args.videoId,
      modelDir: args.modelDir,
    });
    console.log(
      `${summary.videoId}: ${summary.usable}/${summary.frameTotal} frames usable ` +
        `(${summary.skipped} skipped), fps=${summary.fps} -> ${args.out}`,
    );
    return 0;
  } catch (err) {
    if (
      err instanceof AdapterUsageError ||
      err instanceof UnreadableVideo ||
      err instanceof NoFaceFound
    ) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    console.error(`internal error: ${(err as Error).stack ?? err}`);
    return 1;
  }
}

main().then((code) => {
  process.exitCode = code;
});
