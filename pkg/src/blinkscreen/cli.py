"""Command-line workflow driver.

Subcommands mirror the pipeline stages: train the frame-level blink detector,
classify crop directories into eye-state streams, extract per-video features,
train/evaluate the video-level detector, simulate labeled cohorts, and screen
a single subject end to end. Every command takes --seed and is deterministic
given identical inputs and seeds. Exit codes: 0 success, 2 validation error,
1 internal error. BLINKSCREEN_THREADS caps the per-video worker pool.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import core, cropdir, detector, evaluate, features, synth
from .errors import BlinkScreenError, ValidationFailure
from .nn import (
    dataset_report,
    load_crop_dataset,
    load_model,
    predict_eye_states,
    save_model,
    train_blink_detector,
)


def _worker_count() -> int:
    env = os.environ.get("BLINKSCREEN_THREADS")
    if env:
        try:
            count = int(env)
        except ValueError:
            raise ValidationFailure(f"BLINKSCREEN_THREADS must be an integer, got {env!r}")
        if count < 1:
            raise ValidationFailure("BLINKSCREEN_THREADS must be >= 1")
        return count
    return min(8, os.cpu_count() or 1)


def _parse_split(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValidationFailure(f"--split needs three comma-separated ratios, got {text!r}")
    try:
        ratios = tuple(float(p) for p in parts)
    except ValueError:
        raise ValidationFailure(f"--split ratios must be numbers, got {text!r}") from None
    return ratios  # type: ignore[return-value]


LEARNERS = ("hinge", "logistic", "knn")


def _make_learner(name: str, seed: int):
    if name == "hinge":
        return lambda data: detector.train_hinge_sgd(data, seed=seed)
    if name == "logistic":
        return lambda data: detector.train_logistic(data)
    if name == "knn":
        return lambda data: detector.train_knn(data)
    raise ValidationFailure(f"unknown learner {name!r}")


def _percent(value: float) -> str:
    return f"{100.0 * value:.2f}%"


def cmd_train_blink(args: argparse.Namespace) -> int:
    dataset = load_crop_dataset(args.data)
    labels = [state for _, state in dataset]
    train, val, test = evaluate.holdout_split(
        dataset, labels, ratios=_parse_split(args.split), seed=args.seed
    )
    model = train_blink_detector(train, val, seed=args.seed, epochs=args.epochs)
    save_model(model, args.out)

    print(f"blink detector: {len(train)} train / {len(val)} val / {len(test)} test")
    print(f"{'phase':<12}{'accuracy':>10}")
    for phase, subset in (("training", train), ("validation", val), ("testing", test)):
        report = dataset_report(model, subset)
        print(f"{phase:<12}{_percent(report.accuracy):>10}")
    print(f"model written to {args.out}")
    return 0


def _classify_one(model, directory: str) -> core.EyeStateSequence:
    crops, pairs = cropdir.load_crop_frames(directory)
    states = predict_eye_states(
        model, [img for pair in pairs for img in (pair.left_image, pair.right_image)]
    )
    rows = []
    for i, pair in enumerate(pairs):
        left_state, _ = states[2 * i]
        right_state, _ = states[2 * i + 1]
        rows.append(core.FrameStates(pair.frame_index, left_state, right_state))
    return core.EyeStateSequence(video_id=crops.video_id, fps=crops.fps, frames=tuple(rows))


def _crop_video_dirs(root: str) -> list[str]:
    if os.path.isfile(os.path.join(root, cropdir.MANIFEST_NAME)):
        return [root]
    children = sorted(
        os.path.join(root, name)
        for name in os.listdir(root)
        if os.path.isfile(os.path.join(root, name, cropdir.MANIFEST_NAME))
    )
    if not children:
        raise ValidationFailure(f"{root}: no {cropdir.MANIFEST_NAME} found")
    return children


def cmd_classify_frames(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    directories = _crop_video_dirs(args.crops)
    if len(directories) == 1 and directories[0] == args.crops:
        sequence = _classify_one(model, args.crops)
        core.write_eye_state_stream(sequence, args.out)
        print(f"{sequence.video_id}: {sequence.frame_count} frames -> {args.out}")
        return 0
    os.makedirs(args.out, exist_ok=True)
    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        sequences = list(pool.map(lambda d: _classify_one(model, d), directories))
    for sequence in sorted(sequences, key=lambda s: s.video_id):
        out_path = os.path.join(args.out, f"{sequence.video_id}.csv")
        core.write_eye_state_stream(sequence, out_path)
        print(f"{sequence.video_id}: {sequence.frame_count} frames -> {out_path}")
    return 0


def _stream_paths(directory: str) -> list[str]:
    paths = sorted(
        os.path.join(directory, name)
        for name in os.listdir(directory)
        if name.endswith(".csv") and name != synth.MANIFEST_FILE_NAME
    )
    if not paths:
        raise ValidationFailure(f"{directory}: no stream files found")
    return paths


def cmd_extract(args: argparse.Namespace) -> int:
    labels_path = args.labels or os.path.join(args.streams, synth.MANIFEST_FILE_NAME)
    labels = synth.read_cohort_manifest(labels_path)

    def one(path: str) -> core.BlinkFeature:
        sequence = core.read_eye_state_stream(path)
        if args.median_filter:
            sequence = features.median_filter3(sequence)
        return features.extract_feature(sequence)

    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        extracted = list(pool.map(one, _stream_paths(args.streams)))

    rows: list[tuple[core.BlinkFeature, core.SubjectLabel]] = []
    for feature in sorted(extracted, key=lambda f: f.video_id):
        if feature.video_id not in labels:
            raise ValidationFailure(f"no label for video {feature.video_id!r} in {labels_path}")
        rows.append((feature, labels[feature.video_id]))
    core.write_feature_table(rows, args.out)
    print(f"{len(rows)} videos -> {args.out}")
    return 0


def cmd_train_detector(args: argparse.Namespace) -> int:
    table = core.read_feature_table(args.features)
    data = [(feature.bs, label) for feature, label in table]
    model = _make_learner(args.learner, args.seed)(data)
    detector.save_detector(model, args.out)
    print(f"{args.learner} detector on {len(data)} videos -> {args.out}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    table = core.read_feature_table(args.features)
    scores = [feature.bs for feature, _ in table]
    labels = [label for _, label in table]
    report = evaluate.kfold_cv(
        scores,
        labels,
        learner=_make_learner(args.learner, args.seed),
        predictor=detector.predict,
        k=args.kfold,
        seed=args.seed,
    )
    print(f"learner: {args.learner}   folds: {args.kfold}   videos: {report.n}")
    print(report.to_text(("normal", "palsy"), ("normal", "palsy")))
    print(f"cross-validation accuracy: {_percent(report.accuracy)}")
    if args.report_csv:
        core.atomic_write_text(args.report_csv, report.to_csv())
        print(f"report written to {args.report_csv}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    ranges = synth.CohortRanges(duration_seconds=args.duration, fps=args.fps)
    members = synth.generate_cohort(args.normal, args.palsy, ranges, seed=args.seed)
    os.makedirs(args.out, exist_ok=True)
    for member in members:
        path = os.path.join(args.out, f"{member.sequence.video_id}.csv")
        core.write_eye_state_stream(member.sequence, path)
    core.atomic_write_text(
        os.path.join(args.out, synth.MANIFEST_FILE_NAME), synth.cohort_manifest_text(members)
    )
    print(f"{len(members)} videos ({args.normal} normal / {args.palsy} palsy) -> {args.out}")
    return 0


def cmd_screen(args: argparse.Namespace) -> int:
    blink_model = load_model(args.model)
    palsy_model = detector.load_detector(args.detector)
    sequence = _classify_one(blink_model, args.crops)
    if args.median_filter:
        sequence = features.median_filter3(sequence)
    feature = features.extract_feature(sequence)
    verdict = detector.predict(palsy_model, feature.bs)
    severity = features.severity_score(feature.bs)
    print(f"video: {feature.video_id}")
    print(f"frames: {feature.frame_count}  closed left/right: {feature.ecf_left}/{feature.ecf_right}")
    print(f"blink similarity: {feature.bs:.4f}")
    print(f"severity: {severity:.4f}")
    print(f"verdict: {verdict.value}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blinkscreen",
        description="Blink-asymmetry screening pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train-blink", help="train the frame-level blink detector")
    p.add_argument("--data", required=True, help="crop dataset root with open/ and closed/")
    p.add_argument("--split", default="0.7,0.15,0.15", help="train,val,test ratios")
    p.add_argument("--out", required=True, help="output model file")
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train_blink)

    p = sub.add_parser("classify-frames", help="crop directory -> eye-state stream")
    p.add_argument("--model", required=True)
    p.add_argument("--crops", required=True, help="crop directory (or parent of several)")
    p.add_argument("--out", required=True, help="stream file (or directory for several)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_classify_frames)

    p = sub.add_parser("extract", help="eye-state streams -> feature table")
    p.add_argument("--streams", required=True, help="directory of stream CSVs")
    p.add_argument("--out", required=True, help="output feature table CSV")
    p.add_argument("--labels", default=None, help="labels manifest (default <streams>/manifest.csv)")
    p.add_argument("--median-filter", action="store_true", help="median-of-3 smoothing per eye")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train-detector", help="train the video-level detector")
    p.add_argument("--features", required=True)
    p.add_argument("--learner", choices=LEARNERS, default="hinge")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train_detector)

    p = sub.add_parser("evaluate", help="k-fold cross-validation on a feature table")
    p.add_argument("--features", required=True)
    p.add_argument("--learner", choices=LEARNERS, default="hinge")
    p.add_argument("--kfold", type=int, default=3)
    p.add_argument("--report-csv", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("simulate", help="generate a labeled synthetic cohort")
    p.add_argument("--normal", type=int, default=34)
    p.add_argument("--palsy", type=int, default=41)
    p.add_argument("--duration", type=float, default=30.0, help="seconds per video")
    p.add_argument("--fps", type=float, default=30.0)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("screen", help="single-subject verdict from a crop directory")
    p.add_argument("--model", required=True, help="blink detector model file")
    p.add_argument("--detector", required=True, help="video-level detector file")
    p.add_argument("--crops", required=True)
    p.add_argument("--median-filter", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_screen)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BlinkScreenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
