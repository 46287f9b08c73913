"""Seeded synthetic blink-sequence generation.

A subject's eye alternates between a closed phase (EC seconds) and an open
phase (EO seconds); frame t is closed when (t/fps + phase) falls inside the
closed part of its cycle. One-sided weakness is modeled by shrinking the
affected eye's duty cycle EC/(EC+EO) by a factor rho (rho=0: the eye never
closes). Healthy subjects get occasional single-eye winks; per-cycle jitter
perturbs EC multiplicatively, keeping the mean duty cycle fixed.

For zero-jitter, zero-wink specs the closed/open decision is evaluated in
exact rational arithmetic (every float is a binary rational), so per-frame
counts agree bit-for-bit with ``oracle_ecf``, which counts by intersecting
closed intervals with the frame grid instead of testing frames one by one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .core import EyeState, EyeStateSequence, FrameStates, SubjectLabel
from .errors import (
    InvalidDuration,
    InvalidFps,
    InvalidRange,
    IoFailure,
    MalformedRecord,
    OracleInapplicable,
    ValidationFailure,
)

MAX_RHO = 0.6


@dataclass(frozen=True)
class BlinkProfile:
    """Periodic blink timing for one eye.

    ec_seconds may be 0 to model an eye that never closes (the fully
    paralyzed limit); otherwise the closed phase must be the brief one.
    """

    ec_seconds: float
    eo_seconds: float
    phase_offset_seconds: float = 0.0

    def __post_init__(self) -> None:
        if self.ec_seconds < 0:
            raise ValidationFailure(f"ec_seconds must be >= 0, got {self.ec_seconds}")
        if self.eo_seconds <= 0:
            raise ValidationFailure(f"eo_seconds must be > 0, got {self.eo_seconds}")
        if self.ec_seconds >= self.eo_seconds:
            raise ValidationFailure(
                f"closed phase must be shorter than open phase, got "
                f"ec={self.ec_seconds}, eo={self.eo_seconds}"
            )
        if self.phase_offset_seconds < 0:
            raise ValidationFailure("phase_offset_seconds must be >= 0")

    @property
    def period_seconds(self) -> float:
        return self.ec_seconds + self.eo_seconds

    @property
    def duty_cycle(self) -> float:
        """Fraction of time spent closed: EC / (EC + EO)."""
        return self.ec_seconds / self.period_seconds


@dataclass(frozen=True)
class SubjectSpec:
    """Both eyes' blink profiles plus noise parameters for one subject."""

    label: SubjectLabel
    left: BlinkProfile
    right: BlinkProfile
    jitter_fraction: float = 0.0
    wink_rate_per_minute: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.jitter_fraction < 0.5:
            raise ValidationFailure(
                f"jitter_fraction must lie in [0, 0.5), got {self.jitter_fraction}"
            )
        if self.wink_rate_per_minute < 0:
            raise ValidationFailure("wink_rate_per_minute must be >= 0")


def normal_subject(
    base: BlinkProfile,
    jitter_fraction: float = 0.0,
    wink_rate_per_minute: float = 0.0,
) -> SubjectSpec:
    """Healthy subject: both eyes share the same profile."""
    return SubjectSpec(
        label=SubjectLabel.NORMAL,
        left=base,
        right=base,
        jitter_fraction=jitter_fraction,
        wink_rate_per_minute=wink_rate_per_minute,
    )


def palsy_subject(
    base: BlinkProfile,
    rho: float,
    affected_side: str = "left",
    jitter_fraction: float = 0.0,
) -> SubjectSpec:
    """Affected subject: one eye's duty cycle is scaled down by rho.

    The affected eye keeps the same blink period; its closed phase shrinks to
    rho * EC (rho=0: never closes). rho is capped at MAX_RHO so the affected
    eye stays clearly weaker than the healthy one.
    """
    if not 0.0 <= rho <= MAX_RHO:
        raise InvalidRange(f"rho must lie in [0, {MAX_RHO}], got {rho}")
    if affected_side not in ("left", "right"):
        raise InvalidRange(f"affected_side must be 'left' or 'right', got {affected_side!r}")
    reduced = replace(
        base,
        ec_seconds=rho * base.ec_seconds,
        eo_seconds=base.period_seconds - rho * base.ec_seconds,
    )
    left, right = (reduced, base) if affected_side == "left" else (base, reduced)
    return SubjectSpec(label=SubjectLabel.PALSY, left=left, right=right)


def _frame_total(duration_seconds: float, fps: float) -> int:
    if not fps > 0:
        raise InvalidFps(f"fps must be > 0, got {fps}")
    total = int(round(duration_seconds * fps))
    if total < 1:
        raise InvalidDuration(
            f"duration {duration_seconds}s at {fps} fps yields no frames"
        )
    return total


def _closed_frames_exact(profile: BlinkProfile, frame_total: int, fps: float) -> np.ndarray:
    """Per-frame closed mask via exact rational arithmetic (no jitter).

    The test ((t/fps + phase) mod period) < ec is reduced to pure integer
    comparisons so the result is free of float rounding at phase boundaries.
    """
    if profile.ec_seconds == 0.0:
        return np.zeros(frame_total, dtype=bool)
    inv_fps = Fraction(1) / Fraction(fps)
    phase = Fraction(profile.phase_offset_seconds)
    period = Fraction(profile.ec_seconds) + Fraction(profile.eo_seconds)
    ec = Fraction(profile.ec_seconds)

    # t/fps + phase = (t*a + b) / d;  pos = ((t*a + b)*q mod d*p) / (d*q)
    d = inv_fps.denominator * phase.denominator
    a = inv_fps.numerator * phase.denominator
    b = phase.numerator * inv_fps.denominator
    p, q = period.numerator, period.denominator
    modulus = d * p
    a_q, b_q = a * q, b * q
    # pos < ec  <=>  remainder * ec.den < ec.num * d * q
    threshold = ec.numerator * d * q
    ec_den = ec.denominator

    mask = np.empty(frame_total, dtype=bool)
    for t in range(frame_total):
        remainder = (t * a_q + b_q) % modulus
        mask[t] = remainder * ec_den < threshold
    return mask


def _closed_frames_jittered(
    profile: BlinkProfile, frame_total: int, fps: float, jitter: float, rng: np.random.Generator
) -> np.ndarray:
    """Per-frame closed mask with each cycle's EC perturbed multiplicatively."""
    if profile.ec_seconds == 0.0:
        return np.zeros(frame_total, dtype=bool)
    period = profile.period_seconds
    tau = np.arange(frame_total, dtype=np.float64) / fps + profile.phase_offset_seconds
    cycle = np.floor(tau / period).astype(np.int64)
    n_cycles = int(cycle.max()) + 1
    noise = rng.uniform(-1.0, 1.0, size=n_cycles)
    ec_per_cycle = profile.ec_seconds * (1.0 + jitter * noise)
    position = tau - cycle * period
    return position < ec_per_cycle[cycle]


def _apply_winks(
    closed_left: np.ndarray,
    closed_right: np.ndarray,
    spec: SubjectSpec,
    duration_seconds: float,
    fps: float,
    rng: np.random.Generator,
) -> None:
    """Overlay momentary single-eye closures, each lasting one EC phase."""
    expected = spec.wink_rate_per_minute * duration_seconds / 60.0
    count = int(rng.poisson(expected))
    if count == 0:
        return
    starts = rng.uniform(0.0, duration_seconds, size=count)
    sides = rng.integers(0, 2, size=count)
    times = np.arange(len(closed_left), dtype=np.float64) / fps
    for start, side in zip(starts, sides):
        eye_mask, ec = (
            (closed_left, spec.left.ec_seconds) if side == 0 else (closed_right, spec.right.ec_seconds)
        )
        if ec <= 0:
            continue
        eye_mask |= (times >= start) & (times < start + ec)


def generate_sequence(
    spec: SubjectSpec,
    duration_seconds: float,
    fps: float,
    seed: int,
    video_id: str | None = None,
) -> EyeStateSequence:
    """Render one subject's eye-state sequence, deterministic in the seed."""
    frame_total = _frame_total(duration_seconds, fps)
    ss = np.random.SeedSequence(seed)
    rng_left, rng_right, rng_wink = (np.random.default_rng(c) for c in ss.spawn(3))

    if spec.jitter_fraction == 0.0:
        closed_left = _closed_frames_exact(spec.left, frame_total, fps)
        closed_right = _closed_frames_exact(spec.right, frame_total, fps)
    else:
        closed_left = _closed_frames_jittered(
            spec.left, frame_total, fps, spec.jitter_fraction, rng_left
        )
        closed_right = _closed_frames_jittered(
            spec.right, frame_total, fps, spec.jitter_fraction, rng_right
        )

    if spec.label is SubjectLabel.NORMAL and spec.wink_rate_per_minute > 0:
        _apply_winks(closed_left, closed_right, spec, duration_seconds, fps, rng_wink)

    frames = tuple(
        FrameStates(t, EyeState(int(closed_left[t])), EyeState(int(closed_right[t])))
        for t in range(frame_total)
    )
    return EyeStateSequence(
        video_id=video_id if video_id is not None else f"synth_{seed}",
        fps=fps,
        frames=frames,
    )


def oracle_ecf(
    spec: SubjectSpec, duration_seconds: float, fps: float
) -> tuple[int, int]:
    """Closed-form per-eye closed-frame counts for noise-free specs.

    Counts integers t in [0, F) with (t/fps + phase) mod period < ec by
    intersecting each cycle's closed interval with the frame grid; exact
    rational bounds make the result identical to frame-by-frame counting.
    """
    if spec.jitter_fraction != 0.0:
        raise OracleInapplicable("closed form requires zero jitter")
    if spec.wink_rate_per_minute != 0.0:
        raise OracleInapplicable("closed form requires zero wink rate")
    frame_total = _frame_total(duration_seconds, fps)
    return (
        _interval_count(spec.left, frame_total, fps),
        _interval_count(spec.right, frame_total, fps),
    )


def _interval_count(profile: BlinkProfile, frame_total: int, fps: float) -> int:
    if profile.ec_seconds == 0.0:
        return 0
    fps_frac = Fraction(fps)
    phase = Fraction(profile.phase_offset_seconds)
    ec = Fraction(profile.ec_seconds)
    period = ec + Fraction(profile.eo_seconds)

    tau_max = Fraction(frame_total - 1) / fps_frac + phase
    k_lo = math.floor(phase / period)
    k_hi = math.floor(tau_max / period)
    count = 0
    for k in range(k_lo, k_hi + 1):
        # closed interval of cycle k in frame units: [ (kP - phase) fps, (kP + EC - phase) fps )
        lo = math.ceil((k * period - phase) * fps_frac)
        hi = math.ceil((k * period + ec - phase) * fps_frac)
        count += max(0, min(hi, frame_total) - max(lo, 0))
    return count


@dataclass(frozen=True)
class CohortRanges:
    """Sampling ranges and clip geometry for cohort generation."""

    ec_range: tuple[float, float] = (0.2, 0.4)
    eo_range: tuple[float, float] = (2.2, 3.8)
    jitter_range: tuple[float, float] = (0.01, 0.05)
    rho_range: tuple[float, float] = (0.0, 0.5)
    wink_rate_per_minute: float = 1.0
    duration_seconds: float = 30.0
    fps: float = 30.0

    def __post_init__(self) -> None:
        for name, (lo, hi) in (
            ("ec_range", self.ec_range),
            ("eo_range", self.eo_range),
            ("jitter_range", self.jitter_range),
            ("rho_range", self.rho_range),
        ):
            if lo > hi:
                raise InvalidRange(f"{name} is empty: {lo} > {hi}")
        if self.ec_range[0] <= 0:
            raise InvalidRange("ec_range must be positive")
        if self.eo_range[0] <= self.ec_range[1]:
            raise InvalidRange("eo_range must lie above ec_range")
        if not 0 <= self.jitter_range[0] <= self.jitter_range[1] < 0.5:
            raise InvalidRange("jitter_range must lie in [0, 0.5)")
        if not 0 <= self.rho_range[0] <= self.rho_range[1] <= MAX_RHO:
            raise InvalidRange(f"rho_range must lie in [0, {MAX_RHO}]")
        if self.wink_rate_per_minute < 0:
            raise InvalidRange("wink_rate_per_minute must be >= 0")


@dataclass(frozen=True)
class CohortMember:
    """One generated subject: the sequence plus its provenance."""

    sequence: EyeStateSequence
    label: SubjectLabel
    rho: float
    seed: int


def generate_cohort(
    n_normal: int,
    n_palsy: int,
    ranges: CohortRanges | None = None,
    seed: int = 0,
) -> list[CohortMember]:
    """Sample a labeled cohort of synthetic subjects, deterministic in the seed.

    rho records the affected eye's duty-cycle reduction; healthy subjects
    carry rho=1 (no reduction).
    """
    if n_normal < 1 or n_palsy < 1:
        raise InvalidRange(
            f"need at least one subject per class, got ({n_normal}, {n_palsy})"
        )
    ranges = ranges or CohortRanges()
    master = np.random.default_rng(seed)

    members: list[CohortMember] = []
    for i in range(n_normal + n_palsy):
        is_normal = i < n_normal
        ec = float(master.uniform(*ranges.ec_range))
        eo = float(master.uniform(*ranges.eo_range))
        phase = float(master.uniform(0.0, ec + eo))
        jitter = float(master.uniform(*ranges.jitter_range))
        rho = 1.0 if is_normal else float(master.uniform(*ranges.rho_range))
        side = "left" if master.integers(0, 2) == 0 else "right"
        subject_seed = int(master.integers(0, 2**31))

        base = BlinkProfile(ec_seconds=ec, eo_seconds=eo, phase_offset_seconds=phase)
        if is_normal:
            spec = SubjectSpec(
                label=SubjectLabel.NORMAL,
                left=base,
                right=base,
                jitter_fraction=jitter,
                wink_rate_per_minute=ranges.wink_rate_per_minute,
            )
            video_id = f"normal_{i:03d}"
        else:
            weak = palsy_subject(base, rho=rho, affected_side=side)
            spec = replace(weak, jitter_fraction=jitter)
            video_id = f"palsy_{i - n_normal:03d}"

        sequence = generate_sequence(
            spec, ranges.duration_seconds, ranges.fps, seed=subject_seed, video_id=video_id
        )
        members.append(
            CohortMember(sequence=sequence, label=spec.label, rho=rho, seed=subject_seed)
        )
    return members


MANIFEST_FILE_NAME = "manifest.csv"
COHORT_MANIFEST_HEADER = "video_id,label,rho,seed"


def cohort_manifest_text(members: list[CohortMember]) -> str:
    rows = [COHORT_MANIFEST_HEADER]
    rows.extend(
        f"{m.sequence.video_id},{m.label.value},{m.rho!r},{m.seed}" for m in members
    )
    return "\n".join(rows) + "\n"


def read_cohort_manifest(path) -> dict[str, SubjectLabel]:
    """Map video_id -> label from a cohort manifest CSV."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    if not lines or lines[0] != COHORT_MANIFEST_HEADER:
        raise MalformedRecord(f"{path}: expected header {COHORT_MANIFEST_HEADER!r}")
    labels: dict[str, SubjectLabel] = {}
    for lineno, line in enumerate(lines[1:], 2):
        parts = line.split(",")
        if len(parts) != 4:
            raise MalformedRecord(f"{path}:{lineno}: expected 4 fields, got {len(parts)}")
        labels[parts[0]] = SubjectLabel.from_text(parts[1])
    return labels


def make_toy_crop(state: EyeState, rng: np.random.Generator) -> np.ndarray:
    """Procedural 50x50 stand-in for an eye crop.

    The lower half is bright for an open eye and dark for a closed one, with
    uniform pixel noise everywhere; linearly separable by construction.
    """
    crop = rng.uniform(0.45, 0.55, size=(50, 50))
    lower_mean = 0.85 if state is EyeState.OPEN else 0.15
    crop[25:, :] = rng.uniform(lower_mean - 0.1, lower_mean + 0.1, size=(25, 50))
    return crop


def make_toy_crop_set(
    count: int, seed: int
) -> list[tuple[np.ndarray, EyeState]]:
    """Balanced procedural crop set (alternating open/closed)."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        state = EyeState.OPEN if i % 2 == 0 else EyeState.CLOSED
        out.append((make_toy_crop(state, rng), state))
    return out
