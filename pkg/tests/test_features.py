from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from blinkscreen.core import EyeState
from blinkscreen.errors import InvalidFps, NoBlinksObserved, OutOfRange
from blinkscreen.features import (
    blink_similarity,
    count_eye_closed_frames,
    estimate_ect,
    extract_feature,
    median_filter3,
    severity_score,
)

from conftest import random_sequence, sequence_from_states


def brute_force_counts(seq) -> tuple[int, int]:
    """Independent recount straight off the frame tuples."""
    left = right = 0
    for fr in seq.frames:
        left += 1 if fr.left == EyeState.CLOSED else 0
        right += 1 if fr.right == EyeState.CLOSED else 0
    return left, right


class TestCounting:
    def test_all_open_counts_zero(self):
        seq = sequence_from_states([(0, 0)] * 10)
        assert count_eye_closed_frames(seq) == (0, 0)

    def test_enumerated_counts(self):
        states = [(0, 0)] * 10
        for i in (2, 3, 4):
            states[i] = (1, states[i][1])
        states[3] = (states[3][0], 1)
        seq = sequence_from_states(states)
        assert count_eye_closed_frames(seq) == (3, 1)

    def test_swapped_columns_swap_counts(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            seq = random_sequence(rng)
            swapped = sequence_from_states(
                [(int(fr.right), int(fr.left)) for fr in seq.frames]
            )
            l, r = count_eye_closed_frames(seq)
            assert count_eye_closed_frames(swapped) == (r, l)

    def test_matches_brute_force_on_random_sequences(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            seq = random_sequence(rng)
            assert count_eye_closed_frames(seq) == brute_force_counts(seq)


class TestClosedTime:
    def test_basic_seconds(self):
        assert estimate_ect(30, 300, 30.0) == 1.0

    def test_zero_count(self):
        assert estimate_ect(0, 300, 30.0) == 0.0

    def test_closed_whole_video_equals_length(self):
        frame_count, fps = 300, 30.0
        assert estimate_ect(frame_count, frame_count, fps) == frame_count / fps

    def test_bad_fps(self):
        with pytest.raises(InvalidFps):
            estimate_ect(1, 10, 0.0)

    def test_ratio_identity_rational(self):
        """Closed-time ratios must equal count ratios independent of fps.

        Float division does not satisfy the identity bit-for-bit, so the
        check runs in exact rational arithmetic; the float path is then tied
        to the rational value (integer fps divides to the same rounding).
        """
        rng = np.random.default_rng(7)
        checked = 0
        while checked < 1000:
            seq = random_sequence(rng)
            ecf_l, ecf_r = count_eye_closed_frames(seq)
            if ecf_r == 0:
                continue
            checked += 1
            reference = Fraction(ecf_l, ecf_r)
            for fps in (24, 25, 30, 60):
                ect_l = Fraction(ecf_l) / Fraction(fps)
                ect_r = Fraction(ecf_r) / Fraction(fps)
                assert ect_l / ect_r == reference
                assert estimate_ect(ecf_l, seq.frame_count, fps) == float(ect_l)
                assert estimate_ect(ecf_r, seq.frame_count, fps) == float(ect_r)


class TestBlinkSimilarity:
    def test_equal_counts_give_one(self):
        assert blink_similarity(10, 10) == 1.0

    def test_one_sided_gives_zero(self):
        assert blink_similarity(0, 7) == 0.0

    def test_hand_computed_quarter(self):
        assert blink_similarity(12, 48) == 0.25

    def test_both_zero_raises(self):
        with pytest.raises(NoBlinksObserved):
            blink_similarity(0, 0)

    def test_negative_rejected(self):
        with pytest.raises(OutOfRange):
            blink_similarity(-1, 3)

    @given(st.integers(0, 10**6), st.integers(0, 10**6))
    def test_symmetry_and_range(self, a, b):
        if a == 0 and b == 0:
            return
        bs = blink_similarity(a, b)
        assert bs == blink_similarity(b, a)
        assert 0.0 <= bs <= 1.0
        assert (bs == 1.0) == (a == b)

    @given(st.integers(0, 10**4), st.integers(0, 10**4), st.integers(1, 100))
    def test_scale_invariance(self, a, b, k):
        if a == 0 and b == 0:
            return
        assert blink_similarity(k * a, k * b) == blink_similarity(a, b)

    def test_thousand_random_pairs(self):
        rng = np.random.default_rng(3)
        for _ in range(1000):
            a, b = int(rng.integers(0, 5000)), int(rng.integers(1, 5000))
            bs = blink_similarity(a, b)
            assert bs == blink_similarity(b, a)
            assert 0.0 <= bs <= 1.0
            assert (bs == 1.0) == (a == b)
            k = int(rng.integers(1, 50))
            assert blink_similarity(k * a, k * b) == bs


class TestSeverity:
    def test_perfect_symmetry_no_severity(self):
        assert severity_score(1.0) == 0.0

    def test_maximal_asymmetry(self):
        assert severity_score(0.0) == 1.0

    def test_complement(self):
        assert severity_score(0.25) == 0.75

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            severity_score(1.5)

    @given(st.floats(0.0, 1.0, allow_nan=False))
    def test_monotone_decreasing(self, bs):
        if bs < 1.0:
            assert severity_score(bs) > severity_score(min(1.0, bs + 1e-9))


class TestExtractFeature:
    def test_composition_of_count_and_similarity(self):
        states = [(0, 0)] * 10
        for i in (2, 3, 4):
            states[i] = (1, states[i][1])
        states[3] = (states[3][0], 1)
        feature = extract_feature(sequence_from_states(states))
        assert (feature.ecf_left, feature.ecf_right) == (3, 1)
        assert feature.frame_count == 10
        assert feature.bs == 1 / 3

    def test_all_open_raises_named_video(self):
        seq = sequence_from_states([(0, 0)] * 5, video_id="flatline")
        with pytest.raises(NoBlinksObserved, match="flatline"):
            extract_feature(seq)

    def test_identical_columns_give_one(self):
        rng = np.random.default_rng(1)
        states = [(v, v) for v in rng.integers(0, 2, size=40).tolist()]
        if not any(v for v, _ in states):
            states[0] = (1, 1)
        assert extract_feature(sequence_from_states(states)).bs == 1.0

    def test_matches_brute_force_recount(self):
        rng = np.random.default_rng(11)
        checked = 0
        while checked < 1000:
            seq = random_sequence(rng)
            left, right = brute_force_counts(seq)
            if left == 0 and right == 0:
                with pytest.raises(NoBlinksObserved):
                    extract_feature(seq)
                continue
            checked += 1
            feature = extract_feature(seq)
            assert (feature.ecf_left, feature.ecf_right) == (left, right)
            expected_bs = min(left, right) / max(left, right)
            assert feature.bs == expected_bs


class TestMedianFilter:
    def test_single_frame_flicker_removed(self):
        seq = sequence_from_states([(0, 0), (1, 0), (0, 0), (0, 0)])
        smoothed = median_filter3(seq)
        assert count_eye_closed_frames(smoothed) == (0, 0)

    def test_sustained_closure_preserved(self):
        seq = sequence_from_states([(0, 0), (1, 0), (1, 0), (1, 0), (0, 0)])
        smoothed = median_filter3(seq)
        assert count_eye_closed_frames(smoothed) == (3, 0)

    def test_short_sequences_unchanged(self):
        seq = sequence_from_states([(1, 0), (0, 1)])
        assert median_filter3(seq) == seq

    def test_metadata_preserved(self):
        seq = sequence_from_states([(0, 1)] * 9, video_id="m", fps=24.0)
        smoothed = median_filter3(seq)
        assert smoothed.video_id == "m"
        assert smoothed.fps == 24.0
        assert [fr.frame_index for fr in smoothed.frames] == list(range(9))
