import numpy as np
import pytest

from blinkscreen.core import EyeState, EyeStateSequence, FrameStates
from blinkscreen.synth import make_toy_crop_set
from blinkscreen.nn.training import train_blink_detector


def sequence_from_states(
    states: list[tuple[int, int]], video_id: str = "v", fps: float = 30.0
) -> EyeStateSequence:
    """Build a sequence from (left, right) 0/1 pairs at frame indices 0..n-1."""
    frames = tuple(
        FrameStates(i, EyeState(left), EyeState(right))
        for i, (left, right) in enumerate(states)
    )
    return EyeStateSequence(video_id=video_id, fps=fps, frames=frames)


def random_sequence(rng: np.random.Generator, n_frames: int | None = None) -> EyeStateSequence:
    n = int(n_frames if n_frames is not None else rng.integers(1, 120))
    states = [(int(rng.integers(0, 2)), int(rng.integers(0, 2))) for _ in range(n)]
    return sequence_from_states(states)


@pytest.fixture(scope="session")
def toy_crops():
    crops = make_toy_crop_set(80, seed=5)
    return crops[:64], crops[64:]


@pytest.fixture(scope="session")
def toy_model(toy_crops):
    train, val = toy_crops
    return train_blink_detector(train, val, seed=11, epochs=20)
