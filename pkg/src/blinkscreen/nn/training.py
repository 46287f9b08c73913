"""Seed-deterministic training and inference for the eye-state classifier."""

from __future__ import annotations

import math

import numpy as np

from ..core import EvalReport, EyeState
from ..errors import DivergedLoss, EmptyClass, ShapeMismatch, ValidationFailure
from . import layers
from .network import CnnConfig, CnnModel, Params, TrainingMeta, backward, forward, init_parameters
from .optim import AdamState, adam_step

Dataset = list[tuple[np.ndarray, EyeState]]

DEFAULT_EPOCHS = 50
DEFAULT_BATCH_SIZE = 32


def _to_arrays(dataset: Dataset, config: CnnConfig) -> tuple[np.ndarray, np.ndarray]:
    channels, height, width = config.input_shape
    x = np.empty((len(dataset), channels, height, width))
    y = np.zeros((len(dataset), config.class_count))
    for i, (crop, state) in enumerate(dataset):
        if crop.shape != (height, width):
            raise ShapeMismatch(f"crop {i}: expected {(height, width)}, got {crop.shape}")
        x[i, 0] = crop
        y[i, int(state)] = 1.0
    return x, y


def train_blink_detector(
    train: Dataset,
    val: Dataset,
    config: CnnConfig | None = None,
    seed: int = 0,
    epochs: int = DEFAULT_EPOCHS,
    batch_size: int = DEFAULT_BATCH_SIZE,
    learning_rate: float = 1e-3,
) -> CnnModel:
    """Train with Adam on the summed cross-entropy; deterministic in the seed.

    Returns the parameters from the epoch with the best validation accuracy
    (earliest epoch wins ties).
    """
    config = config or CnnConfig()
    if not train:
        raise ValidationFailure("empty training set")
    if not val:
        raise ValidationFailure("empty validation set")
    train_states = {state for _, state in train}
    if len(train_states) < 2:
        raise EmptyClass(f"training set holds only {train_states or 'nothing'}")

    x_train, y_train = _to_arrays(train, config)
    x_val, y_val = _to_arrays(val, config)

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    params = init_parameters(config, rng)
    state = AdamState.initial(params, learning_rate=learning_rate)

    best_params = {k: v.copy() for k, v in params.items()}
    best_accuracy = -1.0
    best_epoch = 0
    epoch_losses: list[float] = []

    n = len(train)
    for epoch in range(1, epochs + 1):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, batch_size):
            batch = order[start : start + batch_size]
            probs, cache = forward(params, config, x_train[batch], training=True, rng=rng)
            loss = layers.cross_entropy_loss(probs, y_train[batch])
            if not math.isfinite(loss):
                raise DivergedLoss(f"non-finite loss at epoch {epoch}")
            epoch_loss += loss
            grads = backward(params, config, cache, probs, y_train[batch])
            params, state = adam_step(params, grads, state)
        epoch_losses.append(epoch_loss)

        accuracy = _batched_accuracy(params, config, x_val, y_val)
        if accuracy >= best_accuracy:  # later epoch wins ties: same accuracy, lower loss
            best_accuracy = accuracy
            best_epoch = epoch
            best_params = {k: v.copy() for k, v in params.items()}

    meta = TrainingMeta(
        seed=seed,
        epochs=epochs,
        best_epoch=best_epoch,
        best_val_accuracy=best_accuracy,
        train_losses=tuple(epoch_losses),
    )
    return CnnModel(config=config, parameters=best_params, training_meta=meta)


def _batched_accuracy(
    params: Params, config: CnnConfig, x: np.ndarray, y: np.ndarray, batch_size: int = 256
) -> float:
    hits = 0
    for start in range(0, len(x), batch_size):
        probs, _ = forward(params, config, x[start : start + batch_size])
        hits += int((probs.argmax(axis=1) == y[start : start + batch_size].argmax(axis=1)).sum())
    return hits / len(x)


def predict_eye_state(model: CnnModel, crop: np.ndarray) -> tuple[EyeState, float]:
    """Classify one right-oriented crop; returns the state and its probability."""
    channels, height, width = model.config.input_shape
    if crop.shape != (height, width):
        raise ShapeMismatch(f"expected {(height, width)} crop, got {crop.shape}")
    probs, _ = forward(model.parameters, model.config, crop[None, None, :, :])
    winner = int(probs[0].argmax())
    return EyeState(winner), float(probs[0, winner])


def predict_eye_states(
    model: CnnModel, crops: list[np.ndarray], batch_size: int = 256
) -> list[tuple[EyeState, float]]:
    """Batched inference over many crops, in input order."""
    height, width = model.config.input_shape[1:]
    out: list[tuple[EyeState, float]] = []
    for start in range(0, len(crops), batch_size):
        chunk = crops[start : start + batch_size]
        x = np.empty((len(chunk), 1, height, width))
        for i, crop in enumerate(chunk):
            if crop.shape != (height, width):
                raise ShapeMismatch(f"crop {start + i}: expected {(height, width)}, got {crop.shape}")
            x[i, 0] = crop
        probs, _ = forward(model.parameters, model.config, x)
        winners = probs.argmax(axis=1)
        out.extend((EyeState(int(w)), float(probs[i, w])) for i, w in enumerate(winners))
    return out


def dataset_report(model: CnnModel, dataset: Dataset) -> EvalReport:
    """Confusion matrix over a labeled crop set (rows actual open/closed)."""
    confusion = [[0, 0], [0, 0]]
    predictions = predict_eye_states(model, [crop for crop, _ in dataset])
    for (crop, actual), (predicted, _) in zip(dataset, predictions):
        confusion[int(actual)][int(predicted)] += 1
    return EvalReport.from_confusion(confusion)
