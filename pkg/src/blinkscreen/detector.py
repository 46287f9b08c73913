"""Video-level classifiers over the one-dimensional blink-similarity score.

The selected model is a linear classifier fit by per-sample stochastic
subgradient descent on the hinge loss; logistic regression and k-nearest
neighbors are kept as comparison baselines. The feature is deliberately just
the similarity score; the raw per-eye counts are not fed to the classifier.

Labels map to hinge targets as normal=+1, palsy=-1, so a healthy decision
score is positive. Points exactly on the boundary, and k-NN vote ties, go to
palsy: a screening tool should prefer a false alarm over a missed patient.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import SubjectLabel
from .errors import EmptyClass, IoFailure, MalformedRecord, OutOfRange, ValidationFailure

HINGE_LEARNING_RATE = 0.01
HINGE_EPOCHS = 200
HINGE_L2 = 1e-4
LOGISTIC_LEARNING_RATE = 0.1
LOGISTIC_ITERATIONS = 500
KNN_DEFAULT_K = 3

LabeledScores = list[tuple[float, SubjectLabel]]


class LinearKind(Enum):
    HINGE_SGD = "hinge"
    LOGISTIC = "logistic"


@dataclass(frozen=True)
class LinearModel:
    """One-feature linear decision rule: sign(weight * bs + bias)."""

    weight: float
    bias: float
    kind: LinearKind

    def __post_init__(self) -> None:
        if not (math.isfinite(self.weight) and math.isfinite(self.bias)):
            raise ValidationFailure("model parameters must be finite")

    def decision(self, bs: float) -> float:
        return self.weight * bs + self.bias


@dataclass(frozen=True)
class KnnModel:
    """Memorized training scores; prediction is a k-nearest majority vote."""

    k: int
    points: tuple[tuple[float, SubjectLabel], ...]

    def __post_init__(self) -> None:
        if self.k < 1 or self.k % 2 == 0:
            raise ValidationFailure(f"k must be odd and positive, got {self.k}")
        if self.k > len(self.points):
            raise ValidationFailure(f"k={self.k} exceeds stored points ({len(self.points)})")


def _check_scores(features: LabeledScores) -> None:
    if not features:
        raise EmptyClass("no training data")
    labels = {label for _, label in features}
    if len(labels) < 2:
        raise EmptyClass(f"training data holds only {labels}")
    for bs, _ in features:
        if not 0.0 <= bs <= 1.0:
            raise OutOfRange(f"bs must lie in [0, 1], got {bs}")


def _hinge_target(label: SubjectLabel) -> float:
    return 1.0 if label is SubjectLabel.NORMAL else -1.0


def train_hinge_sgd(
    features: LabeledScores,
    epochs: int = HINGE_EPOCHS,
    learning_rate: float = HINGE_LEARNING_RATE,
    l2: float = HINGE_L2,
    seed: int = 0,
) -> LinearModel:
    """Per-sample subgradient descent on max(0, 1 - y*(w*bs + b)).

    The weight (not the bias) carries L2 shrinkage every visit; sample order
    is reshuffled each epoch from the seed.
    """
    _check_scores(features)
    rng = np.random.default_rng(seed)
    xs = np.array([bs for bs, _ in features])
    ys = np.array([_hinge_target(label) for _, label in features])
    weight, bias = 0.0, 0.0
    n = len(features)
    for _ in range(epochs):
        for i in rng.permutation(n):
            x, y = float(xs[i]), float(ys[i])
            weight -= learning_rate * l2 * weight
            if y * (weight * x + bias) < 1.0:
                weight += learning_rate * y * x
                bias += learning_rate * y
    return LinearModel(weight=weight, bias=bias, kind=LinearKind.HINGE_SGD)


def train_logistic(
    features: LabeledScores,
    learning_rate: float = LOGISTIC_LEARNING_RATE,
    iterations: int = LOGISTIC_ITERATIONS,
) -> LinearModel:
    """Full-batch gradient descent on the mean log-loss; deterministic."""
    _check_scores(features)
    xs = np.array([bs for bs, _ in features])
    ys = np.array([_hinge_target(label) for _, label in features])
    weight, bias = 0.0, 0.0
    n = len(features)
    for _ in range(iterations):
        margin = ys * (weight * xs + bias)
        coeff = -ys / (1.0 + np.exp(margin))
        weight -= learning_rate * float(coeff @ xs) / n
        bias -= learning_rate * float(coeff.sum()) / n
    return LinearModel(weight=float(weight), bias=float(bias), kind=LinearKind.LOGISTIC)


def train_knn(features: LabeledScores, k: int = KNN_DEFAULT_K) -> KnnModel:
    _check_scores(features)
    return KnnModel(k=k, points=tuple(features))


def predict(model: LinearModel | KnnModel, bs: float) -> SubjectLabel:
    """Classify one blink-similarity score."""
    if not 0.0 <= bs <= 1.0:
        raise OutOfRange(f"bs must lie in [0, 1], got {bs}")
    if isinstance(model, LinearModel):
        return SubjectLabel.NORMAL if model.decision(bs) > 0.0 else SubjectLabel.PALSY
    distances = sorted(
        (abs(point - bs), idx) for idx, (point, _) in enumerate(model.points)
    )
    votes = sum(
        1 if model.points[idx][1] is SubjectLabel.NORMAL else -1
        for _, idx in distances[: model.k]
    )
    return SubjectLabel.NORMAL if votes > 0 else SubjectLabel.PALSY


MODEL_FILE_KNN = "knn"


def save_detector(model: LinearModel | KnnModel, path: str | os.PathLike) -> None:
    """Canonical text format: ``<kind> <w> <b>`` or ``knn <k>`` plus data rows."""
    if isinstance(model, LinearModel):
        text = f"{model.kind.value} {model.weight!r} {model.bias!r}\n"
    else:
        rows = [f"{MODEL_FILE_KNN} {model.k}"]
        rows.extend(f"{bs!r} {label.value}" for bs, label in model.points)
        text = "\n".join(rows) + "\n"
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def load_detector(path: str | os.PathLike) -> LinearModel | KnnModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise MalformedRecord(f"{path}: empty model file")
    head = lines[0].split()
    if head[0] == MODEL_FILE_KNN:
        if len(head) != 2:
            raise MalformedRecord(f"{path}: bad knn header {lines[0]!r}")
        points = []
        for line in lines[1:]:
            try:
                bs_text, label_text = line.split()
                points.append((float(bs_text), SubjectLabel.from_text(label_text)))
            except ValueError:
                raise MalformedRecord(f"{path}: bad knn row {line!r}") from None
        return KnnModel(k=int(head[1]), points=tuple(points))
    try:
        kind = LinearKind(head[0])
        weight, bias = float(head[1]), float(head[2])
    except (ValueError, IndexError):
        raise MalformedRecord(f"{path}: bad linear model line {lines[0]!r}") from None
    return LinearModel(weight=weight, bias=bias, kind=kind)
