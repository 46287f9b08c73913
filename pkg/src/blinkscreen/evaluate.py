"""Hold-out splitting, stratified k-fold cross-validation, and accuracy.

Splits are stratified: with cohorts of a few dozen videos per class, an
unstratified 3-fold split can easily starve a training fold of one class.
Fold sizes use floored proportions; leftover items go to the training split.
"""

from __future__ import annotations

from typing import Callable, Hashable, Sequence, TypeVar

import numpy as np

from .core import EvalReport, SubjectLabel
from .errors import EmptyMatrix, TooFewItems, ValidationFailure

T = TypeVar("T")
# splitting works for any label kind whose .value orders strata
# deterministically (SubjectLabel for videos, EyeState for crops)
L = TypeVar("L", bound=Hashable)

Learner = Callable[[list[tuple[float, SubjectLabel]]], object]
Predictor = Callable[[object, float], SubjectLabel]


def metrics_from_confusion(confusion: Sequence[Sequence[int]]) -> float:
    """Accuracy as trace over total count."""
    rows = [list(row) for row in confusion]
    if len(rows) != 2 or any(len(r) != 2 for r in rows):
        raise ValidationFailure("confusion matrix must be 2x2")
    cells = [c for row in rows for c in row]
    if any(int(c) != c or c < 0 for c in cells):
        raise ValidationFailure("confusion cells must be non-negative integers")
    total = sum(cells)
    if total == 0:
        raise EmptyMatrix("confusion matrix counts no samples")
    return (rows[0][0] + rows[1][1]) / total


def _stratum_quotas(group_sizes: list[int], ratio: float, target: int) -> list[int]:
    """Largest-remainder allocation of `target` items across strata."""
    bases = [int(ratio * size) for size in group_sizes]
    remainders = [ratio * size - base for size, base in zip(group_sizes, bases)]
    short = target - sum(bases)
    order = sorted(range(len(group_sizes)), key=lambda i: (-remainders[i], i))
    for i in order[:short]:
        bases[i] += 1
    return bases


def holdout_split(
    items: Sequence[T],
    labels: Sequence[L],
    ratios: tuple[float, float, float] = (0.70, 0.15, 0.15),
    seed: int = 0,
) -> tuple[list[T], list[T], list[T]]:
    """Stratified, seed-deterministic (train, val, test) partition.

    Validation and test take the floored share of the total; the remainder
    stays in train. Per-label allocation follows largest remainders so each
    split's class mix stays within one item of the global mix.
    """
    if len(items) != len(labels):
        raise ValidationFailure("items and labels must align")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValidationFailure(f"ratios must sum to 1, got {ratios}")
    if len(items) < 3:
        raise TooFewItems(f"need at least 3 items, got {len(items)}")

    n = len(items)
    val_total = int(ratios[1] * n)
    test_total = int(ratios[2] * n)

    by_label: dict[L, list[int]] = {}
    for idx, label in enumerate(labels):
        by_label.setdefault(label, []).append(idx)
    groups = sorted(by_label, key=lambda lb: lb.value)
    sizes = [len(by_label[g]) for g in groups]
    val_quota = _stratum_quotas(sizes, ratios[1], val_total)
    test_quota = _stratum_quotas(sizes, ratios[2], test_total)

    rng = np.random.default_rng(seed)
    train: list[T] = []
    val: list[T] = []
    test: list[T] = []
    for group, n_val, n_test in zip(groups, val_quota, test_quota):
        indices = list(by_label[group])
        rng.shuffle(indices)
        val.extend(items[i] for i in indices[:n_val])
        test.extend(items[i] for i in indices[n_val : n_val + n_test])
        train.extend(items[i] for i in indices[n_val + n_test :])
    return train, val, test


def stratified_folds(
    labels: Sequence[SubjectLabel], k: int, seed: int = 0
) -> list[list[int]]:
    """Index folds with per-fold class counts within one of proportional."""
    if k < 2:
        raise ValidationFailure(f"k must be >= 2, got {k}")
    if k > len(labels):
        raise TooFewItems(f"k={k} exceeds {len(labels)} items")
    by_label: dict[SubjectLabel, list[int]] = {}
    for idx, label in enumerate(labels):
        by_label.setdefault(label, []).append(idx)
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    cursor = 0
    for label in sorted(by_label, key=lambda lb: lb.value):
        indices = list(by_label[label])
        rng.shuffle(indices)
        for idx in indices:
            folds[cursor % k].append(idx)
            cursor += 1
    return folds


def kfold_cv(
    features: Sequence[float],
    labels: Sequence[SubjectLabel],
    learner: Learner,
    predictor: Predictor,
    k: int = 3,
    seed: int = 0,
) -> EvalReport:
    """Cross-validated confusion matrix: each item predicted exactly once by
    a model that never saw it; folds evaluated in order."""
    if len(features) != len(labels):
        raise ValidationFailure("features and labels must align")
    if len(set(labels)) < 2:
        raise ValidationFailure("both classes must be present overall")
    folds = stratified_folds(labels, k, seed)
    confusion = [[0, 0], [0, 0]]
    for held_out in folds:
        held = set(held_out)
        train_data = [
            (features[i], labels[i]) for i in range(len(features)) if i not in held
        ]
        model = learner(train_data)
        for i in held_out:
            predicted = predictor(model, features[i])
            confusion[labels[i].index][predicted.index] += 1
    return EvalReport.from_confusion(confusion)
