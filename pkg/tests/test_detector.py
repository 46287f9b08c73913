import numpy as np
import pytest

from blinkscreen.core import SubjectLabel
from blinkscreen.detector import (
    KnnModel,
    LinearKind,
    LinearModel,
    load_detector,
    predict,
    save_detector,
    train_hinge_sgd,
    train_knn,
    train_logistic,
)
from blinkscreen.errors import EmptyClass, MalformedRecord, OutOfRange, ValidationFailure

SEPARABLE = [
    (0.9, SubjectLabel.NORMAL),
    (0.95, SubjectLabel.NORMAL),
    (1.0, SubjectLabel.NORMAL),
    (0.0, SubjectLabel.PALSY),
    (0.1, SubjectLabel.PALSY),
    (0.2, SubjectLabel.PALSY),
]


def invert(data):
    flip = {SubjectLabel.NORMAL: SubjectLabel.PALSY, SubjectLabel.PALSY: SubjectLabel.NORMAL}
    return [(bs, flip[label]) for bs, label in data]


class TestHingeSgd:
    def test_separable_data_fit_perfectly(self):
        model = train_hinge_sgd(SEPARABLE, seed=0)
        assert all(predict(model, bs) is label for bs, label in SEPARABLE)

    def test_predicts_extremes(self):
        model = train_hinge_sgd(SEPARABLE, seed=0)
        assert predict(model, 1.0) is SubjectLabel.NORMAL
        assert predict(model, 0.05) is SubjectLabel.PALSY

    def test_inverted_labels_flip_sign_exactly(self):
        model = train_hinge_sgd(SEPARABLE, seed=7)
        inverted = train_hinge_sgd(invert(SEPARABLE), seed=7)
        assert inverted.weight == -model.weight
        assert inverted.bias == -model.bias

    def test_single_class_rejected(self):
        with pytest.raises(EmptyClass):
            train_hinge_sgd([(0.9, SubjectLabel.NORMAL), (1.0, SubjectLabel.NORMAL)])

    def test_out_of_range_feature_rejected(self):
        with pytest.raises(OutOfRange):
            train_hinge_sgd([(1.2, SubjectLabel.NORMAL), (0.0, SubjectLabel.PALSY)])

    def test_seed_determinism(self):
        a = train_hinge_sgd(SEPARABLE, seed=5)
        b = train_hinge_sgd(SEPARABLE, seed=5)
        assert (a.weight, a.bias) == (b.weight, b.bias)

    def test_threshold_behavior_on_separated_data(self):
        # when all palsy scores sit below all normal scores the decision is
        # a threshold: predictions flip exactly once as bs sweeps upward
        model = train_hinge_sgd(SEPARABLE, seed=3)
        grid = [predict(model, bs / 1000) for bs in range(1001)]
        flips = sum(1 for a, b in zip(grid, grid[1:]) if a is not b)
        assert flips == 1
        assert grid[0] is SubjectLabel.PALSY
        assert grid[-1] is SubjectLabel.NORMAL


class TestLinearPredict:
    def test_known_boundary(self):
        model = LinearModel(weight=1.0, bias=-0.5, kind=LinearKind.HINGE_SGD)
        assert predict(model, 0.6) is SubjectLabel.NORMAL
        assert predict(model, 0.4) is SubjectLabel.PALSY
        # exactly on the boundary goes to the screening-positive class
        assert predict(model, 0.5) is SubjectLabel.PALSY

    def test_rescaled_parameters_predict_identically(self):
        model = train_hinge_sgd(SEPARABLE, seed=1)
        for scale in (0.5, 2.0, 117.0):
            scaled = LinearModel(model.weight * scale, model.bias * scale, model.kind)
            for bs in np.linspace(0, 1, 101):
                assert predict(scaled, float(bs)) is predict(model, float(bs))

    def test_out_of_range_rejected(self):
        model = LinearModel(1.0, -0.5, LinearKind.HINGE_SGD)
        with pytest.raises(OutOfRange):
            predict(model, 1.5)

    def test_non_finite_model_rejected(self):
        with pytest.raises(ValidationFailure):
            LinearModel(float("nan"), 0.0, LinearKind.HINGE_SGD)


class TestLogistic:
    def test_separable_data_fit_perfectly(self):
        model = train_logistic(SEPARABLE)
        assert all(predict(model, bs) is label for bs, label in SEPARABLE)

    def test_constant_feature_predicts_majority(self):
        data = [(0.5, SubjectLabel.PALSY)] * 3 + [(0.5, SubjectLabel.NORMAL)]
        assert predict(train_logistic(data), 0.5) is SubjectLabel.PALSY
        flipped = invert(data)
        assert predict(train_logistic(flipped), 0.5) is SubjectLabel.NORMAL

    def test_deterministic(self):
        a = train_logistic(SEPARABLE)
        b = train_logistic(SEPARABLE)
        assert (a.weight, a.bias) == (b.weight, b.bias)


class TestKnn:
    def test_nearest_neighbor(self):
        model = train_knn([(0.1, SubjectLabel.PALSY), (0.9, SubjectLabel.NORMAL)], k=1)
        assert predict(model, 0.2) is SubjectLabel.PALSY
        assert predict(model, 0.8) is SubjectLabel.NORMAL

    def test_k_equal_n_is_majority_vote(self):
        data = [(0.2, SubjectLabel.PALSY), (0.3, SubjectLabel.PALSY), (0.9, SubjectLabel.NORMAL)]
        model = train_knn(data, k=3)
        for bs in (0.0, 0.5, 1.0):
            assert predict(model, bs) is SubjectLabel.PALSY

    def test_k_must_be_odd_and_within_data(self):
        data = SEPARABLE
        with pytest.raises(ValidationFailure):
            train_knn(data, k=2)
        with pytest.raises(ValidationFailure):
            train_knn(data, k=7)

    def test_separable_fit(self):
        model = train_knn(SEPARABLE, k=3)
        assert all(predict(model, bs) is label for bs, label in SEPARABLE)


class TestDetectorFiles:
    def test_linear_round_trip(self, tmp_path):
        model = train_hinge_sgd(SEPARABLE, seed=0)
        path = tmp_path / "det.model"
        save_detector(model, path)
        loaded = load_detector(path)
        assert loaded == model
        text = path.read_text()
        assert text.startswith("hinge ")
        assert len(text.strip().split("\n")) == 1

    def test_logistic_kind_preserved(self, tmp_path):
        model = train_logistic(SEPARABLE)
        save_detector(model, tmp_path / "det.model")
        assert load_detector(tmp_path / "det.model").kind is LinearKind.LOGISTIC

    def test_knn_round_trip(self, tmp_path):
        model = train_knn(SEPARABLE, k=3)
        path = tmp_path / "knn.model"
        save_detector(model, path)
        loaded = load_detector(path)
        assert isinstance(loaded, KnnModel)
        assert loaded == model

    def test_garbage_rejected(self, tmp_path):
        path = tmp_path / "junk.model"
        path.write_text("sorcery 1 2\n")
        with pytest.raises(MalformedRecord):
            load_detector(path)
