import numpy as np
import pytest

from blinkscreen.core import EyeState
from blinkscreen.errors import DivergedLoss, EmptyClass, IoFailure, ShapeMismatch
from blinkscreen.nn.model_io import load_crop_dataset, load_model, save_model
from blinkscreen.nn.network import CnnConfig, ConvBlockSpec
from blinkscreen.nn.training import (
    dataset_report,
    predict_eye_state,
    predict_eye_states,
    train_blink_detector,
)
from blinkscreen.pgm import read_pgm, write_pgm
from blinkscreen.synth import make_toy_crop, make_toy_crop_set


class TestStandardConfig:
    def test_ten_conv_layers_on_fifty_square_input(self):
        config = CnnConfig()
        assert config.conv_layer_total == 10
        assert config.input_shape == (1, 50, 50)
        assert config.class_count == 2
        assert config.spatial_trace()[-1] == (1, 1)

    def test_channel_widths(self):
        widths = [block.out_channels for block in CnnConfig().conv_blocks]
        assert widths == [8, 16, 32, 64, 64]

    def test_dropout_records_keep_probability(self):
        assert CnnConfig().dropout_keep_probability == 0.2

    def test_infeasible_geometry_rejected(self):
        with pytest.raises(Exception):
            CnnConfig(
                conv_blocks=(ConvBlockSpec(8, 3),) * 5,
                input_shape=(1, 50, 50),
            )


class TestTraining:
    def test_toy_set_reaches_perfect_validation(self, toy_model):
        assert toy_model.training_meta.best_val_accuracy == 1.0
        assert toy_model.training_meta.best_epoch <= 20

    def test_loss_curve_recorded_and_finite(self, toy_model):
        losses = toy_model.training_meta.train_losses
        assert len(losses) == toy_model.training_meta.epochs
        assert all(np.isfinite(losses))
        assert losses[-1] < losses[0]

    def test_seed_determinism_bit_identical(self, toy_crops):
        train, val = toy_crops
        a = train_blink_detector(train, val, seed=21, epochs=3)
        b = train_blink_detector(train, val, seed=21, epochs=3)
        assert all(np.array_equal(a.parameters[k], b.parameters[k]) for k in a.parameters)
        assert a.training_meta == b.training_meta

    def test_different_seed_different_model(self, toy_crops):
        train, val = toy_crops
        a = train_blink_detector(train, val, seed=1, epochs=2)
        b = train_blink_detector(train, val, seed=2, epochs=2)
        assert any(not np.array_equal(a.parameters[k], b.parameters[k]) for k in a.parameters)

    def test_single_class_rejected(self, toy_crops):
        train, val = toy_crops
        only_open = [(c, s) for c, s in train if s is EyeState.OPEN]
        with pytest.raises(EmptyClass):
            train_blink_detector(only_open, val, seed=0, epochs=1)

    def test_diverged_loss_detected(self, toy_crops):
        # a step of ~1e200 overflows the conv stack to inf/nan on the next pass
        train, val = toy_crops
        with np.errstate(over="ignore", invalid="ignore"):
            with pytest.raises(DivergedLoss):
                train_blink_detector(train[:8], val, seed=0, epochs=2, learning_rate=1e200)


class TestPrediction:
    def test_training_crops_classified_correctly(self, toy_model, toy_crops):
        train, _ = toy_crops
        for crop, state in train[:8]:
            predicted, prob = predict_eye_state(toy_model, crop)
            assert predicted is state
            assert prob > 0.9

    def test_repeatable(self, toy_model, toy_crops):
        crop = toy_crops[0][0][0]
        assert predict_eye_state(toy_model, crop) == predict_eye_state(toy_model, crop)

    def test_batched_matches_single(self, toy_model, toy_crops):
        # states agree exactly; probabilities only to reduction-order noise
        crops = [c for c, _ in toy_crops[0][:10]]
        batched = predict_eye_states(toy_model, crops)
        single = [predict_eye_state(toy_model, c) for c in crops]
        assert [s for s, _ in batched] == [s for s, _ in single]
        for (_, p_batched), (_, p_single) in zip(batched, single):
            assert p_batched == pytest.approx(p_single, abs=1e-9)

    def test_wrong_shape_rejected(self, toy_model):
        with pytest.raises(ShapeMismatch):
            predict_eye_state(toy_model, np.zeros((49, 50)))

    def test_dataset_report_perfect_on_train(self, toy_model, toy_crops):
        report = dataset_report(toy_model, toy_crops[0])
        assert report.accuracy == 1.0
        assert report.n == len(toy_crops[0])


class TestModelSerialization:
    def test_round_trip_bit_exact(self, toy_model, tmp_path):
        path = tmp_path / "model.blnk"
        save_model(toy_model, path)
        loaded = load_model(path)
        assert loaded.config == toy_model.config
        assert loaded.training_meta == toy_model.training_meta
        for name, value in toy_model.parameters.items():
            assert np.array_equal(loaded.parameters[name], value)
        save_model(loaded, tmp_path / "again.blnk")
        assert (tmp_path / "model.blnk").read_bytes() == (tmp_path / "again.blnk").read_bytes()

    def test_magic_bytes(self, toy_model, tmp_path):
        path = tmp_path / "model.blnk"
        save_model(toy_model, path)
        assert path.read_bytes()[:5] == b"BLNK1"

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "junk.blnk"
        path.write_bytes(b"NOPE!" + b"\x00" * 64)
        with pytest.raises(IoFailure):
            load_model(path)

    def test_truncated_rejected(self, toy_model, tmp_path):
        path = tmp_path / "model.blnk"
        save_model(toy_model, path)
        blob = path.read_bytes()
        path.write_bytes(blob[: len(blob) - 16])
        with pytest.raises(IoFailure):
            load_model(path)

    def test_trailing_bytes_rejected(self, toy_model, tmp_path):
        path = tmp_path / "model.blnk"
        save_model(toy_model, path)
        path.write_bytes(path.read_bytes() + b"\x00")
        with pytest.raises(IoFailure):
            load_model(path)


class TestPgm:
    def test_round_trip_quantized(self, tmp_path):
        rng = np.random.default_rng(0)
        image = rng.uniform(size=(50, 50))
        path = tmp_path / "crop.pgm"
        write_pgm(path, image)
        back = read_pgm(path)
        assert back.shape == (50, 50)
        assert np.abs(back - image).max() <= 0.5 / 255 + 1e-12

    def test_written_bytes_round_trip_exactly(self, tmp_path):
        image = read_pgm_fixture = np.linspace(0, 1, 2500).reshape(50, 50)
        path = tmp_path / "a.pgm"
        write_pgm(path, image)
        first = path.read_bytes()
        write_pgm(tmp_path / "b.pgm", read_pgm(path))
        assert (tmp_path / "b.pgm").read_bytes() == first

    def test_comment_lines_skipped(self, tmp_path):
        path = tmp_path / "c.pgm"
        pixels = bytes(range(4))
        path.write_bytes(b"P5\n# a comment\n2 2\n255\n" + pixels)
        img = read_pgm(path)
        assert img.shape == (2, 2)
        assert img[1, 1] == 3 / 255

    def test_non_p5_rejected(self, tmp_path):
        path = tmp_path / "p2.pgm"
        path.write_bytes(b"P2\n2 2\n255\n0 1 2 3\n")
        with pytest.raises(IoFailure):
            read_pgm(path)

    def test_truncated_pixels_rejected(self, tmp_path):
        path = tmp_path / "short.pgm"
        path.write_bytes(b"P5\n2 2\n255\n\x00\x01")
        with pytest.raises(IoFailure):
            read_pgm(path)


class TestCropDataset:
    def test_loads_both_classes_sorted(self, tmp_path):
        rng = np.random.default_rng(1)
        for sub, state in (("open", EyeState.OPEN), ("closed", EyeState.CLOSED)):
            (tmp_path / sub).mkdir()
            for i in range(3):
                write_pgm(tmp_path / sub / f"{i}.pgm", make_toy_crop(state, rng))
        pairs = load_crop_dataset(tmp_path)
        assert len(pairs) == 6
        assert sum(1 for _, s in pairs if s is EyeState.CLOSED) == 3
        assert all(c.shape == (50, 50) for c, _ in pairs)

    def test_missing_dataset_rejected(self, tmp_path):
        with pytest.raises(IoFailure):
            load_crop_dataset(tmp_path / "nowhere")

    def test_wrong_crop_size_rejected(self, tmp_path):
        (tmp_path / "open").mkdir()
        write_pgm(tmp_path / "open" / "bad.pgm", np.zeros((10, 10)))
        with pytest.raises(IoFailure):
            load_crop_dataset(tmp_path)


def test_left_crop_flip_matches_expected_orientation():
    # a left-eye crop mirrored into right orientation, then mirrored again,
    # must reproduce the original pixels
    from blinkscreen.nn.layers import flip_horizontal

    crops = make_toy_crop_set(4, seed=0)
    for crop, _ in crops:
        assert np.array_equal(flip_horizontal(flip_horizontal(crop)), crop)
