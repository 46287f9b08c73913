"""Network assembly: configuration, parameter init, full forward/backward.

The standard geometry keeps ten convolutional layers, grouped into five
blocks of conv-ReLU-conv-ReLU-maxpool. A uniform 3x3-everywhere stack cannot
survive five 2x2 poolings from a 50x50 input, so kernel sizes shrink per
block (3,2,2,1,1), which lands the final map at 64x1x1:

    50 -conv3,conv3-> 46 -pool-> 23 -conv2,conv2-> 21 -pool-> 10
       -conv2,conv2-> 8 -pool-> 4 -conv1,conv1-> 4 -pool-> 2
       -conv1,conv1-> 2 -pool-> 1

The flattened features feed a ReLU hidden layer, dropout, and the softmax
output layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from ..errors import ShapeMismatch, ValidationFailure
from . import layers

Params = dict[str, np.ndarray]


@dataclass(frozen=True)
class ConvBlockSpec:
    """One conv-ReLU-conv-ReLU-maxpool block (both convs share the shape)."""

    out_channels: int
    kernel_size: int

    def __post_init__(self) -> None:
        if self.out_channels < 1 or self.kernel_size < 1:
            raise ValidationFailure(
                f"block needs positive channels/kernel, got {self}"
            )


STANDARD_BLOCKS = (
    ConvBlockSpec(8, 3),
    ConvBlockSpec(16, 2),
    ConvBlockSpec(32, 2),
    ConvBlockSpec(64, 1),
    ConvBlockSpec(64, 1),
)
CONVS_PER_BLOCK = 2


@dataclass(frozen=True)
class CnnConfig:
    """Geometry and training-time constants of the eye-state classifier.

    dropout_keep_probability defaults to 0.2 (drop 0.8): the dropout figure
    is read as a drop probability, recorded here so the choice is auditable.
    """

    conv_blocks: tuple[ConvBlockSpec, ...] = STANDARD_BLOCKS
    pool_size: int = 2
    dense_widths: tuple[int, ...] = (128, 2)
    dropout_keep_probability: float = 0.2
    class_count: int = 2
    input_shape: tuple[int, int, int] = (1, 50, 50)

    def __post_init__(self) -> None:
        if self.class_count != 2:
            raise ValidationFailure("this classifier is strictly two-class")
        if not self.dense_widths or self.dense_widths[-1] != self.class_count:
            raise ValidationFailure(
                f"last dense width must equal class_count, got {self.dense_widths}"
            )
        if not 0.0 < self.dropout_keep_probability <= 1.0:
            raise ValidationFailure("dropout_keep_probability must lie in (0, 1]")
        if self.pool_size < 2:
            raise ValidationFailure("pool_size must be >= 2")
        if self.input_shape[0] != 1:
            raise ValidationFailure("crops are single-channel grayscale")
        self.spatial_trace()  # raises if any stage under-runs

    @property
    def conv_layer_total(self) -> int:
        return CONVS_PER_BLOCK * len(self.conv_blocks)

    def spatial_trace(self) -> list[tuple[int, int]]:
        """(h, w) after each block; validates every conv and pool fits."""
        _, h, w = self.input_shape
        trace: list[tuple[int, int]] = []
        for i, block in enumerate(self.conv_blocks):
            for _ in range(CONVS_PER_BLOCK):
                h, w = h - block.kernel_size + 1, w - block.kernel_size + 1
                if h < 1 or w < 1:
                    raise ValidationFailure(f"block {i}: conv underruns the feature map")
            if h < self.pool_size or w < self.pool_size:
                raise ValidationFailure(f"block {i}: pooling underruns the feature map")
            h, w = h // self.pool_size, w // self.pool_size
            trace.append((h, w))
        return trace

    @property
    def flattened_features(self) -> int:
        h, w = self.spatial_trace()[-1]
        return self.conv_blocks[-1].out_channels * h * w

    def parameter_shapes(self) -> dict[str, tuple[int, ...]]:
        """Named parameter shapes in declared (serialization) order."""
        shapes: dict[str, tuple[int, ...]] = {}
        in_channels = self.input_shape[0]
        layer = 0
        for block in self.conv_blocks:
            for _ in range(CONVS_PER_BLOCK):
                k = block.kernel_size
                shapes[f"conv{layer}.kernel"] = (block.out_channels, in_channels, k, k)
                shapes[f"conv{layer}.bias"] = (block.out_channels,)
                in_channels = block.out_channels
                layer += 1
        width_in = self.flattened_features
        for i, width_out in enumerate(self.dense_widths):
            shapes[f"dense{i}.weight"] = (width_in, width_out)
            shapes[f"dense{i}.bias"] = (width_out,)
            width_in = width_out
        return shapes

    def to_dict(self) -> dict[str, Any]:
        return {
            "conv_blocks": [[b.out_channels, b.kernel_size] for b in self.conv_blocks],
            "pool_size": self.pool_size,
            "dense_widths": list(self.dense_widths),
            "dropout_keep_probability": self.dropout_keep_probability,
            "class_count": self.class_count,
            "input_shape": list(self.input_shape),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CnnConfig":
        return cls(
            conv_blocks=tuple(ConvBlockSpec(c, k) for c, k in data["conv_blocks"]),
            pool_size=data["pool_size"],
            dense_widths=tuple(data["dense_widths"]),
            dropout_keep_probability=data["dropout_keep_probability"],
            class_count=data["class_count"],
            input_shape=tuple(data["input_shape"]),
        )


@dataclass(frozen=True)
class TrainingMeta:
    """Provenance of a trained model."""

    seed: int
    epochs: int
    best_epoch: int
    best_val_accuracy: float
    train_losses: tuple[float, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "epochs": self.epochs,
            "best_epoch": self.best_epoch,
            "best_val_accuracy": self.best_val_accuracy,
            "train_losses": list(self.train_losses),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "TrainingMeta":
        return cls(
            seed=data["seed"],
            epochs=data["epochs"],
            best_epoch=data["best_epoch"],
            best_val_accuracy=data["best_val_accuracy"],
            train_losses=tuple(data["train_losses"]),
        )


@dataclass(frozen=True)
class CnnModel:
    """Trained classifier: config, named parameters, training provenance."""

    config: CnnConfig
    parameters: Params
    training_meta: TrainingMeta

    def __post_init__(self) -> None:
        expected = self.config.parameter_shapes()
        if set(expected) != set(self.parameters):
            raise ShapeMismatch("parameter names do not match the config")
        for name, shape in expected.items():
            if self.parameters[name].shape != shape:
                raise ShapeMismatch(
                    f"{name}: expected shape {shape}, got {self.parameters[name].shape}"
                )


def init_parameters(config: CnnConfig, rng: np.random.Generator) -> Params:
    """Fan-in-scaled uniform init for weights, zeros for biases.

    The bound sqrt(6/fan_in) keeps activation variance roughly constant
    through the ReLU stack; anything weaker starves the ten-layer trace.
    """
    params: Params = {}
    for name, shape in config.parameter_shapes().items():
        if name.endswith(".bias"):
            params[name] = np.zeros(shape)
        else:
            fan_in = int(np.prod(shape[1:])) if "conv" in name else shape[0]
            bound = np.sqrt(6.0 / fan_in)
            params[name] = rng.uniform(-bound, bound, size=shape)
    return params


def forward(
    params: Params,
    config: CnnConfig,
    x: np.ndarray,
    training: bool = False,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, list]:
    """Run the full stack; returns class probabilities and the backward cache."""
    expected = (x.shape[0],) + config.input_shape
    if x.shape != expected:
        raise ShapeMismatch(f"expected input {expected}, got {x.shape}")
    cache: list = []
    out = x
    layer = 0
    for block in config.conv_blocks:
        for _ in range(CONVS_PER_BLOCK):
            kernel, bias = params[f"conv{layer}.kernel"], params[f"conv{layer}.bias"]
            pre = layers.conv2d_forward(out, kernel, bias)
            cache.append(("conv", layer, out, pre))
            out = layers.relu(pre)
            layer += 1
        pooled, idx = layers.maxpool2d(out, config.pool_size)
        cache.append(("pool", idx, out.shape))
        out = pooled

    flat_shape = out.shape
    out = out.reshape(out.shape[0], -1)
    cache.append(("flatten", flat_shape))

    last_hidden = len(config.dense_widths) - 2
    for i in range(len(config.dense_widths)):
        weight, bias = params[f"dense{i}.weight"], params[f"dense{i}.bias"]
        pre = layers.dense_forward(out, weight, bias)
        if i < len(config.dense_widths) - 1:
            cache.append(("dense_relu", i, out, pre))
            out = layers.relu(pre)
            if i == last_hidden:
                dropped, mask = layers.dropout_forward(
                    out, config.dropout_keep_probability, rng, training
                )
                cache.append(("dropout", mask))
                out = dropped
        else:
            cache.append(("dense", i, out))
            out = pre

    return layers.softmax(out), cache


def backward(
    params: Params, config: CnnConfig, cache: list, probs: np.ndarray, truth: np.ndarray
) -> Params:
    """Gradients of the summed cross-entropy for every parameter."""
    grads: Params = {}
    grad = layers.softmax_cross_entropy_backward(probs, truth)
    for entry in reversed(cache):
        kind = entry[0]
        if kind == "dense":
            _, i, x_in = entry
            grad, grads[f"dense{i}.weight"], grads[f"dense{i}.bias"] = layers.dense_backward(
                grad, x_in, params[f"dense{i}.weight"]
            )
        elif kind == "dropout":
            grad = layers.dropout_backward(grad, entry[1], config.dropout_keep_probability)
        elif kind == "dense_relu":
            _, i, x_in, pre = entry
            grad = layers.relu_backward(grad, pre)
            grad, grads[f"dense{i}.weight"], grads[f"dense{i}.bias"] = layers.dense_backward(
                grad, x_in, params[f"dense{i}.weight"]
            )
        elif kind == "flatten":
            grad = grad.reshape(entry[1])
        elif kind == "pool":
            _, idx, x_shape = entry
            grad = layers.maxpool2d_backward(grad, idx, x_shape, config.pool_size)
        elif kind == "conv":
            _, layer, x_in, pre = entry
            grad = layers.relu_backward(grad, pre)
            grad, grads[f"conv{layer}.kernel"], grads[f"conv{layer}.bias"] = layers.conv2d_backward(
                grad, x_in, params[f"conv{layer}.kernel"]
            )
        else:
            raise AssertionError(f"unknown cache entry {kind!r}")
    return grads
