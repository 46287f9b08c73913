"""From-scratch convolutional network for frame-level eye-state classification.

numpy is the array substrate; every layer's forward and backward pass, the
loss, and the optimizer are implemented here so training is fully
deterministic given a seed.
"""

from .layers import (
    conv2d_forward,
    conv2d_backward,
    cross_entropy_loss,
    dense_forward,
    dense_backward,
    dropout_forward,
    dropout_backward,
    flip_horizontal,
    maxpool2d,
    maxpool2d_backward,
    relu,
    relu_backward,
    softmax,
    softmax_cross_entropy_backward,
)
from .network import CnnConfig, CnnModel, ConvBlockSpec, TrainingMeta, backward, forward, init_parameters
from .optim import AdamState, adam_step
from .training import dataset_report, predict_eye_state, predict_eye_states, train_blink_detector
from .model_io import load_crop_dataset, load_model, save_model

__all__ = [
    "AdamState",
    "CnnConfig",
    "CnnModel",
    "ConvBlockSpec",
    "TrainingMeta",
    "adam_step",
    "backward",
    "conv2d_backward",
    "conv2d_forward",
    "cross_entropy_loss",
    "dataset_report",
    "dense_backward",
    "dense_forward",
    "dropout_backward",
    "dropout_forward",
    "flip_horizontal",
    "forward",
    "init_parameters",
    "load_crop_dataset",
    "load_model",
    "maxpool2d",
    "maxpool2d_backward",
    "predict_eye_state",
    "predict_eye_states",
    "relu",
    "relu_backward",
    "save_model",
    "softmax",
    "softmax_cross_entropy_backward",
    "train_blink_detector",
]
