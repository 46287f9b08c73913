"""Layer primitives: forward passes and their exact gradients.

Conventions: activations are float64 arrays shaped (N, C, H, W) for spatial
layers and (N, features) for dense layers. Convolutions are valid (no
padding), stride 1; pooling is non-overlapping with floor semantics (odd
trailing rows/columns are dropped).
"""

from __future__ import annotations

import numpy as np

from ..errors import InputTooSmall, OutOfRange, ShapeMismatch

LOG_CLAMP = 1e-12


def conv2d_forward(x: np.ndarray, kernel: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Valid cross-correlation: x (N,C,H,W) * kernel (O,C,kh,kw) + bias (O,).

    Computed as a sum over the kh*kw kernel offsets of shifted-input matmuls,
    which keeps the inner products in BLAS without materializing an im2col
    copy of the input.
    """
    if x.ndim != 4 or kernel.ndim != 4:
        raise ShapeMismatch(f"expected 4-d input/kernel, got {x.shape} and {kernel.shape}")
    n, c, h, w = x.shape
    o, kc, kh, kw = kernel.shape
    if kc != c:
        raise ShapeMismatch(f"kernel expects {kc} channels, input has {c}")
    if bias.shape != (o,):
        raise ShapeMismatch(f"bias must have shape ({o},), got {bias.shape}")
    if kh > h or kw > w:
        raise ShapeMismatch(f"kernel {kh}x{kw} larger than input {h}x{w}")
    oh, ow = h - kh + 1, w - kw + 1
    out = np.zeros((n, oh, ow, o))
    for di in range(kh):
        for dj in range(kw):
            shifted = x[:, :, di : di + oh, dj : dj + ow]
            out += np.tensordot(shifted, kernel[:, :, di, dj], axes=([1], [1]))
    return out.transpose(0, 3, 1, 2) + bias[None, :, None, None]


def conv2d_backward(
    dy: np.ndarray, x: np.ndarray, kernel: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients of conv2d_forward w.r.t. input, kernel, and bias."""
    o, c, kh, kw = kernel.shape
    oh, ow = dy.shape[2], dy.shape[3]
    dbias = dy.sum(axis=(0, 2, 3))
    dkernel = np.empty_like(kernel)
    dx = np.zeros_like(x)
    for di in range(kh):
        for dj in range(kw):
            shifted = x[:, :, di : di + oh, dj : dj + ow]
            dkernel[:, :, di, dj] = np.tensordot(dy, shifted, axes=([0, 2, 3], [0, 2, 3]))
            spread = np.tensordot(dy, kernel[:, :, di, dj], axes=([1], [0]))
            dx[:, :, di : di + oh, dj : dj + ow] += spread.transpose(0, 3, 1, 2)
    return dx, dkernel, dbias


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def relu_backward(dy: np.ndarray, x: np.ndarray) -> np.ndarray:
    return dy * (x > 0)


def maxpool2d(x: np.ndarray, window: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Non-overlapping max pooling (stride == window), floor semantics.

    Returns the pooled map and the flat within-window argmax indices needed
    to route gradients back.
    """
    if x.ndim != 4:
        raise ShapeMismatch(f"expected 4-d input, got {x.shape}")
    n, c, h, w = x.shape
    if h < window or w < window:
        raise InputTooSmall(f"cannot pool {h}x{w} with window {window}")
    oh, ow = h // window, w // window
    tiles = (
        x[:, :, : oh * window, : ow * window]
        .reshape(n, c, oh, window, ow, window)
        .transpose(0, 1, 2, 4, 3, 5)
        .reshape(n, c, oh, ow, window * window)
    )
    idx = tiles.argmax(axis=-1)
    out = np.take_along_axis(tiles, idx[..., None], axis=-1)[..., 0]
    return out, idx


def maxpool2d_backward(
    dy: np.ndarray, idx: np.ndarray, x_shape: tuple[int, ...], window: int = 2
) -> np.ndarray:
    n, c, h, w = x_shape
    oh, ow = idx.shape[2], idx.shape[3]
    tiles = np.zeros((n, c, oh, ow, window * window), dtype=dy.dtype)
    np.put_along_axis(tiles, idx[..., None], dy[..., None], axis=-1)
    block = (
        tiles.reshape(n, c, oh, ow, window, window)
        .transpose(0, 1, 2, 4, 3, 5)
        .reshape(n, c, oh * window, ow * window)
    )
    dx = np.zeros(x_shape, dtype=dy.dtype)
    dx[:, :, : oh * window, : ow * window] = block
    return dx


def dense_forward(x: np.ndarray, weight: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Affine map: x (N,I) @ weight (I,O) + bias (O,)."""
    if x.ndim != 2 or weight.ndim != 2 or x.shape[1] != weight.shape[0]:
        raise ShapeMismatch(f"cannot apply weight {weight.shape} to input {x.shape}")
    if bias.shape != (weight.shape[1],):
        raise ShapeMismatch(f"bias shape {bias.shape} does not match {weight.shape[1]} outputs")
    return x @ weight + bias


def dense_backward(
    dy: np.ndarray, x: np.ndarray, weight: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return dy @ weight.T, x.T @ dy, dy.sum(axis=0)


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax, shifted for stability; rows sum to 1."""
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def dropout_forward(
    x: np.ndarray,
    keep_probability: float,
    rng: np.random.Generator | None = None,
    training: bool = False,
) -> tuple[np.ndarray, np.ndarray | None]:
    """Inverted dropout: kept units are scaled by 1/keep so inference needs
    no rescaling. Identity outside training mode (mask is None)."""
    if not training:
        return x, None
    if not 0.0 < keep_probability <= 1.0:
        raise OutOfRange(f"keep probability must lie in (0, 1], got {keep_probability}")
    if rng is None:
        raise ValueError("training-mode dropout needs an rng")
    mask = rng.random(x.shape) < keep_probability
    return x * mask / keep_probability, mask


def dropout_backward(
    dy: np.ndarray, mask: np.ndarray | None, keep_probability: float
) -> np.ndarray:
    if mask is None:
        return dy
    return dy * mask / keep_probability


def cross_entropy_loss(predicted: np.ndarray, truth: np.ndarray) -> float:
    """Categorical cross-entropy, summed over classes and samples.

    Summation (not averaging) makes the loss of a concatenated batch equal
    the sum of its parts. Probabilities are clamped at LOG_CLAMP before the
    log so saturated predictions stay finite.
    """
    if predicted.shape != truth.shape:
        raise ShapeMismatch(f"prediction {predicted.shape} vs truth {truth.shape}")
    return float(-(truth * np.log(np.maximum(predicted, LOG_CLAMP))).sum())


def softmax_cross_entropy_backward(probs: np.ndarray, truth: np.ndarray) -> np.ndarray:
    """Gradient of the summed cross-entropy w.r.t. the softmax logits."""
    if probs.shape != truth.shape:
        raise ShapeMismatch(f"prediction {probs.shape} vs truth {truth.shape}")
    return probs - truth


def flip_horizontal(image: np.ndarray) -> np.ndarray:
    """Mirror an image left-right; applying it twice restores the original."""
    if image.ndim != 2:
        raise ShapeMismatch(f"expected a 2-d image, got shape {image.shape}")
    return image[:, ::-1].copy()
