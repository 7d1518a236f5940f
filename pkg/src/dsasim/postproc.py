"""Post-processing: max pooling and activation on accumulated outputs.

Pooling runs before activation (the hardware drains pooled maxima into
the activation unit); for the monotone activations used here the two
orders give identical results, which the tests exploit as an oracle.

Leaky ReLU uses a power-of-two negative slope of 1/8, implemented as an
arithmetic right shift by 3 (floor), so it stays exact in integers.
"""

from __future__ import annotations

import numpy as np

from .layers import LayerDescriptor
from .quant import ACC_DTYPE

LRELU_SHIFT = 3  # negative slope 1/8


def max_pool(wide: np.ndarray, window: int, stride: int) -> np.ndarray:
    """Exact-tiling max pool over the trailing two dims of (J, M, N)."""
    arr = np.asarray(wide, dtype=ACC_DTYPE)
    j, m, n = arr.shape
    for extent in (m, n):
        if extent < window or (extent - window) % stride != 0:
            raise ValueError(
                f"pool {window}/{stride} does not tile a {extent}-wide map")
    win = np.lib.stride_tricks.sliding_window_view(arr, (window, window),
                                                   axis=(1, 2))
    return win[:, ::stride, ::stride].max(axis=(-2, -1))


def activate(wide: np.ndarray, kind: str) -> np.ndarray:
    arr = np.asarray(wide, dtype=ACC_DTYPE)
    if kind == "none":
        return arr.copy()
    if kind == "relu":
        return np.maximum(arr, 0)
    if kind == "lrelu":
        return np.where(arr >= 0, arr, arr >> LRELU_SHIFT)
    raise ValueError(f"unknown activation {kind!r}")


def pool_activate(wide: np.ndarray, layer: LayerDescriptor) -> np.ndarray:
    """Layer epilogue on wide outputs: fused pool (if any), then activation."""
    out = np.asarray(wide, dtype=ACC_DTYPE)
    if layer.pool_window:
        out = max_pool(out, layer.pool_window, layer.pool_stride)
    return activate(out, layer.activation)
