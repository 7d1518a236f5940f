"""im2col lowering: convolutions as matrix products.

A conv layer with I maps, P x Q kernels and stride S is fed to the
array as M*N input vectors of length I*P*Q: vector (m, n) is the
receptive field of output position (m, n), flattened in (i, p, q)
order.  Filters flatten the same way, so a K x L weight tile turns the
array into a plain matmul engine and the stride disappears into the
lowering.
"""

from __future__ import annotations

import numpy as np

from .layers import LayerDescriptor
from .oracle import pad_input
from .quant import ACC_DTYPE


def im2col(inputs: np.ndarray, layer: LayerDescriptor) -> np.ndarray:
    """Lower a (C, H, W) input to (M*N, I*P*Q) vectors.

    The input may be smaller than the declared extent (zero-padded up).
    """
    x = pad_input(np.asarray(inputs, dtype=ACC_DTYPE), layer)
    p, q, s = layer.kernel_rows, layer.kernel_cols, layer.stride
    win = np.lib.stride_tricks.sliding_window_view(x, (p, q), axis=(1, 2))
    win = win[:, ::s, ::s]                       # (I, M, N, P, Q)
    m, n = layer.out_rows, layer.out_cols
    vecs = win.transpose(1, 2, 0, 3, 4).reshape(m * n, layer.in_maps * p * q)
    return np.ascontiguousarray(vecs)


def lower_weights(weights: np.ndarray, layer: LayerDescriptor) -> np.ndarray:
    """Flatten (J, I, P, Q) filters to an (I*P*Q, J) matrix (filter per column)."""
    w = np.asarray(weights, dtype=ACC_DTYPE).reshape(
        layer.out_maps, layer.in_maps * layer.kernel_rows * layer.kernel_cols)
    return np.ascontiguousarray(w.T)
