"""Reference (oracle) implementations of the layer math.

Everything here is written directly from the layer definitions — loop
nests over numpy views, no systolic machinery, no tiling — and is what
the array simulators are checked against.
"""

from __future__ import annotations

import numpy as np

from .layers import LayerDescriptor
from .quant import ACC_DTYPE, QuantTensor


def pad_input(data: np.ndarray, layer: LayerDescriptor) -> np.ndarray:
    """Zero-pad a (C, H, W) tensor up to the layer's declared input extent."""
    c, h, w = data.shape
    if c != layer.in_maps:
        raise ValueError(f"expected {layer.in_maps} input maps, got {c}")
    dh, dw = layer.in_rows - h, layer.in_cols - w
    if dh < 0 or dw < 0:
        raise ValueError("input larger than the layer's declared extent")
    if dh == 0 and dw == 0:
        return data
    return np.pad(data, ((0, 0), (dh // 2, dh - dh // 2),
                         (dw // 2, dw - dw // 2)))


def oracle_conv(inputs: QuantTensor, weights: QuantTensor | np.ndarray,
                layer: LayerDescriptor) -> np.ndarray:
    """Direct convolution: wide (int64) outputs of shape (J, M, N).

    `weights` has shape (J, I, P, Q).  The input tensor may be the exact
    declared extent or smaller (it is zero-padded up).
    """
    w = weights.data if isinstance(weights, QuantTensor) else np.asarray(weights)
    w = w.astype(ACC_DTYPE).reshape(
        layer.out_maps, layer.in_maps, layer.kernel_rows, layer.kernel_cols)
    x = pad_input(inputs.wide().reshape(inputs.shape), layer)
    s = layer.stride
    out = np.zeros((layer.out_maps, layer.out_rows, layer.out_cols),
                   dtype=ACC_DTYPE)
    for j in range(layer.out_maps):
        for m in range(layer.out_rows):
            for n in range(layer.out_cols):
                patch = x[:, m * s:m * s + layer.kernel_rows,
                          n * s:n * s + layer.kernel_cols]
                out[j, m, n] = np.sum(patch * w[j])
    return out


def oracle_fc(inputs: QuantTensor, weights: QuantTensor | np.ndarray,
              layer: LayerDescriptor) -> np.ndarray:
    """Fully-connected as the 1x1 special case: wide outputs, shape (J, 1, 1)."""
    w = weights.data if isinstance(weights, QuantTensor) else np.asarray(weights)
    w = w.astype(ACC_DTYPE).reshape(layer.out_maps, layer.in_maps)
    x = inputs.wide().reshape(layer.in_maps)
    out = np.zeros((layer.out_maps, 1, 1), dtype=ACC_DTYPE)
    for j in range(layer.out_maps):
        out[j, 0, 0] = np.dot(w[j], x)
    return out


def oracle_layer(inputs: QuantTensor, weights, layer: LayerDescriptor) -> np.ndarray:
    if layer.kind == "conv":
        return oracle_conv(inputs, weights, layer)
    if layer.kind == "fc":
        return oracle_fc(inputs, weights, layer)
    raise ValueError(f"no MAC oracle for {layer.kind!r} layers")
