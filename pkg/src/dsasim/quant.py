"""Fixed-point tensors and requantization.

Operands are 8-bit signed integers; accumulation happens in 64-bit
(comfortably wider than the 32-bit the datapath guarantees, so overflow
in the model would only ever hide hardware headroom, never create it).
Wide layer outputs are brought back to 8 bits with a per-layer right
shift: the smallest shift for which round-half-away-from-zero fits
[-128, 127], followed by saturation.
"""

from __future__ import annotations

import numpy as np

ACC_DTYPE = np.int64
DATA_DTYPE = np.int8
Q_MIN, Q_MAX = -128, 127


class QuantTensor:
    """An int8 tensor of up to 3 dims with helpers for widening."""

    def __init__(self, data):
        arr = np.asarray(data)
        if arr.ndim > 3:
            raise ValueError(f"rank {arr.ndim} tensor; at most 3 dims supported")
        if not np.issubdtype(arr.dtype, np.integer):
            raise TypeError("quantized tensors hold integers")
        if arr.size and (arr.min() < Q_MIN or arr.max() > Q_MAX):
            raise ValueError("values outside the signed 8-bit range")
        self.data = arr.astype(DATA_DTYPE)

    @property
    def shape(self):
        return self.data.shape

    def wide(self) -> np.ndarray:
        return self.data.astype(ACC_DTYPE)

    def __eq__(self, other):
        if not isinstance(other, QuantTensor):
            return NotImplemented
        return self.shape == other.shape and bool(np.all(self.data == other.data))

    def __repr__(self):
        return f"QuantTensor(shape={self.shape}, dtype=int8)"


def random_tensor(shape, rng: np.random.Generator) -> QuantTensor:
    """Seeded uniform int8 tensor over the full signed range."""
    return QuantTensor(rng.integers(Q_MIN, Q_MAX + 1, size=shape, dtype=np.int64))


def _round_shift(wide: np.ndarray, shift: int) -> np.ndarray:
    if shift == 0:
        return wide.copy()
    half = 1 << (shift - 1)
    mag = (np.abs(wide) + half) >> shift  # round half away from zero
    return np.sign(wide) * mag


def choose_shift(wide: np.ndarray) -> int:
    """Smallest right shift s such that the rounded values fit int8."""
    shift = 0
    while np.abs(_round_shift(wide, shift)).max(initial=0) > Q_MAX:
        shift += 1
    return shift


def requantize(wide, shift: int | None = None) -> tuple[QuantTensor, int]:
    """Round-to-nearest, saturating 8-bit requantization.

    Returns the quantized tensor and the shift used (chosen from the data
    when not given).  Deterministic: equal wide inputs always give equal
    quantized outputs.
    """
    wide = np.asarray(wide, dtype=ACC_DTYPE)
    if shift is None:
        shift = choose_shift(wide)
    if shift < 0:
        raise ValueError("shift must be non-negative")
    out = np.clip(_round_shift(wide, shift), Q_MIN, Q_MAX)
    return QuantTensor(out), shift
