"""Accumulator scratchpads behind the array columns.

Each array column drains into its own sub-unit: an adder plus a small
scratchpad (SPM) holding partial sums for one output block.  Partial
results for the same output arrive over several row-chunk passes and are
summed in place; a completed block is drained (read and cleared) toward
the post-processing units.
"""

from __future__ import annotations

import numpy as np

from .quant import ACC_DTYPE


class SpmCapacityError(ValueError):
    pass


class AccumulatorBank:
    def __init__(self, n_banks: int, spm_entries: int):
        if n_banks <= 0 or spm_entries <= 0:
            raise SpmCapacityError("bank count and entries must be positive")
        self.n_banks = n_banks
        self.spm_entries = spm_entries
        self.values = np.zeros((n_banks, spm_entries), dtype=ACC_DTYPE)
        self.adds = 0       # partial-sum arrivals (for access accounting)

    def accumulate(self, bank: int, addr, partial) -> None:
        """Add partial sums into SPM entries of one bank.

        `addr` may be a scalar or index array; `partial` matches it.
        Out-of-range addresses mean the planned block does not fit.
        """
        addr = np.asarray(addr)
        if addr.size and (addr.min() < 0 or addr.max() >= self.spm_entries):
            raise SpmCapacityError(
                f"address {int(addr.max())} outside {self.spm_entries}-entry SPM")
        np.add.at(self.values[bank], addr, np.asarray(partial, dtype=ACC_DTYPE))
        self.adds += int(addr.size)

    def drain(self, bank: int, count: int) -> np.ndarray:
        """Read and clear the first `count` entries of a bank."""
        if count > self.spm_entries:
            raise SpmCapacityError(f"drain of {count} exceeds SPM")
        out = self.values[bank, :count].copy()
        self.values[bank, :count] = 0
        return out

    def total(self) -> int:
        return int(self.values.sum())
