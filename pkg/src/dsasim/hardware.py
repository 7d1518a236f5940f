"""Hardware configuration for the dual systolic array accelerator.

The machine has two K x L systolic arrays: a weight-stationary one for
convolutions (shadow-register weight preload) and one with per-PE weight
feeds for fully-connected layers.  Post-processing sits behind the
arrays: accumulator SPMs (one bank per array column), pooling and
activation units.  Defaults mirror the reference configuration:
8x8 arrays, 256-entry SPMs, 36 KiB weight buffer, 256 KiB data buffer,
12.8 GB/s DRAM at 280 MHz, 8-bit operands.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class HardwareConfig:
    sa_rows: int = 8                 # K, rows of each array
    sa_cols: int = 8                 # L, columns of each array
    spm_entries: int = 256           # accumulator scratchpad entries per bank
    weight_buffer_bytes: int = 36 * 1024
    data_buffer_bytes: int = 256 * 1024
    dram_bandwidth_bytes_per_s: float = 12.8e9
    clock_hz: float = 280e6
    bytes_per_element: int = 1       # 8-bit operands

    def __post_init__(self):
        ints = (self.sa_rows, self.sa_cols, self.spm_entries,
                self.weight_buffer_bytes, self.data_buffer_bytes,
                self.bytes_per_element)
        if any(v <= 0 for v in ints):
            raise ConfigError("all sizes must be positive")
        if self.dram_bandwidth_bytes_per_s <= 0 or self.clock_hz <= 0:
            raise ConfigError("bandwidth and clock must be positive")

    # elements, not bytes, are the planner's working unit
    @property
    def weight_buffer_elems(self) -> int:
        return self.weight_buffer_bytes // self.bytes_per_element

    @property
    def data_buffer_elems(self) -> int:
        return self.data_buffer_bytes // self.bytes_per_element

    @property
    def bytes_per_cycle(self) -> float:
        return self.dram_bandwidth_bytes_per_s / self.clock_hz

    def with_array(self, rows: int, cols: int) -> "HardwareConfig":
        return replace(self, sa_rows=rows, sa_cols=cols)


_FIELDS = ("sa_rows", "sa_cols", "spm_entries", "weight_buffer_bytes",
           "data_buffer_bytes", "dram_bandwidth_bytes_per_s", "clock_hz",
           "bytes_per_element")


def parse_hardware(text: str) -> HardwareConfig:
    """Parse a key-value hardware file (one `key value` pair per line)."""
    kwargs = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace("=", " ").split()
        if len(parts) != 2:
            raise ConfigError(f"line {ln}: expected 'key value'")
        key, val = parts
        if key not in _FIELDS:
            raise ConfigError(f"line {ln}: unknown key {key!r}")
        conv = float if key in ("dram_bandwidth_bytes_per_s", "clock_hz") else int
        kwargs[key] = conv(val)
    return HardwareConfig(**kwargs)


def format_hardware(cfg: HardwareConfig) -> str:
    lines = []
    for key in _FIELDS:
        val = getattr(cfg, key)
        lines.append(f"{key} {val:g}" if isinstance(val, float) else f"{key} {val}")
    return "\n".join(lines) + "\n"


def load_hardware(path) -> HardwareConfig:
    with open(path) as fh:
        return parse_hardware(fh.read())
