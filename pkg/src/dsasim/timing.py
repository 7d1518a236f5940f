"""Cycle-level performance model for the two arrays.

Per-tile costs, weight matrix chunked into K-row by L-column tiles and
T = M*N activation vectors streamed per tile:

  resident-weight array (shadow staging, double buffered):
      max(T + K + L - 1, ceil(tile_bytes / bytes_per_cycle))
  the same array without shadow staging (weights reloaded in-band):
      max(T + K + L - 1 + K, ...)
  streamed-weight array (a fresh weight tile can enter every cycle):
      max(T, ceil(T * tile_bytes / bytes_per_cycle)) per tile,
      plus one K + L - 1 pipeline fill per layer.

The drain span uses the full array dimensions: results travel the whole
physical grid even when a tile only occupies part of it.  A layer's
cycle count is the maximum of its compute span and its DRAM span
(planned traffic over the per-cycle DRAM budget); the smaller side is
hidden by double buffering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil

from .analysis import mac_count
from .hardware import HardwareConfig
from .layers import LayerDescriptor, NetworkDescriptor
from .planner import DataflowPlan, _chunks, plan_network


@dataclass(frozen=True)
class LayerTiming:
    name: str
    kind: str
    engine: str            # "resident", "streamed", or "split"
    compute_cycles: int
    dram_cycles: int

    @property
    def total_cycles(self) -> int:
        return max(self.compute_cycles, self.dram_cycles)

    @property
    def bound(self) -> str:
        if self.dram_cycles > self.compute_cycles:
            return "memory"
        if self.dram_cycles < self.compute_cycles:
            return "compute"
        return "balanced"


@dataclass
class NetworkTiming:
    network: str
    mode: str
    clock_hz: float
    layers: list[LayerTiming] = field(default_factory=list)
    total_macs: int = 0

    @property
    def total_cycles(self) -> int:
        return sum(t.total_cycles for t in self.layers)

    @property
    def seconds(self) -> float:
        return self.total_cycles / self.clock_hz

    @property
    def gops(self) -> float:
        """Giga-operations/s; one MAC counts as two operations."""
        return 2 * self.total_macs / self.seconds / 1e9

    def cycles_by_kind(self) -> dict:
        out: dict = {}
        for t in self.layers:
            out[t.kind] = out.get(t.kind, 0) + t.total_cycles
        return out


def _tile_grid(layer: LayerDescriptor, cols: int, cfg: HardwareConfig):
    rows = layer.in_maps * layer.kernel_rows * layer.kernel_cols
    return _chunks(rows, cfg.sa_rows), _chunks(cols, cfg.sa_cols)


def resident_cycles(layer: LayerDescriptor, cfg: HardwareConfig,
                    cols: int | None = None, shadow: bool = True,
                    col_chunks=None) -> int:
    """Compute cycles on the resident-weight array for `cols` filters."""
    if cols is None:
        cols = layer.out_maps
    row_chunks, default_cols = _tile_grid(layer, cols, cfg)
    if col_chunks is None:
        col_chunks = [c1 - c0 for c0, c1 in default_cols]
    t = layer.out_rows * layer.out_cols
    span = t + cfg.sa_rows + cfg.sa_cols - 1
    if not shadow:
        span += cfg.sa_rows
    bpc = cfg.bytes_per_cycle
    total = 0
    for r0, r1 in row_chunks:
        kr = r1 - r0
        for lc in col_chunks:
            stage = ceil(kr * lc * cfg.bytes_per_element / bpc)
            total += max(span, stage)
    return total


def streamed_cycles(layer: LayerDescriptor, cfg: HardwareConfig) -> int:
    """Compute cycles on the streamed-weight array (full filter set)."""
    row_chunks, col_chunks = _tile_grid(layer, layer.out_maps, cfg)
    t = layer.out_rows * layer.out_cols
    bpc = cfg.bytes_per_cycle
    total = cfg.sa_rows + cfg.sa_cols - 1
    for r0, r1 in row_chunks:
        kr = r1 - r0
        for c0, c1 in col_chunks:
            stage = ceil(t * kr * (c1 - c0) * cfg.bytes_per_element / bpc)
            total += max(t, stage)
    return total


def _split_filter_groups(layer: LayerDescriptor, cfg: HardwareConfig):
    """Halve the filter column groups between the two resident arrays."""
    groups = [c1 - c0 for c0, c1 in _chunks(layer.out_maps, cfg.sa_cols)]
    half = ceil(len(groups) / 2)
    return groups[:half], groups[half:]


def _dram_cycles(plan: DataflowPlan, cfg: HardwareConfig) -> int:
    return ceil(plan.traffic.total * cfg.bytes_per_element / cfg.bytes_per_cycle)


def time_layer(layer: LayerDescriptor, plan: DataflowPlan,
               cfg: HardwareConfig, mode: str = "dual") -> LayerTiming:
    """Cycle count for one layer.

    mode "dual": CONV layers split across both resident-weight arrays,
    FC layers run on the streamed-weight array.  mode "conventional":
    everything runs on a single resident-weight array without shadow
    staging.
    """
    if mode == "dual":
        if layer.kind == "fc":
            compute = streamed_cycles(layer, cfg)
            engine = "streamed"
        else:
            g0, g1 = _split_filter_groups(layer, cfg)
            c0 = resident_cycles(layer, cfg, col_chunks=g0) if g0 else 0
            c1 = resident_cycles(layer, cfg, col_chunks=g1) if g1 else 0
            compute = max(c0, c1)
            engine = "split"
    elif mode == "conventional":
        compute = resident_cycles(layer, cfg, shadow=False)
        engine = "resident"
    else:
        raise ValueError(f"unknown timing mode {mode!r}")
    return LayerTiming(layer.name or layer.kind, layer.kind, engine,
                       compute, _dram_cycles(plan, cfg))


def time_network(net: NetworkDescriptor, cfg: HardwareConfig,
                 mode: str = "dual") -> NetworkTiming:
    plans = plan_network(net, cfg)
    timing = NetworkTiming(net.name, mode, cfg.clock_hz)
    for p in plans:
        timing.layers.append(time_layer(p.layer, p, cfg, mode))
        timing.total_macs += mac_count(p.layer)
    return timing


@dataclass
class SpeedupReport:
    """Dual-vs-single cycle ratios across square array sizes."""
    network: str
    sizes: tuple
    conventional: dict   # size -> NetworkTiming
    dual: dict

    def ratio(self, size: int) -> float:
        return (self.conventional[size].total_cycles
                / self.dual[size].total_cycles)

    def kind_speedup(self, kind: str, size: int, base: int) -> float:
        """Conventional-array scaling gain for one layer kind."""
        ref = self.conventional[base].cycles_by_kind()[kind]
        cur = self.conventional[size].cycles_by_kind()[kind]
        return ref / cur

    def rows(self):
        for s in self.sizes:
            yield {"size": s,
                   "conventional_cycles": self.conventional[s].total_cycles,
                   "dual_cycles": self.dual[s].total_cycles,
                   "speedup": self.ratio(s)}


def speedup_report(net: NetworkDescriptor, cfg: HardwareConfig,
                   sizes=(1, 2, 4, 8)) -> SpeedupReport:
    conv, dual = {}, {}
    for s in sizes:
        scfg = cfg.with_array(s, s)
        conv[s] = time_network(net, scfg, "conventional")
        dual[s] = time_network(net, scfg, "dual")
    return SpeedupReport(net.name, tuple(sizes), conv, dual)
