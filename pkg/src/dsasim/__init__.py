"""Simulator and analysis toolkit for a dual systolic-array CNN accelerator.

Two heterogeneous 8x8 arrays — one keeping weight tiles resident for
convolutions, one streaming a fresh weight tile every cycle for
fully-connected layers — fed by on-chip buffers and drained through
per-column accumulators into pooling/activation/requantization units.
The package provides functional (bit-exact integer) emulation, a
cycle/energy model, and a dataflow planner that picks per-layer tilings
minimizing DRAM traffic.
"""

from .analysis import (NetworkStats, ReuseProfile, analyze_rows, input_count,
                       mac_count, network_stats, output_count, reuse_profile,
                       weight_count)
from .funcsim import (NetworkResult, OracleMismatchError, TransferLog,
                      make_input, make_weights, simulate_layer,
                      simulate_network)
from .hardware import ConfigError, HardwareConfig, load_hardware
from .layers import (DescriptorError, LayerDescriptor, NetworkDescriptor,
                     format_network, load_network, parse_network)
from .metrics import (AccessCounts, EnergyComparison, EnergyCostTable,
                      baseline_counts, compare, planned_counts, sensitivity)
from .networks import BUILTIN_NETWORKS, builtin_network, resolve_network, scale_network
from .oracle import oracle_conv, oracle_fc, oracle_layer
from .planner import (DataflowPlan, DramTraffic, PlanError, classify,
                      naive_traffic, plan, plan_network)
from .quant import QuantTensor, choose_shift, random_tensor, requantize
from .systolic import (ArrayTrace, StreamUnderrunError, SystolicArray,
                       TileShapeError, run_sa_conv, run_sa_fc)
from .timing import (LayerTiming, NetworkTiming, SpeedupReport,
                     resident_cycles, speedup_report, streamed_cycles,
                     time_layer, time_network)

__version__ = "0.1.0"
