"""Workload analysis: MAC/weight counts and data-reuse factors.

For a layer with I input maps, J filters, an M x N output grid and
P x Q kernels:

    mac_count    = J * M * N * I * P * Q
    weight_count = J * I * P * Q

Reuse factors count how many MACs each datum feeds:

    output_act_reuse = I * P * Q          (partials summed per output)
    weight_reuse     = M * N              (outputs sharing one weight; 1 for fc)
    input_act_reuse  = J * ceil(P/S) * ceil(Q/S)
                                          (interior activations; J*P*Q at stride 1)

Two exact identities follow and are relied on elsewhere:
weight_reuse * weight_count == mac_count and
output_act_reuse * (J * M * N) == mac_count.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil

from .layers import LayerDescriptor, NetworkDescriptor


@dataclass(frozen=True)
class ReuseProfile:
    input_act_reuse: int
    weight_reuse: int
    output_act_reuse: int


def mac_count(layer: LayerDescriptor) -> int:
    if layer.kind == "pool":
        return 0
    return (layer.out_maps * layer.out_rows * layer.out_cols *
            layer.in_maps * layer.kernel_rows * layer.kernel_cols)


def weight_count(layer: LayerDescriptor) -> int:
    if layer.kind == "pool":
        return 0
    return (layer.out_maps * layer.in_maps *
            layer.kernel_rows * layer.kernel_cols)


def output_count(layer: LayerDescriptor) -> int:
    return layer.out_maps * layer.out_rows * layer.out_cols


def input_count(layer: LayerDescriptor) -> int:
    c, h, w = layer.in_volume()
    return c * h * w


def reuse_profile(layer: LayerDescriptor) -> ReuseProfile:
    """Per-datum reuse factors; input figure is for interior activations."""
    if layer.kind == "pool":
        raise ValueError("pool layers have no MAC reuse profile")
    per_filter = (ceil(layer.kernel_rows / layer.stride) *
                  ceil(layer.kernel_cols / layer.stride))
    return ReuseProfile(
        input_act_reuse=layer.out_maps * per_filter,
        weight_reuse=layer.out_rows * layer.out_cols,
        output_act_reuse=(layer.in_maps * layer.kernel_rows *
                          layer.kernel_cols),
    )


@dataclass(frozen=True)
class NetworkStats:
    conv_macs: int
    conv_weights: int
    fc_macs: int
    fc_weights: int

    @property
    def total_macs(self) -> int:
        return self.conv_macs + self.fc_macs

    @property
    def total_weights(self) -> int:
        return self.conv_weights + self.fc_weights


def network_stats(net: NetworkDescriptor) -> NetworkStats:
    return NetworkStats(
        conv_macs=sum(mac_count(l) for l in net.conv_layers()),
        conv_weights=sum(weight_count(l) for l in net.conv_layers()),
        fc_macs=sum(mac_count(l) for l in net.fc_layers()),
        fc_weights=sum(weight_count(l) for l in net.fc_layers()),
    )


def analyze_rows(net: NetworkDescriptor) -> list[dict]:
    """Per-layer analysis table (plus reuse factors) for reports."""
    rows = []
    for idx, lyr in enumerate(net.layers):
        row = {
            "layer": lyr.name or f"{lyr.kind}{idx}",
            "kind": lyr.kind,
            "macs": mac_count(lyr),
            "weights": weight_count(lyr),
            "outputs": output_count(lyr),
            "inputs": input_count(lyr),
        }
        if lyr.kind != "pool":
            prof = reuse_profile(lyr)
            row.update(input_act_reuse=prof.input_act_reuse,
                       weight_reuse=prof.weight_reuse,
                       output_act_reuse=prof.output_act_reuse)
        rows.append(row)
    return rows
