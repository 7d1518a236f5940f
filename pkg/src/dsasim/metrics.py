"""Access-count energy accounting and planned-vs-naive comparisons.

Energy is relative: each access class has a unit cost and the total is
a weighted sum of access counts.  Defaults follow the usual memory
hierarchy ordering (DRAM two hundred times a MAC, big on-chip buffers a
few times, the small SPM cheaper still).  Absolute silicon numbers
(area, milliwatts) are out of scope; only ratios between configurations
are meaningful.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from itertools import product
from pathlib import Path

from .analysis import mac_count, output_count
from .hardware import HardwareConfig
from .layers import NetworkDescriptor
from .planner import naive_traffic, plan_network


@dataclass(frozen=True)
class EnergyCostTable:
    """Relative energy per access: DRAM element, buffer access, SPM
    access, single MAC."""
    dram: float = 200.0
    buffer: float = 6.0
    spm: float = 2.0
    mac: float = 1.0

    def scaled(self, dram: float = 1.0, buffer: float = 1.0,
               spm: float = 1.0, mac: float = 1.0) -> "EnergyCostTable":
        return EnergyCostTable(self.dram * dram, self.buffer * buffer,
                               self.spm * spm, self.mac * mac)

    def as_dict(self) -> dict:
        return {"dram": self.dram, "buffer": self.buffer,
                "spm": self.spm, "mac": self.mac}

    @classmethod
    def from_file(cls, path) -> "EnergyCostTable":
        vals = {}
        for raw in Path(path).read_text().splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, val = line.replace("=", " ").partition(" ")
            if key not in ("dram", "buffer", "spm", "mac"):
                raise ValueError(f"unknown cost entry {key!r}")
            vals[key] = float(val)
        return cls(**vals)


@dataclass(frozen=True)
class AccessCounts:
    dram: int
    buffer: int
    spm: int
    macs: int

    def energy(self, table: EnergyCostTable) -> float:
        return (self.dram * table.dram + self.buffer * table.buffer
                + self.spm * table.spm + self.macs * table.mac)


def planned_counts(plans) -> AccessCounts:
    return AccessCounts(
        dram=sum(p.traffic.total for p in plans),
        buffer=sum(p.onchip.data_buffer + p.onchip.weight_buffer for p in plans),
        spm=sum(p.onchip.spm for p in plans),
        macs=sum(mac_count(p.layer) for p in plans))


def baseline_counts(net: NetworkDescriptor) -> AccessCounts:
    """Naive streaming: both operands from DRAM for every MAC, outputs
    written once, each DRAM element staged through a buffer (one write,
    one read) and every partial bouncing through the SPM."""
    layers = [l for l in net.layers if l.kind != "pool"]
    dram = sum(naive_traffic(l) for l in layers)
    macs = sum(mac_count(l) for l in layers)
    outs = sum(output_count(l) for l in layers)
    return AccessCounts(dram=dram, buffer=2 * dram, spm=2 * macs + outs,
                        macs=macs)


@dataclass
class EnergyComparison:
    network: str
    table: EnergyCostTable
    planned: AccessCounts
    baseline: AccessCounts

    @property
    def planned_energy(self) -> float:
        return self.planned.energy(self.table)

    @property
    def baseline_energy(self) -> float:
        return self.baseline.energy(self.table)

    @property
    def ratio(self) -> float:
        return self.planned_energy / self.baseline_energy

    @property
    def savings(self) -> float:
        return 1.0 - self.ratio


def compare(net: NetworkDescriptor, cfg: HardwareConfig,
            table: EnergyCostTable | None = None) -> EnergyComparison:
    table = table or EnergyCostTable()
    plans = plan_network(net, cfg)
    return EnergyComparison(net.name, table, planned_counts(plans),
                            baseline_counts(net))


def sensitivity(net: NetworkDescriptor, cfg: HardwareConfig,
                table: EnergyCostTable | None = None,
                factors=(0.5, 1.0, 2.0)) -> list[dict]:
    """Energy ratio across every combination of per-coefficient scalings."""
    table = table or EnergyCostTable()
    plans = plan_network(net, cfg)
    planned = planned_counts(plans)
    base = baseline_counts(net)
    rows = []
    for fd, fb, fs, fm in product(factors, repeat=4):
        t = table.scaled(fd, fb, fs, fm)
        ratio = planned.energy(t) / base.energy(t)
        rows.append({"dram_x": fd, "buffer_x": fb, "spm_x": fs, "mac_x": fm,
                     "ratio": ratio, "savings": 1.0 - ratio})
    return rows


def traffic_rows(net: NetworkDescriptor, cfg: HardwareConfig) -> list[dict]:
    """Per-layer planned vs naive DRAM elements."""
    rows = []
    for p in plan_network(net, cfg):
        lyr = p.layer
        rows.append({"layer": lyr.name or lyr.kind, "case": p.case_id,
                     "order": p.order,
                     "tj": p.tiles.tj, "ti": p.tiles.ti,
                     "tm": p.tiles.tm, "tn": p.tiles.tn,
                     "dram_in": p.traffic.in_act,
                     "dram_weights": p.traffic.weights,
                     "dram_out": p.traffic.out_act,
                     "dram_total": p.traffic.total,
                     "naive": naive_traffic(lyr)})
    return rows


def write_csv(path, rows: list[dict]) -> None:
    if not rows:
        raise ValueError("nothing to write")
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
