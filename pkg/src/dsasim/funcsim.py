"""Functional emulation: run a whole network through the planned dataflow.

Layers execute by walking their plan's schedule.  Transfer events are
tallied into a log (which must reproduce the planned DRAM traffic
exactly); compute events slice the lowered operands, push them through
the array model (vectorized fast path or the cycle-stepped grid) and
accumulate partial sums through the SPM banks.  All arithmetic is
integer, so the result is bit-identical to the reference loop nests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .accumulator import AccumulatorBank
from .hardware import HardwareConfig
from .layers import LayerDescriptor, NetworkDescriptor
from .lowering import im2col, lower_weights
from .oracle import oracle_layer
from .planner import DataflowPlan, _chunks, plan_network
from .postproc import max_pool, pool_activate
from .quant import ACC_DTYPE, DATA_DTYPE, QuantTensor, random_tensor, requantize


class OracleMismatchError(AssertionError):
    pass


@dataclass
class LayerTransfers:
    name: str
    dram_in: int = 0
    dram_weights: int = 0
    dram_out: int = 0

    @property
    def total(self) -> int:
        return self.dram_in + self.dram_weights + self.dram_out


@dataclass
class TransferLog:
    layers: list = field(default_factory=list)

    def add(self, entry: LayerTransfers) -> None:
        self.layers.append(entry)

    @property
    def total(self) -> int:
        return sum(e.total for e in self.layers)

    def verify(self, plans: list) -> None:
        """Logged transfers must equal the planned traffic, layer by layer."""
        if len(self.layers) != len(plans):
            raise OracleMismatchError("transfer log / plan count mismatch")
        for e, p in zip(self.layers, plans):
            want = (p.traffic.in_act, p.traffic.weights, p.traffic.out_act)
            got = (e.dram_in, e.dram_weights, e.dram_out)
            if got != want:
                raise OracleMismatchError(
                    f"{e.name}: logged transfers {got} != planned {want}")


@dataclass
class LayerResult:
    name: str
    kind: str
    shift: int
    out_shape: tuple
    transfers: LayerTransfers


@dataclass
class NetworkResult:
    network: str
    engine: str
    seed: int
    layers: list
    output: QuantTensor
    log: TransferLog
    checked: bool = False


def make_weights(net: NetworkDescriptor, seed: int) -> list[QuantTensor]:
    """Deterministic per-layer weight tensors, one per MAC layer."""
    rng = np.random.default_rng(seed)
    out = []
    for lyr in net.layers:
        if lyr.kind == "pool":
            continue
        shape = (lyr.out_maps,
                 lyr.in_maps * lyr.kernel_rows * lyr.kernel_cols)
        out.append(random_tensor(shape, rng))
    return out


def make_input(net: NetworkDescriptor, seed: int) -> QuantTensor:
    rng = np.random.default_rng(seed + 1)
    first = net.layers[0]
    return random_tensor((first.in_maps, first.in_rows, first.in_cols), rng)


def simulate_layer(x: QuantTensor, weights: QuantTensor,
                   layer: LayerDescriptor, plan: DataflowPlan,
                   cfg: HardwareConfig, engine: str = "fast"):
    """Execute one MAC layer; returns (wide (J, M, N) sums, LayerTransfers)."""
    from .systolic import run_sa_conv

    if engine not in ("fast", "cycle"):
        raise ValueError(f"unknown engine {engine!r}")
    vecs = im2col(x.wide().reshape(x.shape), layer)       # (M*N, I*P*Q)
    wmat = lower_weights(weights.wide(), layer)           # (I*P*Q, J)
    pq = layer.kernel_rows * layer.kernel_cols
    ncols = layer.out_cols
    acc = np.zeros((layer.out_maps, layer.out_rows, layer.out_cols),
                   dtype=ACC_DTYPE)
    log = LayerTransfers(layer.name or layer.kind)
    bank = AccumulatorBank(cfg.sa_cols, cfg.spm_entries)
    for ev in plan.schedule(cfg):
        if ev[0] == "dram_in":
            log.dram_in += ev[1]
            continue
        if ev[0] == "dram_weights":
            log.dram_weights += ev[1]
            continue
        if ev[0] == "dram_out":
            log.dram_out += ev[1]
            continue
        _, j0, j1, m0, m1, n0, n1, i0, i1 = ev
        rowsel = np.arange(m0, m1)[:, None] * ncols + np.arange(n0, n1)
        vblock = vecs[rowsel.ravel(), i0 * pq:i1 * pq]
        wsub = wmat[i0 * pq:i1 * pq, j0:j1]
        t = vblock.shape[0]
        taddr = np.arange(t)
        for r0, r1 in _chunks(wsub.shape[0], cfg.sa_rows):
            out, _ = run_sa_conv(wsub[r0:r1], vblock[:, r0:r1],
                                 cfg.sa_rows, cfg.sa_cols,
                                 fast=(engine == "fast"))
            for l in range(j1 - j0):
                bank.accumulate(l, taddr, out[:, l])
        for l, j in enumerate(range(j0, j1)):
            acc[j, m0:m1, n0:n1] += bank.drain(l, t).reshape(m1 - m0, n1 - n0)
    return acc, log


def _as_fc_input(x: QuantTensor) -> QuantTensor:
    return QuantTensor(x.data.reshape(-1, 1, 1))


def simulate_network(net: NetworkDescriptor, cfg: HardwareConfig,
                     seed: int = 0, engine: str = "fast",
                     check: bool = False,
                     x: QuantTensor | None = None,
                     weights: list[QuantTensor] | None = None) -> NetworkResult:
    """Run the full network; optionally cross-check every layer against
    the reference loop nests (exact integer comparison)."""
    if weights is None:
        weights = make_weights(net, seed)
    if x is None:
        x = make_input(net, seed)
    plans = plan_network(net, cfg)
    log = TransferLog()
    results = []
    widx = 0
    for lyr in net.layers:
        if lyr.kind == "pool":
            pooled = max_pool(x.wide().reshape(x.shape),
                              lyr.pool_window, lyr.pool_stride)
            x = QuantTensor(pooled.astype(DATA_DTYPE))
            continue
        if lyr.kind == "fc":
            x = _as_fc_input(x)
        w = weights[widx]
        acc, transfers = simulate_layer(x, w, lyr, plans[widx], cfg, engine)
        if check:
            ref = oracle_layer(x, w, lyr)
            if not np.array_equal(ref, acc):
                raise OracleMismatchError(
                    f"{lyr.name or lyr.kind}: array result differs from the "
                    f"reference loop nest")
        wide = pool_activate(acc, lyr)
        out, shift = requantize(wide)
        results.append(LayerResult(lyr.name or lyr.kind, lyr.kind, shift,
                                   out.shape, transfers))
        log.add(transfers)
        x = out
        widx += 1
    log.verify(plans)
    return NetworkResult(net.name, engine, seed, results, x, log, check)
