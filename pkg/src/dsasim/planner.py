"""Dataflow planning: pick a tiling that minimizes DRAM traffic.

Footprints (elements, padded input extents):

    IF = I * in_rows * in_cols      OF = J * M * N      W = J * I * P * Q

Four regimes, checked in order:

  case 1  IF + OF fit the data buffer and one output map fits an SPM
          (M*N <= spm entries): all activations stay on chip, weights
          stream from DRAM exactly once.
  case 2  IF + OF fit but the map overflows the SPM, and the weight
          buffer holds at least L complete filters: same DRAM traffic as
          case 1, outputs produced in SPM-sized spatial blocks.
  case 3  only IF fits: inputs stay resident, outputs stream to DRAM as
          blocks complete (each output element written once).
  case 4  nothing fits: exhaustive divisor-pruned search over tile sizes
          (Tj, Ti, Tm, Tn) and two loop orders, minimizing total DRAM
          elements.  Tj must be a multiple of L (or all of J) and the
          per-filter weight chunk Ti*P*Q a multiple of K (or all of I);
          outputs always finish accumulating on chip (no partial-sum
          spill to DRAM).

Buffer fit tests count elements at the configured element width (the
same convention the fit examples use for accumulated outputs).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil

from .analysis import input_count, mac_count, output_count, weight_count
from .hardware import HardwareConfig
from .layers import LayerDescriptor, NetworkDescriptor


class PlanError(ValueError):
    pass


@dataclass(frozen=True)
class DramTraffic:
    in_act: int
    out_act: int
    weights: int

    @property
    def total(self) -> int:
        return self.in_act + self.out_act + self.weights


@dataclass(frozen=True)
class OnchipAccesses:
    data_buffer: int
    weight_buffer: int
    spm: int


@dataclass
class TileChoice:
    tj: int   # filters per staged group
    ti: int   # input maps per staged chunk
    tm: int   # output block rows
    tn: int   # output block cols


@dataclass
class DataflowPlan:
    layer: LayerDescriptor
    case_id: int
    order: str                    # "filter_outer" or "spatial_outer"
    tiles: TileChoice
    input_from_dram: bool
    output_to_dram: bool
    weights_resident: bool        # staged group/whole set lives in the buffer
    traffic: DramTraffic = field(default=None)  # type: ignore[assignment]
    onchip: OnchipAccesses = field(default=None)  # type: ignore[assignment]

    def bank_block_entries(self) -> int:
        """SPM entries a bank holds for one output block (per filter)."""
        return self.tiles.tm * self.tiles.tn

    def spm_bank_of(self, j: int, cfg: HardwareConfig) -> int:
        return j % cfg.sa_cols

    # -- schedule ----------------------------------------------------------

    def schedule(self, cfg: HardwareConfig):
        """Yield transfer and compute events in execution order.

        Events: ("dram_in"|"dram_weights"|"dram_out", elems) and
        ("compute", j0, j1, m0, m1, n0, n1, i0, i1).  Summed transfer
        events reproduce `traffic` exactly.
        """
        lyr = self.layer
        t = self.tiles
        L = cfg.sa_cols
        pq = lyr.kernel_rows * lyr.kernel_cols
        n_i = ceil(lyr.in_maps / t.ti)
        jgroups = _chunks(lyr.out_maps, t.tj)
        iblocks = _chunks(lyr.in_maps, t.ti)
        mblocks = _chunks(lyr.out_rows, t.tm)
        nblocks = _chunks(lyr.out_cols, t.tn)
        tih = (t.tm - 1) * lyr.stride + lyr.kernel_rows
        tiw = (t.tn - 1) * lyr.stride + lyr.kernel_cols

        if self.case_id in (1, 2, 3):
            if self.input_from_dram:
                yield ("dram_in", input_count(lyr))
            for j0, j1 in jgroups:
                for idx, (i0, i1) in enumerate(iblocks):
                    yield ("dram_weights", (j1 - j0) * (i1 - i0) * pq)
                    last = idx == n_i - 1
                    for m0, m1 in mblocks:
                        for n0, n1 in nblocks:
                            for s0, s1 in _chunks(j1 - j0, L):
                                yield ("compute", j0 + s0, j0 + s1,
                                       m0, m1, n0, n1, i0, i1)
                            if last and self.case_id == 3:
                                yield ("dram_out",
                                       (j1 - j0) * (m1 - m0) * (n1 - n0))
            if self.case_id in (1, 2) and self.output_to_dram:
                yield ("dram_out", output_count(lyr))
            return

        # case 4
        if self.order == "filter_outer":
            for j0, j1 in jgroups:
                if self.weights_resident:
                    yield ("dram_weights", (j1 - j0) * lyr.in_maps * pq)
                for m0, m1 in mblocks:
                    for n0, n1 in nblocks:
                        for idx, (i0, i1) in enumerate(iblocks):
                            yield ("dram_in", (i1 - i0) * tih * tiw)
                            if not self.weights_resident:
                                yield ("dram_weights", (j1 - j0) * (i1 - i0) * pq)
                            for s0, s1 in _chunks(j1 - j0, L):
                                yield ("compute", j0 + s0, j0 + s1,
                                       m0, m1, n0, n1, i0, i1)
                        yield ("dram_out", (j1 - j0) * (m1 - m0) * (n1 - n0))
        else:  # spatial_outer
            if self.weights_resident:
                yield ("dram_weights", weight_count(lyr))
            for m0, m1 in mblocks:
                for n0, n1 in nblocks:
                    for i0, i1 in iblocks:
                        yield ("dram_in", (i1 - i0) * tih * tiw)
                        for j0, j1 in jgroups:
                            if not self.weights_resident:
                                yield ("dram_weights", (j1 - j0) * (i1 - i0) * pq)
                            for s0, s1 in _chunks(j1 - j0, L):
                                yield ("compute", j0 + s0, j0 + s1,
                                       m0, m1, n0, n1, i0, i1)
                    yield ("dram_out", lyr.out_maps * (m1 - m0) * (n1 - n0))

    def validate(self, cfg: HardwareConfig) -> None:
        """Internal consistency: schedule sums equal the stated traffic."""
        sums = {"dram_in": 0, "dram_weights": 0, "dram_out": 0}
        for ev in self.schedule(cfg):
            if ev[0] in sums:
                sums[ev[0]] += ev[1]
        got = DramTraffic(sums["dram_in"], sums["dram_out"], sums["dram_weights"])
        if got != self.traffic:
            raise PlanError(f"schedule sums {got} != planned traffic {self.traffic}")
        check_feasible(self, cfg)


def _chunks(total: int, step: int) -> list[tuple[int, int]]:
    return [(o, min(o + step, total)) for o in range(0, total, step)]


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


# ---- classification -------------------------------------------------------

def classify(layer: LayerDescriptor, cfg: HardwareConfig) -> int:
    if layer.kind == "pool":
        raise PlanError("pool layers are not planned")
    if_e, of_e = input_count(layer), output_count(layer)
    db, wb = cfg.data_buffer_elems, cfg.weight_buffer_elems
    both_fit = if_e + of_e <= db
    map_fits_spm = layer.out_rows * layer.out_cols <= cfg.spm_entries
    filter_elems = layer.in_maps * layer.kernel_rows * layer.kernel_cols
    if both_fit and map_fits_spm:
        return 1
    if both_fit and cfg.sa_cols * filter_elems <= wb:
        return 2
    if if_e <= db:
        return 3
    return 4


# ---- per-case planning ----------------------------------------------------

def _best_spm_block(layer: LayerDescriptor, cfg: HardwareConfig) -> tuple[int, int]:
    """Largest divisor-aligned (Tm, Tn) output block fitting one SPM bank."""
    best = None
    for tm in _divisors(layer.out_rows):
        for tn in _divisors(layer.out_cols):
            if tm * tn <= cfg.spm_entries:
                key = (tm * tn, tm)
                if best is None or key > best[0]:
                    best = (key, (tm, tn))
    if best is None:
        raise PlanError("even a 1x1 output block exceeds the SPM")
    return best[1]


def _staging_tj(layer: LayerDescriptor, cfg: HardwareConfig) -> tuple[int, bool]:
    """Filter-group size for weight staging; prefers 2L (double buffer)."""
    filt = layer.in_maps * layer.kernel_rows * layer.kernel_cols
    wb, L = cfg.weight_buffer_elems, cfg.sa_cols
    if layer.out_maps >= 2 * L and 2 * L * filt <= wb:
        return 2 * L, True
    if L * filt <= wb:
        return min(L, layer.out_maps), True
    return min(L, layer.out_maps), False


def _staging_ti(layer: LayerDescriptor, cfg: HardwareConfig, tj: int) -> int:
    """Largest aligned input-map chunk whose weight slice fits the buffer."""
    pq = layer.kernel_rows * layer.kernel_cols
    wb, K = cfg.weight_buffer_elems, cfg.sa_rows
    if tj * layer.in_maps * pq <= wb:
        return layer.in_maps
    best = 1
    for ti in range(1, layer.in_maps + 1):
        if tj * ti * pq > wb:
            break
        if (ti * pq) % K == 0 or ti == layer.in_maps:
            best = ti
    return best


def _case3_park(layer: LayerDescriptor, cfg: HardwareConfig,
                tj: int, ti: int, tm: int, tn: int) -> int:
    """On-chip elements a case-3 plan must hold in the data buffer."""
    tj = min(tj, layer.out_maps)
    if ceil(layer.in_maps / ti) > 1:
        held = tj * layer.out_rows * layer.out_cols
    else:
        held = tj * tm * tn      # just the block being drained
    return input_count(layer) + held


def _fit_traffic(layer: LayerDescriptor, case_id: int, input_from_dram: bool,
                 output_to_dram: bool) -> DramTraffic:
    in_a = input_count(layer) if input_from_dram else 0
    if case_id == 3:
        out_a = output_count(layer)
    else:
        out_a = output_count(layer) if output_to_dram else 0
    return DramTraffic(in_a, out_a, weight_count(layer))


def _case4_candidates(layer: LayerDescriptor, cfg: HardwareConfig):
    K, L = cfg.sa_rows, cfg.sa_cols
    pq = layer.kernel_rows * layer.kernel_cols
    tjs = [d for d in _divisors(layer.out_maps) if d % L == 0]
    if not tjs or layer.out_maps not in tjs:
        tjs.append(layer.out_maps)
    tis = [d for d in _divisors(layer.in_maps) if (d * pq) % K == 0]
    if not tis or layer.in_maps not in tis:
        tis.append(layer.in_maps)
    return (tjs, tis, _divisors(layer.out_rows), _divisors(layer.out_cols))


def _case4_traffic(layer: LayerDescriptor, cfg: HardwareConfig, order: str,
                   tj: int, ti: int, tm: int, tn: int):
    """(traffic, weights_resident) for a feasible candidate, else None."""
    s, P, Q = layer.stride, layer.kernel_rows, layer.kernel_cols
    I, J, M, N = layer.in_maps, layer.out_maps, layer.out_rows, layer.out_cols
    db, wb, spm = cfg.data_buffer_elems, cfg.weight_buffer_elems, cfg.spm_entries
    pq = P * Q
    if tm * tn > spm or tj * ti * pq > wb:
        return None
    tih, tiw = (tm - 1) * s + P, (tn - 1) * s + Q
    n_m, n_n, n_j = ceil(M / tm), ceil(N / tn), ceil(J / tj)
    n_sp = n_m * n_n
    halo_sum = (n_m * tih) * (n_n * tiw)
    W, OF = weight_count(layer), output_count(layer)
    if order == "filter_outer":
        if ti * tih * tiw + tj * tm * tn > db:
            return None
        resident = tj * I * pq <= wb
        w = W if resident else n_sp * W
        in_a = n_j * I * halo_sum
    else:
        if ti * tih * tiw + J * tm * tn > db:
            return None
        resident = W <= wb
        w = W if resident else n_sp * W
        in_a = I * halo_sum
    return DramTraffic(in_a, OF, w), resident


def _plan_case4(layer: LayerDescriptor, cfg: HardwareConfig) -> DataflowPlan:
    tjs, tis, tms, tns = _case4_candidates(layer, cfg)
    best = None
    for order in ("filter_outer", "spatial_outer"):
        for tj in tjs:
            for ti in tis:
                for tm in tms:
                    for tn in tns:
                        res = _case4_traffic(layer, cfg, order, tj, ti, tm, tn)
                        if res is None:
                            continue
                        traffic, resident = res
                        key = (traffic.total, order != "filter_outer",
                               -tj, -ti, -tm, -tn)
                        if best is None or key < best[0]:
                            best = (key, order, TileChoice(tj, ti, tm, tn),
                                    traffic, resident)
    if best is None:
        raise PlanError(
            f"{layer.name or layer.kind}: no feasible tiling "
            f"(buffers too small for any divisor-aligned block)")
    _, order, tiles, traffic, resident = best
    return DataflowPlan(layer, 4, order, tiles, True, True, resident, traffic)


def plan(layer: LayerDescriptor, cfg: HardwareConfig,
         input_from_dram: bool = True,
         output_to_dram: bool = True) -> DataflowPlan:
    """Plan one layer.  The flags say whether its activations cross DRAM."""
    case_id = classify(layer, cfg)
    if case_id == 4:
        p = _plan_case4(layer, cfg)
    else:
        if case_id == 1:
            tm, tn = layer.out_rows, layer.out_cols
        else:
            tm, tn = _best_spm_block(layer, cfg)
        tj, _ = _staging_tj(layer, cfg)
        ti = _staging_ti(layer, cfg, tj)
        # case 3 keeps inputs resident and streams blocks out as they finish;
        # only multi-chunk weight staging additionally parks a whole filter
        # group's partials on chip
        if case_id == 3:
            if _case3_park(layer, cfg, tj, ti, tm, tn) > cfg.data_buffer_elems:
                p = _plan_case4(layer, cfg)
                p.input_from_dram = input_from_dram
                _finish(p, cfg)
                return p
        traffic = _fit_traffic(layer, case_id, input_from_dram, output_to_dram)
        p = DataflowPlan(layer, case_id, "filter_outer",
                         TileChoice(tj, ti, tm, tn), input_from_dram,
                         output_to_dram, ti == layer.in_maps, traffic)
    if not input_from_dram and p.case_id in (1, 2, 3):
        p.traffic = DramTraffic(0, p.traffic.out_act, p.traffic.weights)
    _finish(p, cfg)
    return p


def _finish(p: DataflowPlan, cfg: HardwareConfig) -> None:
    p.onchip = _onchip_accesses(p, cfg)
    p.validate(cfg)


def _onchip_accesses(p: DataflowPlan, cfg: HardwareConfig) -> OnchipAccesses:
    """Buffer/SPM access counts implied by the schedule.

    Data buffer: DRAM landings, the im2col stream into the array (one
    read feeds a whole row), drained outputs and partial-sum parking.
    Weight buffer: DRAM landings plus per-tile array loads.  SPM: two
    accesses per arriving partial plus drains and re-staging.
    """
    K = cfg.sa_rows
    lyr = p.layer
    stream = loads = adds = 0
    pq = lyr.kernel_rows * lyr.kernel_cols
    for ev in p.schedule(cfg):
        if ev[0] != "compute":
            continue
        _, j0, j1, m0, m1, n0, n1, i0, i1 = ev
        t = (m1 - m0) * (n1 - n0)
        rows = (i1 - i0) * pq
        cols = j1 - j0
        stream += t * rows
        loads += rows * cols
        adds += ceil(rows / K) * t * cols
    of = output_count(lyr)
    n_i = ceil(lyr.in_maps / p.tiles.ti)
    parked = of * (n_i - 1)
    db = p.traffic.in_act + stream + of + 2 * parked
    wb = p.traffic.weights + loads
    spm = 2 * adds + of + parked
    return OnchipAccesses(db, wb, spm)


def check_feasible(p: DataflowPlan, cfg: HardwareConfig) -> None:
    """Capacity and alignment checks for a plan."""
    lyr = p.layer
    t = p.tiles
    K, L = cfg.sa_rows, cfg.sa_cols
    pq = lyr.kernel_rows * lyr.kernel_cols
    if t.tm * t.tn > cfg.spm_entries:
        raise PlanError("output block exceeds SPM")
    if not (t.tj % L == 0 or t.tj == lyr.out_maps or t.tj == min(L, lyr.out_maps)):
        raise PlanError("filter group not aligned to array columns")
    if not ((t.ti * pq) % K == 0 or t.ti == lyr.in_maps):
        raise PlanError("weight chunk not aligned to array rows")
    if t.tj * t.ti * pq > cfg.weight_buffer_elems:
        raise PlanError("staged weight chunk exceeds the weight buffer")
    if p.case_id == 4:
        tih = (t.tm - 1) * lyr.stride + lyr.kernel_rows
        tiw = (t.tn - 1) * lyr.stride + lyr.kernel_cols
        held = lyr.out_maps if p.order == "spatial_outer" else t.tj
        if t.ti * tih * tiw + held * t.tm * t.tn > cfg.data_buffer_elems:
            raise PlanError("input tile plus held outputs exceed the data buffer")
    elif p.case_id in (1, 2):
        if input_count(lyr) + output_count(lyr) > cfg.data_buffer_elems:
            raise PlanError("case 1/2 requires IF+OF on chip")
    elif p.case_id == 3:
        if _case3_park(lyr, cfg, t.tj, t.ti, t.tm, t.tn) > cfg.data_buffer_elems:
            raise PlanError("case 3 residency exceeds the data buffer")


def naive_traffic(layer: LayerDescriptor) -> int:
    """DRAM elements with no on-chip reuse: both operands fetched per MAC,
    each output written once."""
    return 2 * mac_count(layer) + output_count(layer)


def plan_network(net: NetworkDescriptor, cfg: HardwareConfig) -> list[DataflowPlan]:
    """Plan every MAC layer, chaining activations on chip when both sides fit.

    A layer's output stays on chip when it is case 1/2 and the next MAC
    layer's inputs fit on chip too (case 1-3); the first input and last
    output always cross DRAM.
    """
    macs = [l for l in net.layers if l.kind != "pool"]
    cases = [classify(l, cfg) for l in macs]
    plans = []
    from_dram = True
    for idx, lyr in enumerate(macs):
        keep = (cases[idx] in (1, 2) and idx + 1 < len(macs)
                and cases[idx + 1] in (1, 2, 3))
        plans.append(plan(lyr, cfg, input_from_dram=from_dram,
                          output_to_dram=not keep))
        from_dram = not keep
    return plans
