"""Command-line front end.

    dsasim --mode analyze  --network alexnet
    dsasim --mode plan     --network vgg16 --out plans.csv
    dsasim --mode simulate --network alexnet --seed 3 --check
    dsasim --mode time     --network alexnet
    dsasim --mode sweep    --network alexnet --array-sizes 1,2,4,8

Reports are plain text (or CSV when --out ends in .csv) and are
byte-identical for identical arguments and seed.
"""

from __future__ import annotations

import argparse
import sys

from .analysis import analyze_rows, network_stats
from .funcsim import OracleMismatchError, simulate_network
from .hardware import ConfigError, HardwareConfig, load_hardware
from .layers import DescriptorError
from .metrics import EnergyCostTable, compare, sensitivity, traffic_rows, write_csv
from .networks import resolve_network
from .planner import PlanError, naive_traffic, plan_network
from .timing import speedup_report, time_network

MODES = ("analyze", "plan", "simulate", "time", "sweep")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dsasim",
        description="dual systolic-array accelerator: analysis, dataflow "
                    "planning, functional simulation, and timing/energy models")
    p.add_argument("--mode", choices=MODES, required=True)
    p.add_argument("--network", default="alexnet",
                   help="builtin name (alexnet, vgg16) or a .net file path")
    p.add_argument("--hw", default=None, help="hardware config file "
                   "(defaults to the built-in 8x8/256KB/36KB configuration)")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for random weights/activations (simulate)")
    p.add_argument("--out", default=None,
                   help="write the report here instead of stdout "
                        "(.csv gets machine-readable rows)")
    p.add_argument("--check", action="store_true",
                   help="simulate: cross-check every layer against the "
                        "reference loop nests (hard failure on mismatch)")
    p.add_argument("--trace", action="store_true",
                   help="simulate: use the cycle-stepped engine and dump the "
                        "first weight tile's PE trace (small networks only)")
    p.add_argument("--array-sizes", default="1,2,4,8",
                   help="sweep: comma-separated square array sizes")
    p.add_argument("--cost-table", default=None,
                   help="energy cost table file (dram/buffer/spm/mac lines)")
    return p


def _fmt_table(rows: list[dict]) -> list[str]:
    cols = list(rows[0])
    widths = {c: max(len(c), *(len(_cell(r[c])) for r in rows)) for c in cols}
    lines = ["  ".join(c.rjust(widths[c]) for c in cols)]
    for r in rows:
        lines.append("  ".join(_cell(r[c]).rjust(widths[c]) for c in cols))
    return lines


def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)


def _emit(args, header: list[str], rows: list[dict], footer: list[str]) -> None:
    if args.out and args.out.endswith(".csv"):
        write_csv(args.out, rows)
        return
    text = "\n".join(["# " + h for h in header] + _fmt_table(rows)
                     + footer) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _giga(n: int) -> str:
    return f"{n / 1e9:.2f} G" if n >= 1e9 else f"{n / 1e6:.2f} M"


def _run_analyze(args, net, cfg) -> None:
    rows = analyze_rows(net)
    st = network_stats(net)
    footer = [
        f"conv:  MACs {_giga(st.conv_macs)}  weights {_giga(st.conv_weights)}",
        f"fc:    MACs {_giga(st.fc_macs)}  weights {_giga(st.fc_weights)}",
        f"total: MACs {_giga(st.total_macs)}  weights {_giga(st.total_weights)}",
    ]
    _emit(args, [f"analyze network={net.name}"], rows, footer)


def _run_plan(args, net, cfg) -> None:
    rows = traffic_rows(net, cfg)
    total = sum(r["dram_total"] for r in rows)
    naive = sum(r["naive"] for r in rows)
    table = (EnergyCostTable.from_file(args.cost_table)
             if args.cost_table else EnergyCostTable())
    cmp_ = compare(net, cfg, table)
    worst = min(r["savings"] for r in sensitivity(net, cfg, table))
    footer = [
        f"planned DRAM elements: {total}  naive: {naive}  "
        f"fraction: {total / naive:.4f}",
        f"relative energy vs naive baseline: {cmp_.ratio:.4f} "
        f"(savings {cmp_.savings:.1%}; worst case over +/-2x "
        f"coefficient sweep {worst:.1%})",
    ]
    _emit(args, [f"plan network={net.name}"], rows, footer)


def _run_simulate(args, net, cfg) -> None:
    engine = "cycle" if args.trace else "fast"
    res = simulate_network(net, cfg, seed=args.seed, engine=engine,
                           check=args.check)
    rows = [{"layer": r.name, "kind": r.kind, "shift": r.shift,
             "dram_in": r.transfers.dram_in,
             "dram_weights": r.transfers.dram_weights,
             "dram_out": r.transfers.dram_out}
            for r in res.layers]
    out = res.output
    footer = [f"output shape {out.shape}  sum {int(out.wide().sum())}",
              f"transfers total {res.log.total} (log matches plans)"]
    if args.check:
        footer.append("oracle match")
    if args.trace:
        footer.append("")
        footer.extend(_first_tile_trace(net, cfg, args.seed))
    _emit(args, [f"simulate network={net.name} seed={args.seed} "
                 f"engine={engine}"], rows, footer)


def _first_tile_trace(net, cfg, seed) -> list[str]:
    from .funcsim import make_input, make_weights
    from .lowering import im2col, lower_weights
    from .systolic import run_sa_conv

    lyr = next(l for l in net.layers if l.kind != "pool")
    x = make_input(net, seed)
    w = make_weights(net, seed)[0]
    vecs = im2col(x.wide().reshape(x.shape), lyr)[:cfg.sa_rows]
    wmat = lower_weights(w.wide(), lyr)
    _, tr = run_sa_conv(wmat[:cfg.sa_rows, :cfg.sa_cols],
                        vecs[:, :cfg.sa_rows], cfg.sa_rows, cfg.sa_cols,
                        trace=True)
    return [f"first tile of {lyr.name or lyr.kind}:"] + list(tr.lines())


def _run_time(args, net, cfg) -> None:
    timing = time_network(net, cfg, "dual")
    rows = [{"layer": t.name, "kind": t.kind, "engine": t.engine,
             "compute_cycles": t.compute_cycles, "dram_cycles": t.dram_cycles,
             "total_cycles": t.total_cycles, "bound": t.bound}
            for t in timing.layers]
    footer = [f"total cycles {timing.total_cycles}  "
              f"time {timing.seconds * 1e3:.3f} ms  "
              f"throughput {timing.gops:.2f} GOPS "
              f"at {cfg.clock_hz / 1e6:.0f} MHz"]
    _emit(args, [f"time network={net.name} mode=dual"], rows, footer)


def _run_sweep(args, net, cfg) -> None:
    sizes = tuple(int(s) for s in args.array_sizes.split(","))
    if not sizes or any(s <= 0 for s in sizes):
        raise ValueError(f"bad --array-sizes {args.array_sizes!r}")
    rep = speedup_report(net, cfg, sizes)
    base = sizes[0]
    rows = []
    for r in rep.rows():
        s = r["size"]
        kinds = rep.conventional[s].cycles_by_kind()
        r["conv_speedup"] = rep.kind_speedup("conv", s, base) \
            if "conv" in kinds else 1.0
        r["fc_speedup"] = rep.kind_speedup("fc", s, base) \
            if "fc" in kinds else 1.0
        rows.append(r)
    footer = [f"dual-vs-single speedup at {sizes[-1]}x{sizes[-1]}: "
              f"{rep.ratio(sizes[-1]):.3f}"]
    _emit(args, [f"sweep network={net.name} sizes={args.array_sizes}"],
          rows, footer)


_RUNNERS = {"analyze": _run_analyze, "plan": _run_plan,
            "simulate": _run_simulate, "time": _run_time, "sweep": _run_sweep}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        net = resolve_network(args.network)
        cfg = load_hardware(args.hw) if args.hw else HardwareConfig()
        _RUNNERS[args.mode](args, net, cfg)
    except (DescriptorError, ConfigError, PlanError, OracleMismatchError,
            OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
