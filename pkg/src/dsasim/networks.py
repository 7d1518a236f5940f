"""Bundled network descriptions (loaded from package data files)."""

from __future__ import annotations

from importlib import resources
from math import ceil

from .layers import LayerDescriptor, NetworkDescriptor, parse_network

BUILTIN_NETWORKS = ("alexnet", "vgg16")


def builtin_network(name: str) -> NetworkDescriptor:
    if name not in BUILTIN_NETWORKS:
        raise KeyError(f"no builtin network {name!r} (have {BUILTIN_NETWORKS})")
    text = resources.files("dsasim.data").joinpath(f"{name}.net").read_text()
    return parse_network(text, name=name)


def resolve_network(name_or_path: str) -> NetworkDescriptor:
    """Accept a builtin name or a path to a network file."""
    if name_or_path in BUILTIN_NETWORKS:
        return builtin_network(name_or_path)
    from .layers import load_network
    return load_network(name_or_path)


def scale_network(net: NetworkDescriptor, factor: int) -> NetworkDescriptor:
    """Shrink a network's spatial grid and fc widths by an integer factor.

    Used for reduced-size functional runs.  Map counts of conv layers are
    kept; output grids, pooled grids and fc fan-in/out shrink by `factor`
    (ceil, minimum 1) with the chain re-stitched so volumes stay exact.
    """
    if factor < 1:
        raise ValueError("factor must be >= 1")
    scaled: list[LayerDescriptor] = []
    prev_vol: tuple[int, int, int] | None = None
    for lyr in net.layers:
        if lyr.kind == "conv":
            rows = max(1, ceil(lyr.out_rows / factor))
            cols = max(1, ceil(lyr.out_cols / factor))
            pw = ps = 0
            if lyr.pool_window:
                pw, ps = lyr.pool_window, lyr.pool_stride
                # shrink until pooling tiles the reduced grid exactly
                while rows < pw or (rows - pw) % ps or cols < pw or (cols - pw) % ps:
                    rows += 1
                    cols += 1
            new = LayerDescriptor(
                kind="conv", in_maps=lyr.in_maps, out_maps=lyr.out_maps,
                out_rows=rows, out_cols=cols, kernel_rows=lyr.kernel_rows,
                kernel_cols=lyr.kernel_cols, stride=lyr.stride,
                activation=lyr.activation, pool_window=pw, pool_stride=ps,
                name=lyr.name)
        else:
            fan_in = (prev_vol[0] * prev_vol[1] * prev_vol[2]
                      if prev_vol is not None else max(1, lyr.in_maps // factor))
            fan_out = max(1, lyr.out_maps // factor)
            new = LayerDescriptor(kind=lyr.kind, in_maps=fan_in,
                                  out_maps=fan_out, activation=lyr.activation,
                                  name=lyr.name)
        scaled.append(new)
        prev_vol = new.out_volume()
    return NetworkDescriptor(name=f"{net.name}-1of{factor}", layers=scaled)
