"""Shared helpers: independent reference implementations and generators.

The reference code here is deliberately written without the package's
vectorized machinery (plain Python loops over lists/ints) so that tests
compare two genuinely different routes to the same answer.
"""

from __future__ import annotations

import numpy as np

from dsasim import HardwareConfig, LayerDescriptor


def small_cfg(rows=8, cols=8, spm=256, wb=36864, db=262144) -> HardwareConfig:
    return HardwareConfig(sa_rows=rows, sa_cols=cols, spm_entries=spm,
                          weight_buffer_bytes=wb, data_buffer_bytes=db)


def random_conv_layer(rng, max_maps=6, max_out=5, max_kern=3,
                      max_stride=2) -> LayerDescriptor:
    p = int(rng.integers(1, max_kern + 1))
    q = int(rng.integers(1, max_kern + 1))
    return LayerDescriptor(
        kind="conv",
        in_maps=int(rng.integers(1, max_maps + 1)),
        out_maps=int(rng.integers(1, max_maps + 1)),
        out_rows=int(rng.integers(1, max_out + 1)),
        out_cols=int(rng.integers(1, max_out + 1)),
        kernel_rows=p, kernel_cols=q,
        stride=int(rng.integers(1, max_stride + 1)),
        activation=str(rng.choice(["none", "relu", "lrelu"])),
    )


def random_fc_layer(rng, max_dim=24) -> LayerDescriptor:
    return LayerDescriptor(
        kind="fc",
        in_maps=int(rng.integers(1, max_dim + 1)),
        out_maps=int(rng.integers(1, max_dim + 1)),
        activation=str(rng.choice(["none", "relu"])),
    )


# ---- counting reference (pure loops) ---------------------------------------

def loop_counts(layer: LayerDescriptor) -> dict:
    """Count MACs and operand uses by literally running the loop nest."""
    macs = 0
    weight_uses: dict = {}
    input_uses: dict = {}
    s = layer.stride
    for j in range(layer.out_maps):
        for m in range(layer.out_rows):
            for n in range(layer.out_cols):
                for i in range(layer.in_maps):
                    for p in range(layer.kernel_rows):
                        for q in range(layer.kernel_cols):
                            macs += 1
                            weight_uses[(j, i, p, q)] = \
                                weight_uses.get((j, i, p, q), 0) + 1
                            pix = (i, m * s + p, n * s + q)
                            input_uses[pix] = input_uses.get(pix, 0) + 1
    return {"macs": macs, "weights": len(weight_uses),
            "weight_uses": weight_uses, "input_uses": input_uses}


# ---- scalar layer reference (no numpy math) --------------------------------

def scalar_conv(x, w, layer: LayerDescriptor):
    """Direct convolution over nested Python lists; returns int lists.

    `x` is (C, h, w) possibly smaller than the declared extent; zero
    padding is applied with the extra rows/columns split evenly,
    remainder at the bottom/right.
    """
    c = len(x)
    h, wid = len(x[0]), len(x[0][0])
    ih, iw = layer.in_rows, layer.in_cols
    top, left = (ih - h) // 2, (iw - wid) // 2
    padded = [[[0] * iw for _ in range(ih)] for _ in range(c)]
    for ci in range(c):
        for r in range(h):
            for cc in range(wid):
                padded[ci][top + r][left + cc] = int(x[ci][r][cc])
    s = layer.stride
    out = [[[0] * layer.out_cols for _ in range(layer.out_rows)]
           for _ in range(layer.out_maps)]
    for j in range(layer.out_maps):
        for m in range(layer.out_rows):
            for n in range(layer.out_cols):
                acc = 0
                for i in range(layer.in_maps):
                    for p in range(layer.kernel_rows):
                        for q in range(layer.kernel_cols):
                            acc += padded[i][m * s + p][n * s + q] \
                                * int(w[j][i][p][q])
                out[j][m][n] = acc
    return out


def scalar_fc(x_flat, w, fan_out):
    fan_in = len(x_flat)
    return [sum(int(x_flat[i]) * int(w[j][i]) for i in range(fan_in))
            for j in range(fan_out)]


def scalar_matmul(vectors, tile):
    """out[t][l] = sum_k vectors[t][k] * tile[k][l], plain loops."""
    t_n = len(vectors)
    k_n = len(tile)
    l_n = len(tile[0]) if k_n else 0
    out = [[0] * l_n for _ in range(t_n)]
    for t in range(t_n):
        for l in range(l_n):
            acc = 0
            for k in range(k_n):
                acc += int(vectors[t][k]) * int(tile[k][l])
            out[t][l] = acc
    return out


def as_lists(arr) -> list:
    return np.asarray(arr).tolist()


# ---- exhaustive tiling reference --------------------------------------------

def _divs(n):
    return [d for d in range(1, n + 1) if n % d == 0]


def synthetic_search_layers(n=24):
    """Deterministic stream of (layer, config) pairs that overflow a
    deliberately small configuration, forcing the tiled-search case."""
    from dsasim import classify
    rng = np.random.default_rng(2024)
    cfgs = [small_cfg(rows=2, cols=2, spm=16, wb=96, db=160),
            small_cfg(rows=4, cols=4, spm=32, wb=640, db=700),
            small_cfg(rows=2, cols=4, spm=24, wb=256, db=400)]
    out = []
    while len(out) < n:
        lyr = LayerDescriptor(
            "conv",
            in_maps=int(rng.integers(1, 7)),
            out_maps=int(rng.integers(2, 17)),
            out_rows=int(rng.integers(4, 13)),
            out_cols=int(rng.integers(4, 13)),
            kernel_rows=int(rng.integers(1, 4)),
            kernel_cols=int(rng.integers(1, 4)),
            stride=int(rng.integers(1, 3)))
        cfg = cfgs[len(out) % len(cfgs)]
        if classify(lyr, cfg) == 4:
            out.append((lyr, cfg))
    return out


def enum_min_traffic(layer, cfg):
    """Exhaustive DRAM-traffic minimum over the documented candidate space,
    written independently of the planner (exact divisions, no shared
    helpers); None when no candidate fits the buffers."""
    I, J = layer.in_maps, layer.out_maps
    M, N = layer.out_rows, layer.out_cols
    P, Q, S = layer.kernel_rows, layer.kernel_cols, layer.stride
    K, L = cfg.sa_rows, cfg.sa_cols
    db, wb, spm = cfg.data_buffer_elems, cfg.weight_buffer_elems, cfg.spm_entries
    tjs = sorted({d for d in _divs(J) if d % L == 0} | {J})
    tis = sorted({d for d in _divs(I) if (d * P * Q) % K == 0} | {I})
    W, OF = J * I * P * Q, J * M * N
    best = None
    for tj in tjs:
        for ti in tis:
            for tm in _divs(M):
                for tn in _divs(N):
                    if tm * tn > spm or tj * ti * P * Q > wb:
                        continue
                    tih, tiw = (tm - 1) * S + P, (tn - 1) * S + Q
                    nsp = (M // tm) * (N // tn)
                    halo = (M // tm) * tih * (N // tn) * tiw
                    if ti * tih * tiw + tj * tm * tn <= db:
                        w = W if tj * I * P * Q <= wb else nsp * W
                        tot = (J // tj) * I * halo + OF + w
                        best = tot if best is None else min(best, tot)
                    if ti * tih * tiw + J * tm * tn <= db:
                        w = W if W <= wb else nsp * W
                        tot = I * halo + OF + w
                        best = tot if best is None else min(best, tot)
    return best
