"""Cycle-level models of the two systolic arrays.

Both arrays are K x L grids of multiply-accumulate PEs.  Activations
enter at the left edge, one input vector per cycle, skewed so element k
of vector t reaches row k of column 0 at cycle t+k+1.  Partial sums flow
downward; the column-l result of vector t leaves the bottom row at cycle
t+K+l and lands in the accumulator one cycle later, so the first result
appears after K+1 cycles.

The convolution array is weight-stationary: a tile of weights (one
filter per column, one weight position per row) is committed into the
PEs before the vectors stream.  Next-tile weights shift into a shadow
register during compute, so the preload never stalls the pipe.

The fc array instead has a dedicated weight feed per PE.  Each input
vector t carries its own K x L weight tile; PE (k, l) receives that
tile's (k, l) entry delayed by k+l cycles so it meets the matching
activation wavefront.  With a weight stream that repeats one tile, the
fc array degenerates to the conv array.

Both arrays also have an exact closed-form path (`fast=True`, a plain
integer mat-mul); it is property-tested equal to the stepped grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .quant import ACC_DTYPE


class TileShapeError(ValueError):
    """Weights or vectors do not fit the array."""


class StreamUnderrunError(RuntimeError):
    """A live activation reached a PE with no weight scheduled."""


@dataclass(frozen=True)
class PEState:
    """Snapshot of one PE, for inspection and tests."""
    row: int
    col: int
    weight: int
    shadow_weight: int
    activation: int
    partial: int


@dataclass
class TraceRecord:
    cycle: int
    row: int
    col: int
    phase: str          # "mac" or "out"
    activation: int
    weight: int
    partial: int


@dataclass
class ArrayTrace:
    array: str
    rows: int
    cols: int
    records: list[TraceRecord] = field(default_factory=list)
    # (arrival cycle, vector index, column, value)
    outputs: list[tuple[int, int, int, int]] = field(default_factory=list)

    @property
    def cycles(self) -> int:
        return max((r.cycle for r in self.records), default=0)

    def lines(self):
        yield (f"# array={self.array} rows={self.rows} cols={self.cols} "
               f"cycles={self.cycles}")
        for r in self.records:
            yield (f"cycle={r.cycle} pe=({r.row},{r.col}) phase={r.phase} "
                   f"a={r.activation} w={r.weight} psum={r.partial}")
        for cyc, t, col, val in self.outputs:
            yield f"cycle={cyc} out vector={t} col={col} value={val}"

    def dump(self) -> str:
        return "\n".join(self.lines()) + "\n"


def _pad_tile(tile: np.ndarray, rows: int, cols: int) -> np.ndarray:
    r, c = tile.shape
    if r > rows or c > cols:
        raise TileShapeError(f"{r}x{c} tile on a {rows}x{cols} array")
    out = np.zeros((rows, cols), dtype=ACC_DTYPE)
    out[:r, :c] = tile
    return out


def _pad_vectors(vectors: np.ndarray, rows: int) -> np.ndarray:
    t, r = vectors.shape
    if r > rows:
        raise TileShapeError(f"vector length {r} on {rows} array rows")
    out = np.zeros((t, rows), dtype=ACC_DTYPE)
    out[:, :r] = vectors
    return out


class SystolicArray:
    """K x L grid shared by both array flavors."""

    def __init__(self, rows: int, cols: int, name: str = "sa"):
        if rows <= 0 or cols <= 0:
            raise TileShapeError("array dims must be positive")
        self.rows = rows
        self.cols = cols
        self.name = name
        self.weights = np.zeros((rows, cols), dtype=ACC_DTYPE)
        self.shadow = np.zeros((rows, cols), dtype=ACC_DTYPE)
        self._act = np.zeros((rows, cols), dtype=ACC_DTYPE)
        self._psum = np.zeros((rows, cols), dtype=ACC_DTYPE)

    def pe_state(self, row: int, col: int) -> PEState:
        return PEState(row, col, int(self.weights[row, col]),
                       int(self.shadow[row, col]), int(self._act[row, col]),
                       int(self._psum[row, col]))

    # -- weight handling ---------------------------------------------------

    def stage(self, tile) -> None:
        """Shift a weight tile into the shadow registers (hidden preload)."""
        self.shadow = _pad_tile(np.asarray(tile, dtype=ACC_DTYPE),
                                self.rows, self.cols)

    def commit(self) -> None:
        self.weights = self.shadow.copy()

    def preload(self, tile) -> None:
        self.stage(tile)
        self.commit()

    # -- stepped grid ------------------------------------------------------

    def _run_grid(self, vectors: np.ndarray, weight_for, n_tiles: int,
                  trace: ArrayTrace | None) -> np.ndarray:
        """Clock the PE grid; weight_for(t) -> K x L tile for vector t."""
        K, L = self.rows, self.cols
        T = len(vectors)
        out = np.zeros((T, L), dtype=ACC_DTYPE)
        act = np.zeros((K, L), dtype=ACC_DTYPE)
        vec = np.full((K, L), -1, dtype=np.int64)   # vector id per slot
        psum = np.zeros((K, L), dtype=ACC_DTYPE)
        kk = np.arange(K)
        span = T + K + L - 1
        for c in range(1, span + 1):
            # activations advance one column; new column 0 values come in
            act[:, 1:] = act[:, :-1]
            vec[:, 1:] = vec[:, :-1]
            t0 = c - 1 - kk
            fresh = (t0 >= 0) & (t0 < T)
            act[:, 0] = np.where(fresh, vectors[np.clip(t0, 0, T - 1), kk], 0)
            vec[:, 0] = np.where(fresh, t0, -1)
            live = vec >= 0
            if live.any() and vec[live].max() >= n_tiles:
                raise StreamUnderrunError(
                    f"cycle {c}: vector {int(vec[live].max())} has no weights")
            w_now = weight_for(vec)
            # partials drop one row; row 0 starts from zero
            psum[1:, :] = psum[:-1, :]
            psum[0, :] = 0
            psum = psum + np.where(live, w_now * act, 0)
            psum[~live] = 0
            if trace is not None:
                for k, l in zip(*np.nonzero(live)):
                    trace.records.append(TraceRecord(
                        c, int(k), int(l), "mac", int(act[k, l]),
                        int(w_now[k, l]), int(psum[k, l])))
            done = vec[K - 1, :] >= 0
            for l in np.nonzero(done)[0]:
                t = int(vec[K - 1, l])
                out[t, l] = psum[K - 1, l]
                if trace is not None:
                    trace.outputs.append((c + 1, t, int(l), int(psum[K - 1, l])))
        self._act, self._psum = act, psum
        return out


def run_sa_conv(weights_tile, input_vectors, rows: int, cols: int,
                fast: bool = False, trace: bool = False):
    """Run one weight-stationary tile.

    weights_tile: (r<=rows, c<=cols), column c holds filter c's weights.
    input_vectors: (T, r) activation vectors (im2col order for conv).
    Returns (outputs, trace): outputs (T, cols) wide ints where
    outputs[t, c] = sum_k w[k, c] * v[t, k].
    """
    w = np.atleast_2d(np.asarray(weights_tile, dtype=ACC_DTYPE))
    v = np.atleast_2d(np.asarray(input_vectors, dtype=ACC_DTYPE))
    if v.shape[1] != w.shape[0]:
        raise TileShapeError(
            f"vector length {v.shape[1]} vs tile rows {w.shape[0]}")
    wp = _pad_tile(w, rows, cols)
    vp = _pad_vectors(v, rows)
    if fast:
        return vp @ wp, None
    if len(vp) == 0:
        tr = ArrayTrace("sa-conv", rows, cols) if trace else None
        return np.zeros((0, cols), dtype=ACC_DTYPE), tr
    arr = SystolicArray(rows, cols, "sa-conv")
    arr.preload(wp)
    tr = ArrayTrace("sa-conv", rows, cols) if trace else None
    out = arr._run_grid(vp, lambda vecidx: arr.weights, n_tiles=len(vp) + 1,
                        trace=tr)
    return out, tr


def run_sa_fc(input_vectors, weight_stream, rows: int, cols: int,
              fast: bool = False, trace: bool = False):
    """Run the per-PE-fed array: vector t multiplies weight tile t.

    input_vectors: (T, r<=rows); weight_stream: (S, r, c<=cols) with
    S >= T (fewer tiles than vectors raises StreamUnderrunError).
    Returns (outputs, trace): outputs[t, c] = sum_k ws[t, k, c] * v[t, k].
    """
    v = np.atleast_2d(np.asarray(input_vectors, dtype=ACC_DTYPE))
    ws = np.asarray(weight_stream, dtype=ACC_DTYPE)
    if ws.ndim != 3:
        raise TileShapeError("weight stream must be (tiles, rows, cols)")
    if len(ws) < len(v):
        raise StreamUnderrunError(
            f"{len(v)} vectors but only {len(ws)} weight tiles")
    if v.shape[1] != ws.shape[1]:
        raise TileShapeError(
            f"vector length {v.shape[1]} vs tile rows {ws.shape[1]}")
    wsp = np.stack([_pad_tile(t, rows, cols) for t in ws]) if len(ws) else \
        np.zeros((0, rows, cols), dtype=ACC_DTYPE)
    vp = _pad_vectors(v, rows)
    if len(vp) == 0:
        tr = ArrayTrace("sa-fc", rows, cols) if trace else None
        return np.zeros((0, cols), dtype=ACC_DTYPE), tr
    if fast:
        return np.einsum("tk,tkl->tl", vp, wsp[:len(vp)]), None
    arr = SystolicArray(rows, cols, "sa-fc")
    tr = ArrayTrace("sa-fc", rows, cols) if trace else None
    kk = np.arange(rows)[:, None]
    ll = np.arange(cols)[None, :]

    def weight_for(vecidx):
        safe = np.clip(vecidx, 0, len(wsp) - 1)
        return wsp[safe, kk, ll]

    out = arr._run_grid(vp, weight_for, n_tiles=len(wsp), trace=tr)
    return out, tr
