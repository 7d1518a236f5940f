"""Layer and network descriptors.

A convolutional layer is described by its loop bounds: I input maps,
J output maps (filters), an M x N output grid, P x Q kernels and a
stride S.  The (padded) input extent is derived, never stored:
in_rows = (M-1)*S + P, in_cols = (N-1)*S + Q.  Fully-connected layers
are the M = N = P = Q = S = 1 special case.  Max-pooling is fused onto
the producing layer (pool_window / pool_stride); a standalone "pool"
kind is also accepted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

LAYER_KINDS = ("conv", "fc", "pool")
ACTIVATIONS = ("none", "relu", "lrelu")


class DescriptorError(ValueError):
    """Raised for ill-formed layer or network descriptors."""


@dataclass(frozen=True)
class LayerDescriptor:
    kind: str
    in_maps: int
    out_maps: int
    out_rows: int = 1
    out_cols: int = 1
    kernel_rows: int = 1
    kernel_cols: int = 1
    stride: int = 1
    activation: str = "none"
    pool_window: int = 0
    pool_stride: int = 0
    name: str = ""

    def __post_init__(self):
        if self.kind not in LAYER_KINDS:
            raise DescriptorError(f"unknown layer kind {self.kind!r}")
        if self.activation not in ACTIVATIONS:
            raise DescriptorError(f"unknown activation {self.activation!r}")
        dims = (self.in_maps, self.out_maps, self.out_rows, self.out_cols,
                self.kernel_rows, self.kernel_cols, self.stride)
        if any(d <= 0 for d in dims):
            raise DescriptorError(f"non-positive dimension in {self.name or self.kind}")
        if self.kind == "fc":
            if (self.out_rows, self.out_cols, self.kernel_rows,
                    self.kernel_cols, self.stride) != (1, 1, 1, 1, 1):
                raise DescriptorError("fc layers require M=N=P=Q=stride=1")
        if self.kind == "pool":
            if self.in_maps != self.out_maps:
                raise DescriptorError("pool layers keep the map count")
            if not self.pool_window:
                raise DescriptorError("pool layers need pool_window")
        if (self.pool_window > 0) != (self.pool_stride > 0):
            raise DescriptorError("pool_window and pool_stride go together")
        if self.pool_window:
            self.pooled_shape()  # validates exact tiling

    # ---- derived extents ------------------------------------------------

    @property
    def in_rows(self) -> int:
        return (self.out_rows - 1) * self.stride + self.kernel_rows

    @property
    def in_cols(self) -> int:
        return (self.out_cols - 1) * self.stride + self.kernel_cols

    def in_volume(self) -> tuple[int, int, int]:
        return (self.in_maps, self.in_rows, self.in_cols)

    def pooled_shape(self) -> tuple[int, int]:
        """Output grid after the fused pool stage (exact tiling required)."""
        if not self.pool_window:
            return (self.out_rows, self.out_cols)
        w, s = self.pool_window, self.pool_stride
        for extent in (self.out_rows, self.out_cols):
            if extent < w or (extent - w) % s != 0:
                raise DescriptorError(
                    f"pool {w}x{w}/{s} does not tile a {extent}-wide map exactly")
        return ((self.out_rows - w) // s + 1, (self.out_cols - w) // s + 1)

    def out_volume(self) -> tuple[int, int, int]:
        pr, pc = self.pooled_shape()
        return (self.out_maps, pr, pc)


@dataclass
class NetworkDescriptor:
    name: str
    layers: list[LayerDescriptor] = field(default_factory=list)

    def __post_init__(self):
        if not self.layers:
            raise DescriptorError(f"network {self.name!r} has no layers")
        self.validate()

    def validate(self) -> None:
        """Check layer-to-layer shape compatibility.

        Channels must chain exactly.  Spatially, the next layer's declared
        (padded) input extent may exceed the previous output extent; the
        slack is implicit zero padding (split symmetrically, left-biased
        when odd).  An fc layer flattens whatever volume precedes it.
        """
        prev = None
        for lyr in self.layers:
            if prev is not None:
                c, h, w = prev
                if lyr.kind == "fc":
                    if lyr.in_maps != c * h * w:
                        raise DescriptorError(
                            f"{lyr.name or 'fc'}: expects {lyr.in_maps} inputs, "
                            f"previous volume is {c}x{h}x{w}")
                else:
                    if lyr.in_maps != c:
                        raise DescriptorError(
                            f"{lyr.name or lyr.kind}: {lyr.in_maps} input maps "
                            f"after a {c}-map layer")
                    for got, need in ((h, lyr.in_rows), (w, lyr.in_cols)):
                        if need < got:
                            raise DescriptorError(
                                f"{lyr.name or lyr.kind}: input extent {need} "
                                f"smaller than the {got} produced before it")
            prev = lyr.out_volume()

    def input_volume(self) -> tuple[int, int, int]:
        return self.layers[0].in_volume()

    def conv_layers(self) -> list[LayerDescriptor]:
        return [l for l in self.layers if l.kind == "conv"]

    def fc_layers(self) -> list[LayerDescriptor]:
        return [l for l in self.layers if l.kind == "fc"]


# ---- network description files ------------------------------------------
#
# One record per layer:
#   layer conv I=3 J=96 M=55 N=55 P=11 Q=11 stride=4 activation=relu \
#         pool_window=3 pool_stride=2
# plus an optional "name <netname>" line.  '#' starts a comment.

_KEYMAP = {
    "I": "in_maps", "J": "out_maps", "M": "out_rows", "N": "out_cols",
    "P": "kernel_rows", "Q": "kernel_cols", "stride": "stride",
    "activation": "activation", "pool_window": "pool_window",
    "pool_stride": "pool_stride", "name": "name",
}
_KEYMAP_BACK = {v: k for k, v in _KEYMAP.items()}


def parse_network(text: str, name: str = "network") -> NetworkDescriptor:
    layers = []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if fields[0] == "name":
            name = fields[1] if len(fields) > 1 else name
            continue
        if fields[0] != "layer" or len(fields) < 2:
            raise DescriptorError(f"line {ln}: expected 'layer <kind> key=value...'")
        kind = fields[1]
        kwargs: dict = {"kind": kind}
        for item in fields[2:]:
            if "=" not in item:
                raise DescriptorError(f"line {ln}: bad field {item!r}")
            key, val = item.split("=", 1)
            if key not in _KEYMAP:
                raise DescriptorError(f"line {ln}: unknown key {key!r}")
            attr = _KEYMAP[key]
            kwargs[attr] = val if attr in ("activation", "name") else int(val)
        try:
            layers.append(LayerDescriptor(**kwargs))
        except DescriptorError as exc:
            raise DescriptorError(f"line {ln}: {exc}") from None
    return NetworkDescriptor(name=name, layers=layers)


def format_network(net: NetworkDescriptor) -> str:
    out = [f"name {net.name}"]
    for lyr in net.layers:
        parts = [f"layer {lyr.kind}"]
        parts.append(f"I={lyr.in_maps} J={lyr.out_maps}")
        if lyr.kind != "fc":
            parts.append(f"M={lyr.out_rows} N={lyr.out_cols} "
                         f"P={lyr.kernel_rows} Q={lyr.kernel_cols} "
                         f"stride={lyr.stride}")
        if lyr.activation != "none":
            parts.append(f"activation={lyr.activation}")
        if lyr.pool_window:
            parts.append(f"pool_window={lyr.pool_window} pool_stride={lyr.pool_stride}")
        if lyr.name:
            parts.append(f"name={lyr.name}")
        out.append(" ".join(parts))
    return "\n".join(out) + "\n"


def load_network(path) -> NetworkDescriptor:
    with open(path) as fh:
        text = fh.read()
    from os.path import basename, splitext
    return parse_network(text, name=splitext(basename(str(path)))[0])
