"""Counting and reuse-factor checks.

The random-layer tests compare the closed forms against `loop_counts`,
which literally executes the six-level loop nest and tallies operand
touches.  The builtin aggregates are frozen integers recomputed from
that reference.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dsasim import (LayerDescriptor, mac_count, network_stats, output_count,
                    input_count, reuse_profile, weight_count)
from util import loop_counts, random_conv_layer, random_fc_layer

# frozen aggregates, recomputed with loop-nest arithmetic per layer
ALEXNET_STATS = (1_076_634_144, 3_745_824, 58_621_952, 58_621_952)
VGG16_STATS = (15_346_630_656, 14_710_464, 123_633_664, 123_633_664)


@pytest.mark.parametrize("seed", range(15))
def test_counts_match_loop_reference_conv(seed):
    rng = np.random.default_rng(seed)
    lyr = random_conv_layer(rng)
    ref = loop_counts(lyr)
    assert mac_count(lyr) == ref["macs"]
    assert weight_count(lyr) == ref["weights"]
    assert output_count(lyr) == lyr.out_maps * lyr.out_rows * lyr.out_cols
    # every weight is used exactly M*N times
    uses = set(ref["weight_uses"].values())
    assert uses == {lyr.out_rows * lyr.out_cols}


@pytest.mark.parametrize("seed", range(5))
def test_counts_match_loop_reference_fc(seed):
    rng = np.random.default_rng(100 + seed)
    lyr = random_fc_layer(rng)
    ref = loop_counts(lyr)
    assert mac_count(lyr) == ref["macs"] == lyr.in_maps * lyr.out_maps
    assert weight_count(lyr) == mac_count(lyr)   # reuse factor 1
    assert reuse_profile(lyr).weight_reuse == 1


def test_interior_input_reuse_matches_loop_reference():
    # the closed form is the interior maximum: exact once the output map is
    # large enough for a fully-covered pixel to exist, an upper bound below
    rng = np.random.default_rng(7)
    exact = 0
    for _ in range(40):
        lyr = random_conv_layer(rng, max_maps=3, max_out=6, max_kern=3)
        ref = loop_counts(lyr)
        got = reuse_profile(lyr).input_act_reuse
        peak = max(ref["input_uses"].values())
        assert got >= peak
        full_rows = lyr.out_rows >= -(-lyr.kernel_rows // lyr.stride)
        full_cols = lyr.out_cols >= -(-lyr.kernel_cols // lyr.stride)
        if full_rows and full_cols:
            assert got == peak
            exact += 1
    assert exact >= 10           # the exact branch is actually exercised


def test_pool_layers_have_no_weights():
    lyr = LayerDescriptor("pool", in_maps=4, out_maps=4, out_rows=2,
                          out_cols=2, pool_window=2, pool_stride=2)
    assert weight_count(lyr) == 0 and mac_count(lyr) == 0


def test_frozen_alexnet_aggregates(alexnet):
    st_ = network_stats(alexnet)
    assert (st_.conv_macs, st_.conv_weights, st_.fc_macs, st_.fc_weights) \
        == ALEXNET_STATS


def test_frozen_vgg16_aggregates(vgg16):
    st_ = network_stats(vgg16)
    assert (st_.conv_macs, st_.conv_weights, st_.fc_macs, st_.fc_weights) \
        == VGG16_STATS


@pytest.mark.parametrize("net_name", ["alexnet", "vgg16"])
def test_reuse_identities_on_builtins(net_name, alexnet, vgg16):
    net = alexnet if net_name == "alexnet" else vgg16
    for lyr in net.layers:
        if lyr.kind == "pool":
            continue
        prof = reuse_profile(lyr)
        assert prof.weight_reuse * weight_count(lyr) == mac_count(lyr)
        assert prof.output_act_reuse * output_count(lyr) == mac_count(lyr)
        if lyr.kind == "fc":
            assert prof.weight_reuse == 1


@settings(max_examples=150, deadline=None)
@given(i=st.integers(1, 32), j=st.integers(1, 32), m=st.integers(1, 16),
       n=st.integers(1, 16), p=st.integers(1, 5), q=st.integers(1, 5),
       s=st.integers(1, 3))
def test_reuse_identities_hold_generally(i, j, m, n, p, q, s):
    lyr = LayerDescriptor("conv", in_maps=i, out_maps=j, out_rows=m,
                          out_cols=n, kernel_rows=p, kernel_cols=q, stride=s)
    prof = reuse_profile(lyr)
    assert prof.weight_reuse * weight_count(lyr) == mac_count(lyr)
    assert prof.output_act_reuse * output_count(lyr) == mac_count(lyr)
    assert input_count(lyr) == i * ((m - 1) * s + p) * ((n - 1) * s + q)
