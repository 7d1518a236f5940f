import pytest

from dsasim import (DescriptorError, LayerDescriptor, NetworkDescriptor,
                    builtin_network, format_network, parse_network)
from dsasim.networks import BUILTIN_NETWORKS, resolve_network, scale_network


def test_conv_input_extent():
    lyr = LayerDescriptor("conv", in_maps=3, out_maps=96, out_rows=55,
                          out_cols=55, kernel_rows=11, kernel_cols=11, stride=4)
    assert (lyr.in_rows, lyr.in_cols) == (227, 227)
    assert lyr.in_volume() == (3, 227, 227)
    assert lyr.out_volume() == (96, 55, 55)


def test_fc_shape_rules():
    lyr = LayerDescriptor("fc", in_maps=9216, out_maps=4096)
    assert lyr.in_volume() == (9216, 1, 1)
    with pytest.raises(DescriptorError):
        LayerDescriptor("fc", in_maps=8, out_maps=8, out_rows=2)


def test_pool_rules():
    lyr = LayerDescriptor("conv", in_maps=3, out_maps=8, out_rows=6, out_cols=6,
                          kernel_rows=3, kernel_cols=3, pool_window=2,
                          pool_stride=2)
    assert lyr.pooled_shape() == (3, 3)
    with pytest.raises(DescriptorError):   # 2/2 cannot tile a 5-wide map
        LayerDescriptor("conv", in_maps=3, out_maps=8, out_rows=5, out_cols=5,
                        kernel_rows=3, kernel_cols=3, pool_window=2,
                        pool_stride=2)
    with pytest.raises(DescriptorError):
        LayerDescriptor("pool", in_maps=3, out_maps=3, out_rows=2, out_cols=2)


def test_bad_kind_and_dims():
    with pytest.raises(DescriptorError):
        LayerDescriptor("deconv", in_maps=1, out_maps=1)
    with pytest.raises(DescriptorError):
        LayerDescriptor("conv", in_maps=0, out_maps=1)
    with pytest.raises(DescriptorError):
        LayerDescriptor("conv", in_maps=1, out_maps=1, activation="gelu")


def test_channel_chaining_enforced():
    a = LayerDescriptor("conv", in_maps=3, out_maps=8, out_rows=4, out_cols=4,
                        kernel_rows=3, kernel_cols=3)
    bad = LayerDescriptor("conv", in_maps=7, out_maps=4, out_rows=2, out_cols=2,
                          kernel_rows=3, kernel_cols=3)
    with pytest.raises(DescriptorError):
        NetworkDescriptor("x", [a, bad])


def test_spatial_slack_is_padding_but_shrink_is_error():
    a = LayerDescriptor("conv", in_maps=3, out_maps=8, out_rows=4, out_cols=4,
                        kernel_rows=3, kernel_cols=3)
    # 4x4 output feeding a layer declaring 6x6 input: 2 rows of zero pad
    ok = LayerDescriptor("conv", in_maps=8, out_maps=4, out_rows=4, out_cols=4,
                         kernel_rows=3, kernel_cols=3)
    NetworkDescriptor("x", [a, ok])
    too_small = LayerDescriptor("conv", in_maps=8, out_maps=4, out_rows=1,
                                out_cols=1, kernel_rows=2, kernel_cols=2)
    with pytest.raises(DescriptorError):
        NetworkDescriptor("x", [a, too_small])


def test_fc_flattens_previous_volume():
    a = LayerDescriptor("conv", in_maps=3, out_maps=8, out_rows=4, out_cols=4,
                        kernel_rows=3, kernel_cols=3)
    fc = LayerDescriptor("fc", in_maps=8 * 4 * 4, out_maps=10)
    NetworkDescriptor("x", [a, fc])
    with pytest.raises(DescriptorError):
        NetworkDescriptor("x", [a, LayerDescriptor("fc", in_maps=100,
                                                   out_maps=10)])


def test_parse_format_round_trip():
    text = ("name toy\n"
            "layer conv I=3 J=4 M=5 N=5 P=3 Q=3 stride=1 activation=relu "
            "pool_window=0 pool_stride=0 name=c1  # trailing comment\n"
            "layer fc I=100 J=10 activation=none name=out\n")
    net = parse_network(text)
    assert net.name == "toy"
    assert [l.kind for l in net.layers] == ["conv", "fc"]
    again = parse_network(format_network(net))
    assert again.layers == net.layers
    assert again.name == net.name


def test_parse_errors_carry_line_numbers():
    with pytest.raises(DescriptorError, match="line 1"):
        parse_network("layer conv I=3 nonsense\n")
    with pytest.raises(DescriptorError, match="unknown key"):
        parse_network("layer conv I=3 J=4 Z=9\n")
    with pytest.raises(DescriptorError, match="line 2"):
        parse_network("layer fc I=4 J=4\nlayer conv I=0 J=1\n")


@pytest.mark.parametrize("name", BUILTIN_NETWORKS)
def test_builtins_load_and_round_trip(name):
    net = builtin_network(name)
    assert parse_network(format_network(net), net.name).layers == net.layers


def test_builtin_alexnet_structure(alexnet):
    kinds = [l.kind for l in alexnet.layers]
    assert kinds == ["conv"] * 5 + ["fc"] * 3
    c1 = alexnet.layers[0]
    assert (c1.in_maps, c1.out_maps, c1.out_rows, c1.stride) == (3, 96, 55, 4)
    assert alexnet.layers[-1].out_maps == 1000


def test_builtin_vgg16_structure(vgg16):
    convs = vgg16.conv_layers()
    assert len(convs) == 13 and len(vgg16.fc_layers()) == 3
    assert all(l.kernel_rows == l.kernel_cols == 3 for l in convs)
    assert vgg16.layers[0].out_rows == 224
    assert vgg16.fc_layers()[0].in_maps == 512 * 7 * 7


def test_resolve_network_path_and_builtin(tmp_path, alexnet):
    p = tmp_path / "mini.net"
    p.write_text("layer fc I=4 J=2\n")
    assert resolve_network(str(p)).layers[0].kind == "fc"
    assert resolve_network("alexnet").layers == alexnet.layers


@pytest.mark.parametrize("factor", [2, 4, 8])
def test_scale_network_still_validates(alexnet, factor):
    small = scale_network(alexnet, factor)
    small.validate()
    assert small.name == f"alexnet-1of{factor}"
    assert small.layers[0].in_maps == 3          # input channels kept
    assert small.layers[-1].out_maps == 1000 // factor
