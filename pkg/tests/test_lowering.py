import numpy as np
import pytest

from dsasim import LayerDescriptor, oracle_conv
from dsasim.lowering import im2col, lower_weights
from dsasim.oracle import pad_input
from dsasim.quant import random_tensor
from util import random_conv_layer


@pytest.mark.parametrize("seed", range(10))
def test_im2col_rows_are_receptive_fields(seed):
    rng = np.random.default_rng(seed)
    lyr = random_conv_layer(rng)
    x = random_tensor(lyr.in_volume(), rng)
    vecs = im2col(x.data, lyr)
    assert vecs.shape == (lyr.out_rows * lyr.out_cols,
                          lyr.in_maps * lyr.kernel_rows * lyr.kernel_cols)
    padded = pad_input(x.wide().reshape(x.shape), lyr)
    s = lyr.stride
    for m in range(lyr.out_rows):
        for n in range(lyr.out_cols):
            patch = padded[:, m * s:m * s + lyr.kernel_rows,
                           n * s:n * s + lyr.kernel_cols]
            assert vecs[m * lyr.out_cols + n].tolist() == \
                patch.ravel().tolist()


@pytest.mark.parametrize("seed", range(10))
def test_lowered_matmul_equals_direct_conv(seed):
    rng = np.random.default_rng(100 + seed)
    lyr = random_conv_layer(rng)
    x = random_tensor(lyr.in_volume(), rng)
    w = random_tensor((lyr.out_maps,
                       lyr.in_maps * lyr.kernel_rows * lyr.kernel_cols), rng)
    flat = im2col(x.data, lyr) @ lower_weights(w.wide(), lyr)   # (M*N, J)
    direct = oracle_conv(x, w, lyr)
    lowered = flat.T.reshape(lyr.out_maps, lyr.out_rows, lyr.out_cols)
    assert np.array_equal(lowered, direct)


def test_stride_disappears_into_lowering():
    lyr = LayerDescriptor("conv", in_maps=1, out_maps=1, out_rows=2, out_cols=2,
                          kernel_rows=2, kernel_cols=2, stride=2)
    x = np.arange(16, dtype=np.int64).reshape(1, 4, 4)
    vecs = im2col(x, lyr)
    assert vecs.tolist() == [[0, 1, 4, 5], [2, 3, 6, 7],
                             [8, 9, 12, 13], [10, 11, 14, 15]]


def test_fc_lowering_is_one_row():
    lyr = LayerDescriptor("fc", in_maps=6, out_maps=3)
    x = np.arange(6, dtype=np.int64).reshape(6, 1, 1)
    vecs = im2col(x, lyr)
    assert vecs.shape == (1, 6)
    assert vecs[0].tolist() == list(range(6))
    w = np.arange(18, dtype=np.int64).reshape(3, 6)
    assert lower_weights(w, lyr).shape == (6, 3)
