"""Compiled affine stages and the convolutional building blocks."""

import math

import numpy as np
import pytest

from dsclab import (CarryClipped, ConvSpec, ShapeMismatch, SignalClass,
                    bounded_negative, compile_network, compute_schedule,
                    conv1d, conv2d, dcnn_forward, dcnn_forward_2d, forward,
                    lista_cp_run, lista_general_run, relu, size_report)
from dsclab.rng import make_generator


@pytest.fixture(scope="module")
def flat_sched(flat_dict, flat_cert):
    return compute_schedule(flat_dict, SignalClass(1.0, 2, 0.0), 5,
                            certificate=flat_cert)


def test_stage_block_shapes(flat_dict, flat_sched):
    net = compile_network(flat_sched, flat_dict)
    m, d = 16, 32
    assert net.input_dim == m and net.code_dim == d
    assert net.stages[0].B.shape == (2 * d + m, m)
    for st in net.stages[1:]:
        assert st.B.shape == (2 * d + m, d + m)
    for st in net.stages:
        assert st.A.shape == (d + m, 2 * d + m)
        assert st.c.shape == (2 * d + m,)
        assert st.e.shape == (d + m,)
    assert net.state_dims == [m] + [d + m] * 5


def test_first_stage_matches_to_rounding(flat_dict, flat_sched):
    # The stacked-block matvec may accumulate in a different order than
    # the plain W' y product, so agreement is to rounding error, not
    # bitwise.
    rng = make_generator(60)
    x0 = np.zeros(32)
    x0[[3, 17]] = [0.7, -0.4]
    y = flat_dict.data @ x0
    net = compile_network(flat_sched, flat_dict)
    got = forward(net, y, return_stages=True)[0]
    want = lista_cp_run(flat_sched, flat_dict, y)[1]
    assert np.abs(got - want).max() <= 1e-14


def test_all_stages_match_iteration(flat_dict, flat_cert):
    rng = make_generator(61)
    sched = compute_schedule(flat_dict, SignalClass(1.0, 2, 0.0), 5,
                             certificate=flat_cert)
    net = compile_network(sched, flat_dict)
    for _ in range(20):
        x0 = np.zeros(32)
        idx = rng.choice(32, 2, replace=False)
        x0[idx] = rng.uniform(0.5, 1.0, 2) * rng.choice([-1.0, 1.0], 2)
        y = flat_dict.data @ x0
        outs = forward(net, y, return_stages=True)
        iters = lista_cp_run(sched, flat_dict, y)[1:]
        for got, want in zip(outs, iters):
            ref = max(np.linalg.norm(want), 1e-30)
            assert np.linalg.norm(got - want) / ref <= 1e-10


def test_bounded_activation_network(flat_dict, flat_cert):
    act = bounded_negative(0.01, 0.1, m=1)
    with pytest.warns(Warning):
        sched = compute_schedule(flat_dict, SignalClass(1.0, 2, 0.0), 4,
                                 activation=act, certificate=flat_cert)
    net = compile_network(sched, flat_dict)
    x0 = np.zeros(32)
    x0[[5, 9]] = [0.9, 0.8]
    y = flat_dict.data @ x0
    outs = forward(net, y, return_stages=True)
    iters = lista_general_run(sched, flat_dict, y)[1:]
    for got, want in zip(outs, iters):
        assert np.abs(got - want).max() <= 1e-12


def test_carry_clip_warning(flat_dict, flat_sched):
    net = compile_network(flat_sched, flat_dict)
    M = net.carry_bound
    bad = np.zeros(16)
    bad[0] = -(M + 1e-6)
    with pytest.warns(CarryClipped):
        forward(net, bad)
    import warnings as _w
    with _w.catch_warnings():
        _w.simplefilter("error")
        forward(net, np.full(16, -M))


def test_zero_stage_network(flat_dict, flat_cert):
    sched = compute_schedule(flat_dict, SignalClass(1.0, 1, 0.0), 0,
                             certificate=flat_cert)
    net = compile_network(sched, flat_dict)
    assert net.stages == ()
    assert np.array_equal(forward(net, np.ones(16)), np.zeros(32))
    assert forward(net, np.ones(16), return_stages=True) == []


def test_forward_shape_check(flat_dict, flat_sched):
    net = compile_network(flat_sched, flat_dict)
    with pytest.raises(ShapeMismatch):
        forward(net, np.ones(17))


def test_size_report_estimates():
    rep = size_report([16, 32], 3, 2)
    assert rep["depth_estimate"] == pytest.approx(3 * math.log2(48))
    assert rep["weight_estimate"] == pytest.approx(3.0 * 48 ** 2)
    zero = size_report([16, 32], 0, 2)
    assert zero["depth_estimate"] == 0.0
    assert zero["weight_estimate"] == 0.0
    assert zero["exact_param_count"] == 0
    with pytest.raises(ValueError):
        size_report([16, 32], 3, 1)


def test_size_report_counts_actual_nonzeros(flat_dict, flat_sched):
    net = compile_network(flat_sched, flat_dict)
    rep = size_report([16, 32], 5, 2, nets=[net])
    direct = sum(int(np.count_nonzero(blk))
                 for st in net.stages
                 for blk in (st.A, st.B, st.c, st.e))
    assert rep["exact_param_count"] == direct
    assert direct > 0


def test_conv1d_examples():
    out = conv1d([1.0, 0.0], [5.0, 6.0, 7.0], 1)
    assert np.array_equal(out, [5.0, 6.0, 7.0])
    out = conv1d([1.0, 1.0], [1.0, 2.0, 3.0, 4.0], 2)
    assert np.array_equal(out, [3.0, 7.0])


def _conv1d_oracle(w, x, t):
    d = len(x)
    n_out = -(-d // t)
    out = np.zeros(n_out)
    for i in range(n_out):
        for k in range(len(w)):
            pos = i * t + k
            if pos < d:
                out[i] += w[k] * x[pos]
    return out


def test_conv1d_against_index_oracle():
    rng = make_generator(62)
    for _ in range(25):
        wlen = int(rng.integers(1, 6))
        xlen = int(rng.integers(1, 20))
        t = int(rng.integers(1, 5))
        w = rng.standard_normal(wlen)
        x = rng.standard_normal(xlen)
        assert np.abs(conv1d(w, x, t)
                      - _conv1d_oracle(w, x, t)).max() <= 1e-14


def _conv2d_oracle(w, x, t):
    s = w.shape[0]
    r_out = -(-x.shape[0] // t)
    c_out = -(-x.shape[1] // t)
    out = np.zeros((r_out, c_out))
    for i in range(r_out):
        for j in range(c_out):
            for k in range(s):
                for l in range(s):
                    r, c = i * t + k, j * t + l
                    if r < x.shape[0] and c < x.shape[1]:
                        out[i, j] += w[k, l] * x[r, c]
    return out


def test_conv2d_against_index_oracle():
    rng = make_generator(63)
    for _ in range(15):
        s = int(rng.integers(1, 4))
        r = int(rng.integers(1, 9))
        c = int(rng.integers(1, 9))
        t = int(rng.integers(1, 4))
        w = rng.standard_normal((s, s))
        x = rng.standard_normal((r, c))
        assert np.abs(conv2d(w, x, t)
                      - _conv2d_oracle(w, x, t)).max() <= 1e-13


def test_conv_validation():
    with pytest.raises(ShapeMismatch):
        conv1d(np.ones((2, 2)), np.ones(3), 1)
    with pytest.raises(ValueError):
        conv1d([1.0], [1.0, 2.0], 0)
    with pytest.raises(ShapeMismatch):
        conv2d(np.ones((2, 3)), np.ones((3, 3)), 1)


def test_convspec_validation():
    spec = ConvSpec((3, 2), (2, 1), (1, 4, 2))
    assert spec.depth == 2
    assert spec.layer_dims(10) == [10, 5, 5]
    with pytest.raises(ValueError):
        ConvSpec((1,), (1,), (1, 1))
    with pytest.raises(ValueError):
        ConvSpec((2,), (0,), (1, 1))
    with pytest.raises(ShapeMismatch):
        ConvSpec((2, 2), (1,), (1, 1, 1))
    with pytest.raises(ValueError):
        ConvSpec((2,), (1,), (1, 0))


def test_dcnn_forward_single_channel():
    spec = ConvSpec((2,), (2,), (1, 1))
    w = np.array([[[1.0, 1.0]]])
    b = np.array([0.0])
    x = np.array([1.0, 2.0, 3.0, 4.0])
    outs = dcnn_forward(spec, [(w, b)], x, relu())
    assert len(outs) == 1
    assert np.array_equal(outs[0], [[3.0, 7.0]])


def test_dcnn_forward_mixes_channels():
    spec = ConvSpec((2, 2), (1, 2), (2, 3, 1))
    rng = make_generator(64)
    w1 = rng.standard_normal((3, 2, 2))
    b1 = rng.standard_normal(3)
    w2 = rng.standard_normal((1, 3, 2))
    b2 = rng.standard_normal(1)
    x = rng.standard_normal((2, 6))
    rho = relu()
    outs = dcnn_forward(spec, [(w1, b1), (w2, b2)], x, rho)
    h1 = np.stack([rho.apply(b1[l] + conv1d(w1[l, 0], x[0], 1)
                             + conv1d(w1[l, 1], x[1], 1))
                   for l in range(3)])
    assert np.abs(outs[0] - h1).max() <= 1e-14
    h2 = rho.apply(b2[0] + sum(conv1d(w2[0, i], h1[i], 2)
                               for i in range(3)))
    assert np.abs(outs[1] - h2).max() <= 1e-14


def test_dcnn_forward_2d_matches_manual():
    spec = ConvSpec((2,), (2,), (1, 2))
    rng = make_generator(65)
    w = rng.standard_normal((2, 1, 2, 2))
    b = rng.standard_normal(2)
    x = rng.standard_normal((5, 5))
    rho = bounded_negative(0.1, 0.5)
    outs = dcnn_forward_2d(spec, [(w, b)], x, rho)
    assert outs[0].shape == (2, 3, 3)
    for l in range(2):
        want = rho.apply(b[l] + conv2d(w[l, 0], x, 2))
        assert np.abs(outs[0][l] - want).max() <= 1e-14


def test_dcnn_forward_errors():
    spec = ConvSpec((2,), (1,), (1, 1))
    w = np.ones((1, 1, 2))
    b = np.zeros(1)
    with pytest.raises(TypeError):
        dcnn_forward(spec, [(w, b)], np.ones(4), rho=None)
    with pytest.raises(ShapeMismatch):
        dcnn_forward(spec, [(np.ones((1, 1, 3)), b)], np.ones(4), relu())
    with pytest.raises(ShapeMismatch):
        dcnn_forward(spec, [(w, b)], np.ones((2, 4)), relu())
