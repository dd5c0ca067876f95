import numpy as np
import pytest

from pipeboot.errors import LabelOutOfRange, ShapeError
from pipeboot.nn import (Conv2d, FullyConnected, conv2d_backward,
                         conv2d_forward, fc_backward, fc_forward, mse_loss,
                         relu_backward, relu_forward, softmax_xent)
from pipeboot.rng import Rng

from oracles import direct_conv2d, finite_diff, rel_err

GRAD_TOL = 1e-4


def rand(shape, seed, lo=-1.0, hi=1.0):
    r = Rng(seed)
    return (r.uniform(int(np.prod(shape))) * (hi - lo) + lo).reshape(shape)


class TestConvForward:
    def test_zero_input_gives_bias(self):
        layer = Conv2d(3, 2, 3, rng=Rng(0))
        layer.bias = np.array([1.5, -2.0])
        out = conv2d_forward(np.zeros((1, 3, 4, 4)), layer)
        assert np.allclose(out[0, 0], 1.5) and np.allclose(out[0, 1], -2.0)

    def test_identity_kernel(self):
        layer = Conv2d(1, 1, 1, weights=np.ones((1, 1, 1, 1)), bias=np.zeros(1))
        x = rand((2, 1, 5, 5), seed=1)
        assert np.array_equal(conv2d_forward(x, layer), x)

    def test_ones_kernel_matches_direct_oracle(self):
        # frozen from direct_conv2d: every 3x3 same-padded window of
        # [[1,2],[3,4]] sums to 10
        layer = Conv2d(1, 1, 3, weights=np.ones((1, 1, 3, 3)), bias=np.zeros(1))
        x = np.array([[[[1.0, 2.0], [3.0, 4.0]]]])
        out = conv2d_forward(x, layer)
        assert np.array_equal(out, np.full((1, 1, 2, 2), 10.0))
        assert np.array_equal(out, direct_conv2d(x, layer.weights, layer.bias))

    def test_random_instances_match_direct_oracle(self):
        for seed in range(3):
            layer = Conv2d(2, 3, 3, rng=Rng(seed + 10))
            x = rand((2, 2, 4, 5), seed=seed)
            assert rel_err(conv2d_forward(x, layer),
                           direct_conv2d(x, layer.weights, layer.bias)) < 1e-12

    def test_preserves_spatial_shape(self):
        layer = Conv2d(1, 4, 5, rng=Rng(3))
        assert conv2d_forward(rand((1, 1, 7, 9), seed=2), layer).shape == (1, 4, 7, 9)

    def test_channel_mismatch_raises(self):
        layer = Conv2d(3, 2, 3, rng=Rng(0))
        with pytest.raises(ShapeError, match="channels"):
            conv2d_forward(np.zeros((1, 2, 4, 4)), layer)

    def test_even_kernel_rejected(self):
        with pytest.raises(ShapeError, match="odd"):
            Conv2d(1, 1, 2, rng=Rng(0))


class TestConvBackward:
    def test_zero_upstream_grad(self):
        layer = Conv2d(2, 2, 3, rng=Rng(4))
        x = rand((1, 2, 4, 4), seed=5)
        gx, gw, gb = conv2d_backward(x, layer, np.zeros((1, 2, 4, 4)))
        assert not gx.any() and not gw.any() and not gb.any()

    def test_scalar_case_reduces_to_linear_regression(self):
        # 1x1 kernel on a 1x1 image: y = w*x + b, so dL/dw = g*x, dL/dx = g*w
        layer = Conv2d(1, 1, 1, weights=np.full((1, 1, 1, 1), 3.0), bias=np.zeros(1))
        x = np.full((1, 1, 1, 1), 2.0)
        g = np.full((1, 1, 1, 1), 5.0)
        gx, gw, gb = conv2d_backward(x, layer, g)
        assert gx.item() == 15.0 and gw.item() == 10.0 and gb.item() == 5.0

    def test_gradients_match_finite_differences(self):
        layer = Conv2d(2, 2, 3, rng=Rng(6))
        x = rand((1, 2, 4, 4), seed=7)
        r = rand((1, 2, 4, 4), seed=8)  # fixed projection makes the output scalar
        gx, gw, gb = conv2d_backward(x, layer, r)

        assert rel_err(gx, finite_diff(lambda v: float((conv2d_forward(v, layer) * r).sum()), x)) < GRAD_TOL

        def loss_wrt_weights(wv):
            probe = Conv2d(2, 2, 3, weights=wv, bias=layer.bias)
            return float((conv2d_forward(x, probe) * r).sum())

        def loss_wrt_bias(bv):
            probe = Conv2d(2, 2, 3, weights=layer.weights, bias=bv)
            return float((conv2d_forward(x, probe) * r).sum())

        assert rel_err(gw, finite_diff(loss_wrt_weights, layer.weights)) < GRAD_TOL
        assert rel_err(gb, finite_diff(loss_wrt_bias, layer.bias)) < GRAD_TOL


class TestRelu:
    def test_definition(self):
        assert np.array_equal(relu_forward(np.array([-1.0, 0.0, 2.0])), [0.0, 0.0, 2.0])

    def test_backward_definition(self):
        out = relu_backward(np.array([-1.0, 2.0]), np.array([5.0, 7.0]))
        assert np.array_equal(out, [0.0, 7.0])

    def test_zero_input_gets_zero_grad(self):
        assert relu_backward(np.array([0.0]), np.array([9.0]))[0] == 0.0

    def test_gradient_matches_finite_differences_away_from_kink(self):
        x = rand((3, 4), seed=9)
        x = np.where(np.abs(x) < 1e-3, 0.5, x)
        r = rand((3, 4), seed=10)
        g = relu_backward(x, r)
        num = finite_diff(lambda v: float((relu_forward(v) * r).sum()), x)
        assert rel_err(g, num) < GRAD_TOL


class TestFullyConnected:
    def test_identity_map(self):
        layer = FullyConnected(3, 3, weights=np.eye(3), bias=np.zeros(3))
        x = rand((2, 3), seed=11)
        assert np.array_equal(fc_forward(x, layer), x)

    def test_hand_arithmetic(self):
        layer = FullyConnected(2, 2, weights=np.array([[1.0, 1.0], [0.0, 1.0]]),
                               bias=np.array([0.0, 1.0]))
        out = fc_forward(np.array([[1.0, 2.0]]), layer)
        assert np.array_equal(out, [[3.0, 3.0]])

    def test_flattens_conv_activations(self):
        layer = FullyConnected(12, 2, rng=Rng(12))
        x = rand((2, 3, 2, 2), seed=13)
        assert fc_forward(x, layer).shape == (2, 2)

    def test_feature_mismatch_raises(self):
        layer = FullyConnected(4, 2, rng=Rng(0))
        with pytest.raises(ShapeError, match="features"):
            fc_forward(np.zeros((1, 5)), layer)

    def test_gradients_match_finite_differences(self):
        layer = FullyConnected(4, 3, rng=Rng(14))
        x = rand((2, 4), seed=15)
        r = rand((2, 3), seed=16)
        gx, gw, gb = fc_backward(x, layer, r)
        assert rel_err(gx, finite_diff(lambda v: float((fc_forward(v, layer) * r).sum()), x)) < GRAD_TOL

        def loss_wrt_weights(wv):
            probe = FullyConnected(4, 3, weights=wv, bias=layer.bias)
            return float((fc_forward(x, probe) * r).sum())

        assert rel_err(gw, finite_diff(loss_wrt_weights, layer.weights)) < GRAD_TOL
        assert rel_err(gb, finite_diff(
            lambda bv: float((fc_forward(x, FullyConnected(4, 3, weights=layer.weights, bias=bv)) * r).sum()),
            layer.bias)) < GRAD_TOL


class TestMseLoss:
    def test_identical_inputs(self):
        loss, grad = mse_loss(np.array([1.0, 2.0]), np.array([1.0, 2.0]))
        assert loss == 0.0 and not grad.any()

    def test_hand_arithmetic(self):
        loss, _ = mse_loss(np.array([1.0, 2.0]), np.array([0.0, 0.0]))
        assert loss == 2.5

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            mse_loss(np.zeros(2), np.zeros(3))

    def test_gradient_matches_finite_differences(self):
        pred = rand((3, 3), seed=17)
        target = rand((3, 3), seed=18)
        _, grad = mse_loss(pred, target)
        num = finite_diff(lambda v: mse_loss(v, target)[0], pred)
        assert rel_err(grad, num) < 1e-6


class TestSoftmaxXent:
    def test_uniform_logits(self):
        loss, _ = softmax_xent(np.zeros((4, 10)), np.array([0, 3, 5, 9]))
        assert abs(loss - np.log(10)) < 1e-12

    def test_saturated_case(self):
        logits = np.zeros((1, 4))
        logits[0, 2] = 100.0
        loss, _ = softmax_xent(logits, np.array([2]))
        assert loss < 1e-12

    def test_label_out_of_range(self):
        with pytest.raises(LabelOutOfRange):
            softmax_xent(np.zeros((2, 3)), np.array([0, 3]))

    def test_gradient_matches_finite_differences(self):
        logits = rand((4, 5), seed=19, lo=-2.0, hi=2.0)
        labels = np.array([0, 2, 4, 1])
        _, grad = softmax_xent(logits, labels)
        num = finite_diff(lambda v: softmax_xent(v, labels)[0], logits)
        assert rel_err(grad, num) < 1e-5


def test_finite_outputs_on_finite_inputs():
    layer = Conv2d(1, 2, 3, rng=Rng(20))
    x = rand((1, 1, 6, 6), seed=21, lo=-100.0, hi=100.0)
    out = relu_forward(conv2d_forward(x, layer))
    assert np.isfinite(out).all()
