"""Dense layers with hand-derived gradients.

Everything is float64. Convolution is cross-correlation (no kernel flip)
with stride 1 and zero "same" padding, so spatial shape never changes;
kernel sizes must be odd. Gradients are analytic and verified against
central finite differences in the test suite.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ShapeError


def _glorot_uniform(shape, fan_in, fan_out, rng):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    n = int(np.prod(shape))
    return ((rng.uniform(n) * 2.0 - 1.0) * limit).reshape(shape)


class Conv2d:
    """Stride-1 same-padding cross-correlation layer."""

    kind = "conv2d"
    has_params = True

    def __init__(self, in_channels, out_channels, kernel_size, rng=None, weights=None, bias=None):
        if kernel_size % 2 != 1:
            raise ShapeError(f"kernel size must be odd for same padding, got {kernel_size}")
        self.cin = in_channels
        self.cout = out_channels
        self.k = kernel_size
        if weights is not None:
            self.weights = np.asarray(weights, dtype=np.float64)
            self.bias = np.asarray(bias, dtype=np.float64)
        else:
            fan = kernel_size * kernel_size
            self.weights = _glorot_uniform(
                (out_channels, in_channels, kernel_size, kernel_size),
                fan * in_channels, fan * out_channels, rng)
            self.bias = np.zeros(out_channels)
        if self.weights.shape != (out_channels, in_channels, kernel_size, kernel_size):
            raise ShapeError(f"conv weights must be {(out_channels, in_channels, kernel_size, kernel_size)}, "
                             f"got {self.weights.shape}")
        if self.bias.shape != (out_channels,):
            raise ShapeError(f"conv bias must be ({out_channels},), got {self.bias.shape}")

    def params(self):
        return [self.weights, self.bias]

    def set_params(self, ps):
        self.weights, self.bias = ps

    def output_shape(self, input_shape):
        c, h, w = _require_chw(input_shape, self.cin)
        return (self.cout, h, w)

    def flops(self, input_shape):
        _, h, w = _require_chw(input_shape, self.cin)
        return 2 * self.k * self.k * self.cin * self.cout * h * w


class ReLU:
    kind = "relu"
    has_params = False

    def params(self):
        return []

    def output_shape(self, input_shape):
        return input_shape

    def flops(self, input_shape):
        return 0


class FullyConnected:
    """Affine layer; 4-D inputs are flattened to (N, C*H*W) on the way in."""

    kind = "fc"
    has_params = True

    def __init__(self, in_features, out_features, rng=None, weights=None, bias=None):
        self.nin = in_features
        self.nout = out_features
        if weights is not None:
            self.weights = np.asarray(weights, dtype=np.float64)
            self.bias = np.asarray(bias, dtype=np.float64)
        else:
            self.weights = _glorot_uniform((out_features, in_features), in_features, out_features, rng)
            self.bias = np.zeros(out_features)
        if self.weights.shape != (out_features, in_features):
            raise ShapeError(f"fc weights must be {(out_features, in_features)}, got {self.weights.shape}")
        if self.bias.shape != (out_features,):
            raise ShapeError(f"fc bias must be ({out_features},), got {self.bias.shape}")

    def params(self):
        return [self.weights, self.bias]

    def set_params(self, ps):
        self.weights, self.bias = ps

    def output_shape(self, input_shape):
        feats = int(np.prod(input_shape))
        if feats != self.nin:
            raise ShapeError(f"fc expects {self.nin} input features, got {input_shape} = {feats}")
        return (self.nout,)

    def flops(self, input_shape):
        self.output_shape(input_shape)
        return 2 * self.nin * self.nout


def _require_chw(input_shape, cin):
    if len(input_shape) != 3:
        raise ShapeError(f"conv input shape must be (C, H, W), got {tuple(input_shape)}")
    c, h, w = input_shape
    if c != cin:
        raise ShapeError(f"conv expects {cin} input channels, got {c}")
    return c, h, w


def _im2col(x, k):
    """(N, C, H, W) -> (N, H*W, C*k*k) patch matrix under zero same-padding."""
    n, c, h, w = x.shape
    p = k // 2
    xp = np.zeros((n, c, h + 2 * p, w + 2 * p))
    xp[:, :, p:p + h, p:p + w] = x
    win = sliding_window_view(xp, (k, k), axis=(2, 3))  # (N, C, H, W, k, k)
    return win.transpose(0, 2, 3, 1, 4, 5).reshape(n, h * w, c * k * k)


def _conv_raw(x, weights):
    n, c, h, w = x.shape
    cout, cin, k, _ = weights.shape
    cols = _im2col(x, k)
    out = cols @ weights.reshape(cout, cin * k * k).T  # (N, H*W, Cout)
    return out.transpose(0, 2, 1).reshape(n, cout, h, w)


def conv2d_forward(x, layer, ledger=None, layer_index=None):
    """Cross-correlate x (N, Cin, H, W) with layer weights; same spatial shape out."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 4:
        raise ShapeError(f"conv input must be 4-D (N, C, H, W), got shape {x.shape}")
    if x.shape[1] != layer.cin:
        raise ShapeError(f"conv expects {layer.cin} input channels, got {x.shape[1]}")
    out = _conv_raw(x, layer.weights) + layer.bias[None, :, None, None]
    if ledger is not None:
        n, _, h, w = x.shape
        ledger.credit(layer_index, 2 * layer.k * layer.k * layer.cin * layer.cout * h * w * n)
    return out


def conv2d_backward(x, layer, grad_out):
    """Gradients of conv2d_forward; returns (grad_input, grad_weights, grad_bias)."""
    x = np.asarray(x, dtype=np.float64)
    grad_out = np.asarray(grad_out, dtype=np.float64)
    if grad_out.shape != (x.shape[0], layer.cout, x.shape[2], x.shape[3]):
        raise ShapeError(f"grad_out shape {grad_out.shape} does not match conv output "
                         f"{(x.shape[0], layer.cout, x.shape[2], x.shape[3])}")
    n, cin, h, w = x.shape
    cout, _, k, _ = layer.weights.shape
    cols = _im2col(x, k)                                   # (N, H*W, Cin*k*k)
    gmat = grad_out.reshape(n, cout, h * w)                # (N, Cout, H*W)
    grad_w = np.einsum("nop,npq->oq", gmat, cols).reshape(cout, cin, k, k)
    grad_b = grad_out.sum(axis=(0, 2, 3))
    # grad wrt input = correlation of grad_out with the 180-degree-rotated,
    # channel-swapped kernel (exact for stride 1, same padding)
    w_flip = layer.weights[:, :, ::-1, ::-1].transpose(1, 0, 2, 3)
    grad_x = _conv_raw(grad_out, w_flip)
    return grad_x, grad_w, grad_b


def relu_forward(x):
    return np.maximum(0.0, np.asarray(x, dtype=np.float64))


def relu_backward(x, grad_out):
    """Subgradient at 0 is taken as 0."""
    return np.asarray(grad_out, dtype=np.float64) * (np.asarray(x) > 0)


def fc_forward(x, layer, ledger=None, layer_index=None):
    """x @ W.T + b over the batch; 4-D inputs are flattened per example."""
    x = np.asarray(x, dtype=np.float64)
    flat = x.reshape(x.shape[0], -1)
    if flat.shape[1] != layer.nin:
        raise ShapeError(f"fc expects {layer.nin} input features, got {flat.shape[1]} "
                         f"from input shape {x.shape}")
    out = flat @ layer.weights.T + layer.bias
    if ledger is not None:
        ledger.credit(layer_index, 2 * layer.nin * layer.nout * x.shape[0])
    return out


def fc_backward(x, layer, grad_out):
    x = np.asarray(x, dtype=np.float64)
    grad_out = np.asarray(grad_out, dtype=np.float64)
    flat = x.reshape(x.shape[0], -1)
    if grad_out.shape != (x.shape[0], layer.nout):
        raise ShapeError(f"grad_out shape {grad_out.shape} does not match fc output "
                         f"{(x.shape[0], layer.nout)}")
    grad_w = grad_out.T @ flat
    grad_b = grad_out.sum(axis=0)
    grad_x = (grad_out @ layer.weights).reshape(x.shape)
    return grad_x, grad_w, grad_b
