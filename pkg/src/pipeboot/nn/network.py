"""Layer sequences with additive skip connections and exact FLOP accounting.

A skip pair (i, j) with i < j means: the output of the i-th parameter-carrying
layer is added element-wise to the input of the j-th parameter-carrying layer
(activation-only layers do not advance the index). FLOPs count one multiply or
add as one operation; ReLU costs nothing and a skip addition costs one add per
element.
"""

import numpy as np

from ..errors import BadArchitecture, OddDepth, ShapeError
from ..rng import Rng
from .layers import (Conv2d, FullyConnected, ReLU, conv2d_backward,
                     conv2d_forward, fc_backward, fc_forward, relu_backward,
                     relu_forward)


class FlopLedger:
    """Per-layer multiply+add counts credited by forward passes."""

    def __init__(self, num_layers):
        self.per_layer = [0] * num_layers

    def credit(self, layer_index, ops):
        self.per_layer[layer_index] += ops

    def total(self):
        return sum(self.per_layer)


class Network:
    def __init__(self, layers, skips=()):
        self.layers = list(layers)
        self.skips = [(int(i), int(j)) for i, j in skips]
        self.flop_ledger = FlopLedger(len(self.layers))
        self._validate_skips()

    def _param_positions(self):
        """List index of each parameter-carrying layer, in order."""
        return [idx for idx, ly in enumerate(self.layers) if ly.has_params]

    def _validate_skips(self):
        n_param = len(self._param_positions())
        seen_src, seen_dst = set(), set()
        for i, j in self.skips:
            if not (1 <= i < j <= n_param):
                raise BadArchitecture(f"skip ({i}, {j}) out of range for {n_param} parameter layers")
            if i in seen_src or j in seen_dst:
                raise BadArchitecture(f"skip ({i}, {j}) reuses an endpoint")
            seen_src.add(i)
            seen_dst.add(j)

    def parameters(self):
        ps = []
        for ly in self.layers:
            ps.extend(ly.params())
        return ps


def build_skip_autoencoder(depth, channels, image_channels=1, kernel_size=3, seed=0):
    """Conv stack of even depth with skips {(i, depth+1-i) for odd i <= depth/2}.

    First half encodes image_channels -> channels, second half decodes back;
    ReLU follows every conv except the last. All convs are stride-1 same-padding
    so any input spatial shape is preserved.
    """
    if depth < 2 or depth % 2 != 0:
        raise OddDepth(f"depth must be an even integer >= 2, got {depth}")
    rng = Rng(seed)
    layers = []
    for i in range(1, depth + 1):
        cin = image_channels if i == 1 else channels
        cout = image_channels if i == depth else channels
        layers.append(Conv2d(cin, cout, kernel_size, rng=rng))
        if i < depth:
            layers.append(ReLU())
    skips = [(i, depth + 1 - i) for i in range(1, depth // 2 + 1, 2)]
    return Network(layers, skips)


def build_target_classifier(num_classes=10, conv_channels=64, fc_sizes=(384, 192, 10),
                            image_channels=3, image_hw=32, kernel_size=3, seed=0):
    """Two conv+ReLU stages then a fully-connected head.

    Defaults give conv(64)-relu-conv(64)-relu followed by 384/192/10 linear
    units on 3x32x32 inputs.
    """
    fc_sizes = list(fc_sizes)
    if not fc_sizes:
        raise BadArchitecture("fc_sizes must be non-empty")
    if fc_sizes[-1] != num_classes:
        raise BadArchitecture(f"last fc size {fc_sizes[-1]} must equal num_classes {num_classes}")
    rng = Rng(seed)
    layers = [
        Conv2d(image_channels, conv_channels, kernel_size, rng=rng),
        ReLU(),
        Conv2d(conv_channels, conv_channels, kernel_size, rng=rng),
        ReLU(),
    ]
    feats = conv_channels * image_hw * image_hw
    for size in fc_sizes[:-1]:
        layers.append(FullyConnected(feats, size, rng=rng))
        layers.append(ReLU())
        feats = size
    layers.append(FullyConnected(feats, fc_sizes[-1], rng=rng))
    return Network(layers)


def _layer_forward(layer, x, ledger, idx):
    if layer.kind == "conv2d":
        return conv2d_forward(x, layer, ledger, idx)
    if layer.kind == "relu":
        return relu_forward(x)
    if layer.kind == "fc":
        return fc_forward(x, layer, ledger, idx)
    raise ShapeError(f"unknown layer kind {layer.kind!r}")


def _layer_backward(layer, x, grad_out):
    """Returns (grad_input, param_grads or None)."""
    if layer.kind == "conv2d":
        gx, gw, gb = conv2d_backward(x, layer, grad_out)
        return gx, [gw, gb]
    if layer.kind == "relu":
        return relu_backward(x, grad_out), None
    gx, gw, gb = fc_backward(x, layer, grad_out)
    return gx, [gw, gb]


def network_run(net, x):
    """Forward pass keeping per-layer inputs for a later backward pass.

    Returns (output, trace); trace is the list of layer inputs after any skip
    addition was applied.
    """
    x = np.asarray(x, dtype=np.float64)
    skip_by_target = {j: i for i, j in net.skips}
    skip_sources = {i for i, _ in net.skips}
    cache = {}
    inputs = []
    ordinal = 0
    for idx, layer in enumerate(net.layers):
        if layer.has_params:
            ordinal += 1
            src = skip_by_target.get(ordinal)
            if src is not None:
                if cache[src].shape != x.shape:
                    raise ShapeError(f"skip ({src}, {ordinal}) adds shape {cache[src].shape} "
                                     f"to shape {x.shape}")
                x = x + cache[src]
                net.flop_ledger.credit(idx, x.size)
        inputs.append(x)
        x = _layer_forward(layer, x, net.flop_ledger, idx)
        if layer.has_params and ordinal in skip_sources:
            cache[ordinal] = x
    return x, inputs


def network_forward(net, x):
    """Forward pass only."""
    out, _ = network_run(net, x)
    return out


def network_backward(net, trace, grad_out):
    """Backpropagate grad_out through the traced forward pass.

    Returns (param_grads, grad_input) where param_grads[i] is None for
    activation layers and [grad_weights, grad_bias] otherwise. Skip gradients
    follow the sum rule: the skip target forwards its input gradient both to
    the sequential predecessor and to the skip source's output.
    """
    skip_by_target = {j: i for i, j in net.skips}
    skip_sources = {i for i, _ in net.skips}
    ordinals = []
    ordinal = 0
    for layer in net.layers:
        ordinal += layer.has_params
        ordinals.append(ordinal)
    param_grads = [None] * len(net.layers)
    pending = {}
    g = np.asarray(grad_out, dtype=np.float64)
    for idx in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[idx]
        if layer.has_params and ordinals[idx] in skip_sources and ordinals[idx] in pending:
            g = g + pending.pop(ordinals[idx])
        g, pg = _layer_backward(layer, trace[idx], g)
        param_grads[idx] = pg
        if layer.has_params:
            src = skip_by_target.get(ordinals[idx])
            if src is not None:
                pending[src] = pending.get(src, 0.0) + g
    return param_grads, g


def count_flops(net, input_shape):
    """Multiply+add count of one forward pass on a single example.

    input_shape is per-example, (C, H, W) or (features,). Convs cost
    2*k^2*Cin*Cout*H*W, fully-connected 2*in*out, ReLU 0, and each skip
    addition one add per element of the target input.
    """
    shape = tuple(int(d) for d in input_shape)
    skip_by_target = {j: i for i, j in net.skips}
    total = 0
    ordinal = 0
    for layer in net.layers:
        if layer.has_params:
            ordinal += 1
            if ordinal in skip_by_target:
                total += int(np.prod(shape))
        total += layer.flops(shape)
        shape = layer.output_shape(shape)
    return total
