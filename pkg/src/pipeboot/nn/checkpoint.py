"""Binary network checkpoints.

Layout (all integers little-endian):
    magic "PBNN" | u16 version | u32 layer count
    per layer: u8 kind (1 conv2d, 2 relu, 3 fc)
        conv2d: u32 kernel, u32 cin, u32 cout, weights tensor, bias tensor
        fc:     u32 nin, u32 nout, weights tensor, bias tensor
    u32 skip count | per skip: u32 source, u32 target
    tensor: u32 ndim | u32 dims[] | float64 data, little-endian

Round-trips are bit-exact.
"""

import struct

import numpy as np

from .layers import Conv2d, FullyConnected, ReLU
from .network import Network

MAGIC = b"PBNN"
VERSION = 1
_KIND_TAGS = {"conv2d": 1, "relu": 2, "fc": 3}


def _pack_tensor(arr):
    arr = np.asarray(arr, dtype="<f8")
    parts = [struct.pack("<I", arr.ndim)]
    parts.append(struct.pack(f"<{arr.ndim}I", *arr.shape))
    parts.append(arr.tobytes())
    return b"".join(parts)


class _Reader:
    def __init__(self, blob):
        self.blob = blob
        self.pos = 0

    def take(self, fmt):
        size = struct.calcsize(fmt)
        vals = struct.unpack_from(fmt, self.blob, self.pos)
        self.pos += size
        return vals if len(vals) > 1 else vals[0]

    def tensor(self):
        ndim = self.take("<I")
        dims = self.take(f"<{ndim}I")
        dims = dims if isinstance(dims, tuple) else (dims,)
        count = int(np.prod(dims))
        arr = np.frombuffer(self.blob, dtype="<f8", count=count, offset=self.pos).reshape(dims)
        self.pos += count * 8
        return arr.astype(np.float64)


def network_to_bytes(net):
    parts = [MAGIC, struct.pack("<H", VERSION), struct.pack("<I", len(net.layers))]
    for layer in net.layers:
        parts.append(struct.pack("<B", _KIND_TAGS[layer.kind]))
        if layer.kind == "conv2d":
            parts.append(struct.pack("<III", layer.k, layer.cin, layer.cout))
            parts.append(_pack_tensor(layer.weights))
            parts.append(_pack_tensor(layer.bias))
        elif layer.kind == "fc":
            parts.append(struct.pack("<II", layer.nin, layer.nout))
            parts.append(_pack_tensor(layer.weights))
            parts.append(_pack_tensor(layer.bias))
    parts.append(struct.pack("<I", len(net.skips)))
    for i, j in net.skips:
        parts.append(struct.pack("<II", i, j))
    return b"".join(parts)


def network_from_bytes(blob):
    r = _Reader(blob)
    if r.take("<4s") != MAGIC:
        raise ValueError("not a PBNN checkpoint (bad magic)")
    version = r.take("<H")
    if version != VERSION:
        raise ValueError(f"unsupported checkpoint version {version}")
    layers = []
    for _ in range(r.take("<I")):
        tag = r.take("<B")
        if tag == 1:
            k, cin, cout = r.take("<III")
            weights = r.tensor()
            bias = r.tensor()
            layers.append(Conv2d(cin, cout, k, weights=weights, bias=bias))
        elif tag == 2:
            layers.append(ReLU())
        elif tag == 3:
            nin, nout = r.take("<II")
            weights = r.tensor()
            bias = r.tensor()
            layers.append(FullyConnected(nin, nout, weights=weights, bias=bias))
        else:
            raise ValueError(f"unknown layer tag {tag}")
    skips = []
    for _ in range(r.take("<I")):
        skips.append(tuple(r.take("<II")))
    return Network(layers, skips)


def save_network(net, path):
    with open(path, "wb") as fh:
        fh.write(network_to_bytes(net))


def load_network(path):
    with open(path, "rb") as fh:
        return network_from_bytes(fh.read())
