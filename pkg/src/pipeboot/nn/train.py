"""Mini-batch SGD with momentum, bit-deterministic given the seed."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyDataset
from ..rng import Rng
from .losses import mse_loss, softmax_xent
from .network import network_backward, network_run


@dataclass
class SgdConfig:
    learning_rate: float = 1e-3
    momentum: float = 0.9
    batch_size: int = 16
    epochs: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if not 0 <= self.momentum < 1:
            raise ValueError(f"momentum must lie in [0, 1), got {self.momentum}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")


@dataclass
class TrainLog:
    epoch_losses: list = field(default_factory=list)

    @property
    def final_loss(self):
        return self.epoch_losses[-1]


def _stack_targets(examples, loss_kind):
    if loss_kind == "softmax_xent":
        return np.array([ex.target for ex in examples], dtype=np.int64)
    return np.stack([np.asarray(ex.target, dtype=np.float64) for ex in examples])


def train(net, dataset, loss_kind, cfg):
    """Train net in place; returns a TrainLog of per-epoch mean losses.

    loss_kind is "mse" or "softmax_xent". The epoch shuffle, batch order and
    gradient reduction order are all fixed functions of cfg.seed, so repeated
    runs produce bit-identical parameters.
    """
    examples = list(dataset.examples if hasattr(dataset, "examples") else dataset)
    if not examples:
        raise EmptyDataset("cannot train on an empty dataset")
    if loss_kind not in ("mse", "softmax_xent"):
        raise ValueError(f"unknown loss kind {loss_kind!r}")
    loss_fn = mse_loss if loss_kind == "mse" else softmax_xent

    inputs = np.stack([np.asarray(ex.input, dtype=np.float64) for ex in examples])
    targets = _stack_targets(examples, loss_kind)
    n = len(examples)
    rng = Rng(cfg.seed)
    params = net.parameters()
    velocity = [np.zeros_like(p) for p in params]

    log = TrainLog()
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        loss_sum = 0.0
        for start in range(0, n, cfg.batch_size):
            batch = order[start:start + cfg.batch_size]
            out, trace = network_run(net, inputs[batch])
            loss, grad = loss_fn(out, targets[batch])
            loss_sum += loss * len(batch)
            param_grads, _ = network_backward(net, trace, grad)
            flat_grads = []
            for pg in param_grads:
                if pg is not None:
                    flat_grads.extend(pg)
            for p, v, g in zip(params, velocity, flat_grads):
                v *= cfg.momentum
                v -= cfg.learning_rate * g
                p += v
        log.epoch_losses.append(loss_sum / n)
    return log
