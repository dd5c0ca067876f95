"""Training objectives: mean squared error and softmax cross-entropy."""

import numpy as np

from ..errors import LabelOutOfRange, ShapeError


def mse_loss(pred, target):
    """Mean of squared differences; returns (loss, grad wrt pred)."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ShapeError(f"mse shapes differ: {pred.shape} vs {target.shape}")
    diff = pred - target
    loss = float(np.mean(diff * diff))
    grad = 2.0 * diff / diff.size
    return loss, grad


def softmax_xent(logits, labels):
    """Mean cross-entropy over the batch with log-sum-exp stabilization.

    Returns (loss, grad wrt logits) where grad = (softmax - onehot) / N.
    """
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if logits.ndim != 2:
        raise ShapeError(f"logits must be (N, K), got shape {logits.shape}")
    n, k = logits.shape
    if labels.shape != (n,):
        raise ShapeError(f"labels must be ({n},), got shape {labels.shape}")
    if labels.size and (labels.min() < 0 or labels.max() >= k):
        raise LabelOutOfRange(f"labels must lie in [0, {k})")
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1))
    loss = float(np.mean(log_z - shifted[np.arange(n), labels]))
    soft = np.exp(shifted) / np.exp(shifted).sum(axis=1, keepdims=True)
    soft[np.arange(n), labels] -= 1.0
    return loss, soft / n
