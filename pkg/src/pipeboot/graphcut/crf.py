"""Piecewise-constant denoising as MAP inference on a 4-connected grid.

A labeling assigns each pixel one of K representative gray values. Its
energy is

    E = sum_p min((value[f_p] - I_p)^2, data_cap)
      + sum_{(p,q) adjacent} smoothness_weight * min(|value[f_p] - value[f_q]|, smoothness_cap)

and is minimized by cycles of expansion moves, each solved exactly as a
minimum cut. The expansion construction requires the smoothness term to be
a metric over labels (truncated linear distance always is); swap moves only
need a semimetric.

Operation counts follow the maxflow convention: one op per arithmetic or
comparison step on pixel/energy values, bookkeeping free. Graph shape and
arc order are fixed functions of the inputs, so results are deterministic.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import (BadParams, DimensionMismatch, EmptyInput,
                      LabelOutOfRange, NonMetricSmoothness, SameLabels)
from .maxflow import SINK, SOURCE, FlowGraph


@dataclass(frozen=True)
class CrfParams:
    """Energy definition: label set plus data / smoothness truncation.

    label_values defaults to num_labels gray levels evenly spaced over
    [0, 255]. data_cap = inf leaves the quadratic data term untruncated.
    """

    num_labels: int = 32
    smoothness_weight: float = 4.0
    smoothness_cap: float = 32.0
    data_cap: float = math.inf
    label_values: tuple = None

    def __post_init__(self):
        if self.label_values is None:
            if self.num_labels < 2:
                raise BadParams(f"need at least 2 labels, got {self.num_labels}")
            values = tuple(float(v) for v in np.linspace(0.0, 255.0, self.num_labels))
            object.__setattr__(self, "label_values", values)
        else:
            values = tuple(float(v) for v in self.label_values)
            object.__setattr__(self, "label_values", values)
            if len(values) < 2:
                raise BadParams(f"need at least 2 labels, got {len(values)}")
            if len(values) != self.num_labels:
                raise BadParams(f"num_labels {self.num_labels} does not match "
                                f"{len(values)} label_values")
        if self.smoothness_weight < 0:
            raise BadParams(f"smoothness_weight must be >= 0, got {self.smoothness_weight}")
        if self.smoothness_cap < 0:
            raise BadParams(f"smoothness_cap must be >= 0, got {self.smoothness_cap}")
        if self.data_cap <= 0:
            raise BadParams(f"data_cap must be positive, got {self.data_cap}")


@lru_cache(maxsize=None)
def _values(params):
    arr = np.array(params.label_values, dtype=np.float64)
    arr.flags.writeable = False
    return arr

@lru_cache(maxsize=None)
def _pair_costs(params):
    """K x K matrix of smoothness_weight * min(|value_a - value_b|, cap)."""
    lv = _values(params)
    mat = params.smoothness_weight * np.minimum(
        np.abs(lv[:, None] - lv[None, :]), params.smoothness_cap)
    mat.flags.writeable = False
    return mat


@lru_cache(maxsize=None)
def smoothness_is_metric(params):
    """True when the pair cost is a (pseudo)metric over labels.

    Checks symmetry, zero diagonal, non-negativity and the triangle
    inequality over all label triples. Expansion moves require this;
    truncated linear costs always qualify.
    """
    v = _pair_costs(params)
    if (v < 0).any() or (np.diag(v) != 0).any() or not np.array_equal(v, v.T):
        return False
    slack = 1e-9 * max(float(v.max()), 1.0)
    return bool((v[:, None, :] <= v[:, :, None] + v[None, :, :] + slack).all())


@lru_cache(maxsize=None)
def _neighbor_pairs(shape):
    """Raveled (p, q) index arrays for right and down 4-neighbor pairs."""
    h, w = shape
    idx = np.arange(h * w).reshape(h, w)
    ps = np.concatenate([idx[:, :-1].ravel(), idx[:-1, :].ravel()])
    qs = np.concatenate([idx[:, 1:].ravel(), idx[1:, :].ravel()])
    return ps, qs


def _as_image(image):
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D grayscale image, got shape {arr.shape}")
    if arr.size == 0:
        raise EmptyInput("image has no pixels")
    return arr


def _as_labeling(labels, image, params):
    arr = np.asarray(labels)
    if arr.shape != image.shape:
        raise DimensionMismatch(f"labeling shape {arr.shape} does not match "
                                f"image shape {image.shape}")
    arr = arr.astype(np.int64)
    if arr.size and (arr.min() < 0 or arr.max() >= params.num_labels):
        raise LabelOutOfRange(f"labels must lie in [0, {params.num_labels})")
    return arr


def _data_costs(image_flat, value, params):
    diff = value - image_flat
    return np.minimum(diff * diff, params.data_cap)


def energy(labels, image, params):
    """(total, data, smoothness) energy of a labeling; total = data + smoothness."""
    image = _as_image(image)
    labels = _as_labeling(labels, image, params)
    lv = _values(params)
    flat = labels.ravel()
    data = float(_data_costs(image.ravel(), lv[flat], params).sum())
    ps, qs = _neighbor_pairs(image.shape)
    smooth = float(_pair_costs(params)[flat[ps], flat[qs]].sum())
    return data + smooth, data, smooth


def _energy_ops(shape):
    # subtract, square/scale, accumulate: 3 per pixel and per neighbor pair
    h, w = shape
    return 3 * h * w + 3 * (2 * h * w - h - w)


def nearest_labeling(image, params):
    """Initial labeling: each pixel takes the label value closest to it."""
    image = _as_image(image)
    lv = _values(params)
    return np.abs(image[:, :, None] - lv[None, None, :]).argmin(axis=2).astype(np.int64)


def expansion_move(labels, image, alpha, params):
    """Best single alpha-expansion: each pixel keeps its label or takes alpha.

    Solved exactly as a minimum cut, so the returned labeling minimizes the
    energy over that move space and never increases it. Returns
    (new_labels, ops).
    """
    image = _as_image(image)
    labels = _as_labeling(labels, image, params)
    alpha = int(alpha)
    if not 0 <= alpha < params.num_labels:
        raise LabelOutOfRange(f"alpha {alpha} outside [0, {params.num_labels})")
    if not smoothness_is_metric(params):
        raise NonMetricSmoothness("expansion moves need a metric smoothness cost")

    lv = _values(params)
    vmat = _pair_costs(params)
    flat = labels.ravel()
    img = image.ravel()
    n = img.shape[0]
    pix = np.arange(n, dtype=np.int64)

    # unary terms: cut to the sink side = take alpha, source side = keep
    d_alpha = _data_costs(img, lv[alpha], params)
    d_keep = _data_costs(img, lv[flat], params)
    d_keep[flat == alpha] = np.inf  # already alpha: keeping and taking coincide
    ops = 6 * n

    ps, qs = _neighbor_pairs(image.shape)
    fp, fq = flat[ps], flat[qs]
    same = fp == fq
    sp, sq, sf = ps[same], qs[same], fp[same]
    dp, dq = ps[~same], qs[~same]
    dfp, dfq = fp[~same], fq[~same]
    n_aux = dp.shape[0]
    aux = n + np.arange(n_aux, dtype=np.int64)

    g = FlowGraph(n + n_aux)
    g.add_arcs(np.full(n, SOURCE), pix, d_alpha)
    g.add_arcs(pix, np.full(n, SINK), d_keep)
    # equal-label pairs: plain undirected edge costing V(f, alpha) when split
    w_same = vmat[sf, alpha]
    g.add_arcs(sp, sq, w_same)
    g.add_arcs(sq, sp, w_same)
    # unequal-label pairs: auxiliary node carries the keep/keep cost
    w_pa = vmat[dfp, alpha]
    w_aq = vmat[alpha, dfq]
    g.add_arcs(dp, aux, w_pa)
    g.add_arcs(aux, dp, w_pa)
    g.add_arcs(aux, dq, w_aq)
    g.add_arcs(dq, aux, w_aq)
    g.add_arcs(aux, np.full(n_aux, SINK), vmat[dfp, dfq])

    result = g.max_flow()
    ops += result.ops
    new_flat = np.where(result.source_side[:n], flat, alpha)
    return new_flat.reshape(image.shape), ops


def swap_move(labels, image, alpha, beta, params):
    """Best alpha-beta swap: pixels labeled alpha or beta may trade sides.

    Exact via minimum cut for any semimetric smoothness. Returns
    (new_labels, ops).
    """
    image = _as_image(image)
    labels = _as_labeling(labels, image, params)
    alpha, beta = int(alpha), int(beta)
    for lab in (alpha, beta):
        if not 0 <= lab < params.num_labels:
            raise LabelOutOfRange(f"label {lab} outside [0, {params.num_labels})")
    if alpha == beta:
        raise SameLabels(f"swap needs two distinct labels, got {alpha} twice")

    lv = _values(params)
    vmat = _pair_costs(params)
    flat = labels.ravel()
    img = image.ravel()
    active = (flat == alpha) | (flat == beta)
    n_active = int(active.sum())
    if n_active == 0:
        return labels.copy(), 0

    node_of = np.full(flat.shape[0], -1, dtype=np.int64)
    node_of[active] = np.arange(n_active)
    u_alpha = _data_costs(img[active], lv[alpha], params)
    u_beta = _data_costs(img[active], lv[beta], params)
    ops = 6 * n_active

    ps, qs = _neighbor_pairs(image.shape)
    both = active[ps] & active[qs]
    # pairs straddling the active set fold into the unary terms
    for ends, mates in ((ps, qs), (qs, ps)):
        edge = active[ends] & ~active[mates]
        at = node_of[ends[edge]]
        np.add.at(u_alpha, at, vmat[alpha, flat[mates[edge]]])
        np.add.at(u_beta, at, vmat[beta, flat[mates[edge]]])
        ops += 2 * int(edge.sum())

    g = FlowGraph(n_active)
    nodes = np.arange(n_active, dtype=np.int64)
    # source side = alpha, sink side = beta
    g.add_arcs(np.full(n_active, SOURCE), nodes, u_beta)
    g.add_arcs(nodes, np.full(n_active, SINK), u_alpha)
    bp, bq = node_of[ps[both]], node_of[qs[both]]
    w = np.full(bp.shape[0], vmat[alpha, beta])
    g.add_arcs(bp, bq, w)
    g.add_arcs(bq, bp, w)

    result = g.max_flow()
    ops += result.ops
    new_flat = flat.copy()
    new_flat[active] = np.where(result.source_side, alpha, beta)
    return new_flat.reshape(image.shape), ops


def alpha_expansion(image, params, init=None, max_cycles=20):
    """Cycle expansion moves over all labels until no move lowers the energy.

    Starts from the nearest-value labeling unless init is given. Returns
    (labels, ops) where ops totals move and energy-evaluation work.
    """
    image = _as_image(image)
    labels = nearest_labeling(image, params) if init is None \
        else _as_labeling(init, image, params)
    current, _, _ = energy(labels, image, params)
    ops = _energy_ops(image.shape)
    for _ in range(max_cycles):
        improved = False
        for alpha in range(params.num_labels):
            moved, move_ops = expansion_move(labels, image, alpha, params)
            ops += move_ops
            candidate, _, _ = energy(moved, image, params)
            ops += _energy_ops(image.shape)
            if candidate < current:
                labels, current, improved = moved, candidate, True
        if not improved:
            break
    return labels, ops


def denoise(image, params=None):
    """Map a noisy grayscale image to its minimum-energy piecewise-constant fit.

    Returns (denoised, ops); denoised holds label values as float64.
    """
    if params is None:
        params = CrfParams()
    labels, ops = alpha_expansion(image, params)
    return _values(params)[labels], ops
