"""Image quality metrics and the result-table format.

SSIM follows the classic single-scale recipe: an 11x11 Gaussian window
(sigma 1.5) slides over every fully-valid position, local means, variances
and covariance are computed under the window weights, and the per-window
scores

    (2 mu_a mu_b + c1)(2 cov + c2) / ((mu_a^2 + mu_b^2 + c1)(var_a + var_b + c2))

are averaged. Identical inputs score exactly 1.0 because both operands flow
through the same floating-point expressions; scores can be negative for
anticorrelated patches and are not clamped.

Result rows serialize to CSV with the fixed header
task,method,ratio_x,metric,value,flops. Floats are written with repr so a
written file parses back to the same bits, and rows are sorted canonically,
making equal result sets byte-identical.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import DimensionMismatch, EmptyInput, NegativeSigma, TooSmall


@dataclass(frozen=True)
class SsimConfig:
    window_size: int = 11
    sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    data_range: float = 255.0

    def __post_init__(self):
        if self.window_size < 1 or self.window_size % 2 == 0:
            raise ValueError(f"window_size must be odd and >= 1, got {self.window_size}")
        if self.sigma <= 0:
            raise NegativeSigma(f"sigma must be positive, got {self.sigma}")
        if self.data_range <= 0:
            raise ValueError(f"data_range must be positive, got {self.data_range}")


@lru_cache(maxsize=None)
def gaussian_window(config):
    """Normalized Gaussian weights for config's window; sums to 1."""
    half = config.window_size // 2
    coords = np.arange(-half, half + 1, dtype=np.float64)
    g = np.exp(-(coords[:, None] ** 2 + coords[None, :] ** 2) / (2.0 * config.sigma ** 2))
    g /= g.sum()
    g.flags.writeable = False
    return g


def _as_gray(image):
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D grayscale image, got shape {arr.shape}")
    return arr


def ssim(a, b, config=None):
    """Mean structural similarity of two grayscale images over valid windows."""
    if config is None:
        config = SsimConfig()
    a = _as_gray(a)
    b = _as_gray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"image shapes {a.shape} and {b.shape} differ")
    k = config.window_size
    if a.shape[0] < k or a.shape[1] < k:
        raise TooSmall(f"image {a.shape} is smaller than the {k}x{k} window")

    w = gaussian_window(config)
    c1 = (config.k1 * config.data_range) ** 2
    c2 = (config.k2 * config.data_range) ** 2

    def windowed_mean(img):
        views = sliding_window_view(img, (k, k))
        return np.einsum("hwij,ij->hw", views, w)

    mu_a = windowed_mean(a)
    mu_b = windowed_mean(b)
    var_a = windowed_mean(a * a) - mu_a * mu_a
    var_b = windowed_mean(b * b) - mu_b * mu_b
    cov = windowed_mean(a * b) - mu_a * mu_b

    num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return float(np.mean(num / den))


def psnr(a, b, peak=255.0):
    """Peak signal-to-noise ratio in dB; math.inf for identical images."""
    a = _as_gray(a)
    b = _as_gray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"image shapes {a.shape} and {b.shape} differ")
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


def accuracy(predicted, actual):
    """Fraction of positions where the two label arrays agree."""
    predicted = np.asarray(predicted)
    actual = np.asarray(actual)
    if predicted.shape != actual.shape:
        raise DimensionMismatch(f"label shapes {predicted.shape} and {actual.shape} differ")
    if predicted.size == 0:
        raise EmptyInput("no labels to score")
    return float(np.mean(predicted == actual))


CSV_HEADER = "task,method,ratio_x,metric,value,flops"


@dataclass(frozen=True)
class MetricRow:
    """One measurement: what was run, at which ground-truth ratio, what it scored."""

    task: str
    method: str
    ratio_x: Optional[float]
    metric: str
    value: float
    flops: int


def _row_key(row):
    return (row.task, row.method, row.ratio_x is not None,
            row.ratio_x if row.ratio_x is not None else 0.0, row.metric)


def rows_to_csv(rows):
    """Canonical CSV text: fixed header, sorted rows, repr-exact floats."""
    lines = [CSV_HEADER]
    for row in sorted(rows, key=_row_key):
        ratio = "" if row.ratio_x is None else repr(float(row.ratio_x))
        lines.append(",".join([row.task, row.method, ratio, row.metric,
                               repr(float(row.value)), str(int(row.flops))]))
    return "\n".join(lines) + "\n"


def flops_report(rows):
    """Aggregate measurement rows into the canonical quality-vs-cost table.

    The table is the CSV text of rows_to_csv: one line per row, sorted by
    (task, method, ratio), floats serialized for exact round-trip.
    """
    return rows_to_csv(rows)


def rows_from_csv(text):
    """Parse rows_to_csv output back into MetricRow objects."""
    lines = [ln for ln in text.splitlines() if ln]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"expected header {CSV_HEADER!r}")
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 6:
            raise ValueError(f"expected 6 fields, got {len(parts)}: {ln!r}")
        task, method, ratio, metric, value, flops = parts
        rows.append(MetricRow(task=task, method=method,
                              ratio_x=None if ratio == "" else float(ratio),
                              metric=metric, value=float(value), flops=int(flops)))
    return rows
