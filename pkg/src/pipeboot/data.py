"""Dataset containers, synthetic image generators and on-disk formats.

Synthetic generators derive one child random stream per example index, so
example i is identical no matter how many examples are requested. Grayscale
images are float64 arrays in [0, 255]; classification inputs carry a leading
channel axis.

Two binary formats are supported: 8-bit binary PGM (P5, maxval 255) for
single images, and the record format used by the common 32x32 color
benchmark batches: 3073-byte records of one label byte followed by 3072
bytes of red, green and blue planes in row-major order.
"""

from dataclasses import dataclass, field
from typing import Any, List

import numpy as np

from .errors import (BadParams, EmptyDataset, LabelOutOfRange, MalformedHeader,
                     NegativeSigma, PatchTooLarge, TruncatedFile,
                     UnsupportedMaxval)
from .rng import Rng

LABEL_SOURCES = ("ground_truth", "imputed")
DATASET_ROLES = ("U_unlabeled", "L_groundtruth", "S_imputed", "mixed",
                 "test", "phi", "psi")


@dataclass
class LabeledExample:
    """One training pair; target is an array (regression) or an int label.

    label_source records whether the target came with the data or was
    produced by a labeling pipeline.
    """

    input: Any
    target: Any
    label_source: str = "ground_truth"

    def __post_init__(self):
        if self.label_source not in LABEL_SOURCES:
            raise ValueError(f"label_source must be one of {LABEL_SOURCES}, "
                             f"got {self.label_source!r}")


@dataclass
class Dataset:
    examples: List[LabeledExample] = field(default_factory=list)
    role: Any = None

    def __post_init__(self):
        if self.role is None:
            return
        if self.role not in DATASET_ROLES:
            raise ValueError(f"role must be one of {DATASET_ROLES}, got {self.role!r}")
        if self.role == "U_unlabeled":
            if any(ex.target is not None for ex in self.examples):
                raise ValueError("role U_unlabeled requires targets of None")
        elif self.role == "L_groundtruth":
            if any(ex.label_source != "ground_truth" for ex in self.examples):
                raise ValueError("role L_groundtruth requires ground_truth examples")
        elif self.role == "S_imputed":
            if any(ex.label_source != "imputed" for ex in self.examples):
                raise ValueError("role S_imputed requires imputed examples")

    def __len__(self):
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    def __getitem__(self, i):
        return self.examples[i]


def add_gaussian_noise(image, sigma, rng):
    """image + N(0, sigma^2) per pixel, clamped back into [0, 255]."""
    if sigma < 0:
        raise NegativeSigma(f"noise sigma must be >= 0, got {sigma}")
    image = np.asarray(image, dtype=np.float64)
    noisy = image + sigma * rng.normal(image.size).reshape(image.shape)
    return np.clip(noisy, 0.0, 255.0)


def sample_patches(image, patch_hw, count, rng):
    """count square patches cut at uniform positions; list of (hw, hw) arrays."""
    image = np.asarray(image, dtype=np.float64)
    h, w = image.shape
    if patch_hw > h or patch_hw > w:
        raise PatchTooLarge(f"{patch_hw}x{patch_hw} patch does not fit in {h}x{w} image")
    ys = rng.randint(0, h - patch_hw + 1, count)
    xs = rng.randint(0, w - patch_hw + 1, count)
    return [image[y:y + patch_hw, x:x + patch_hw].copy() for y, x in zip(ys, xs)]


DEFAULT_PALETTE = (0.0, 85.0, 170.0, 255.0)  # linspace(0, 255, 4)


def synth_shapes(count, size=32, num_levels=4, seed=0, max_shapes=5):
    """Piecewise-constant images: background plus filled rectangles and discs,
    intensities from num_levels values evenly spaced over [0, 255]. Returns a
    list of (size, size) float64 arrays."""
    if size < 8:
        raise BadParams(f"size must be >= 8, got {size}")
    if num_levels < 2:
        raise BadParams(f"num_levels must be >= 2, got {num_levels}")
    palette = np.linspace(0.0, 255.0, num_levels)
    stream = Rng(seed)
    images = []
    for i in range(count):
        r = stream.split(i)
        img = np.full((size, size), palette[r.randint(0, num_levels)])
        yy, xx = np.mgrid[0:size, 0:size]
        for _ in range(r.randint(2, max_shapes + 1)):
            color = palette[r.randint(0, num_levels)]
            if r.uniform() < 0.5:
                y0, y1 = sorted((r.randint(0, size), r.randint(0, size)))
                x0, x1 = sorted((r.randint(0, size), r.randint(0, size)))
                img[y0:y1 + 1, x0:x1 + 1] = color
            else:
                cy, cx = r.randint(0, size), r.randint(0, size)
                rad = r.randint(2, max(3, size // 3))
                img[(yy - cy) ** 2 + (xx - cx) ** 2 <= rad * rad] = color
        images.append(img)
    return images


def synth_classification(count, size=16, num_classes=4, seed=0, thickness=1.6):
    """Oriented-bar classification set: class k is a bright bar rotated by
    k * 180/num_classes degrees, with jittered position. Labels cycle through
    the classes so any prefix is nearly balanced. Inputs are (1, size, size)."""
    if num_classes < 2:
        raise BadParams(f"num_classes must be >= 2, got {num_classes}")
    stream = Rng(seed)
    examples = []
    for i in range(count):
        cls = i % num_classes
        r = stream.split(i)
        angle = np.pi * cls / num_classes
        # distance from the line through the jittered center along the angle
        cy = (size - 1) / 2.0 + (r.uniform() - 0.5) * 3.0
        cx = (size - 1) / 2.0 + (r.uniform() - 0.5) * 3.0
        yy, xx = np.mgrid[0:size, 0:size]
        dist = np.abs(-np.sin(angle) * (xx - cx) + np.cos(angle) * (yy - cy))
        img = np.where(dist <= thickness, 255.0, 0.0)
        img = add_gaussian_noise(img, 8.0, r)
        examples.append(LabeledExample(input=img[None, :, :], target=cls))
    return Dataset(examples)


def split_examples(dataset, fraction, rng=None):
    """Split into (first, second) Datasets; the first takes round(fraction * n)
    examples (half rounds up). A rng shuffles assignment, otherwise order is kept."""
    examples = list(dataset)
    n = len(examples)
    if n == 0:
        raise EmptyDataset("cannot split an empty dataset")
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must lie in [0, 1], got {fraction}")
    take = int(np.floor(fraction * n + 0.5))
    order = rng.permutation(n) if rng is not None else np.arange(n)
    first = [examples[i] for i in order[:take]]
    second = [examples[i] for i in order[take:]]
    return Dataset(first), Dataset(second)


def save_pgm(path, image):
    """Write a grayscale image as binary PGM (P5, maxval 255).

    Values are clamped to [0, 255] and rounded half away from zero.
    """
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 2:
        raise ValueError(f"PGM images are 2-D, got shape {image.shape}")
    pixels = np.floor(np.clip(image, 0.0, 255.0) + 0.5).astype(np.uint8)
    h, w = pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(pixels.tobytes())


def _pgm_tokens(data):
    """Header tokens of a PGM byte stream, honoring # comments; yields
    (token, offset_past_token)."""
    i = 0
    n = len(data)
    while i < n:
        c = data[i:i + 1]
        if c == b"#":
            while i < n and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
        elif c.isspace():
            i += 1
        else:
            j = i
            while j < n and not data[j:j + 1].isspace() and data[j:j + 1] != b"#":
                j += 1
            yield data[i:j], j
            i = j


def load_pgm(path):
    """Read a binary PGM (P5, maxval 255) into a float64 (h, w) array."""
    with open(path, "rb") as fh:
        data = fh.read()
    tokens = _pgm_tokens(data)
    try:
        magic, _ = next(tokens)
        (wtok, _), (htok, _), (mtok, offset) = next(tokens), next(tokens), next(tokens)
    except StopIteration:
        raise MalformedHeader("PGM header ended early") from None
    if magic != b"P5":
        raise MalformedHeader(f"expected P5 magic, got {magic!r}")
    try:
        w, h, maxval = int(wtok), int(htok), int(mtok)
    except ValueError:
        raise MalformedHeader("PGM header fields must be integers") from None
    if w <= 0 or h <= 0:
        raise MalformedHeader(f"bad PGM dimensions {w}x{h}")
    if maxval != 255:
        raise UnsupportedMaxval(f"only maxval 255 is supported, got {maxval}")
    start = offset + 1  # single whitespace byte separates header from raster
    raster = data[start:start + w * h]
    if len(raster) < w * h:
        raise TruncatedFile(f"expected {w * h} raster bytes, found {len(raster)}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(h, w).astype(np.float64)


CIFAR_RECORD_BYTES = 3073
CIFAR_IMAGE_HW = 32
CIFAR_CLASSES = 10


def save_cifar10_batch(path, images, labels):
    """Write (N, 3, 32, 32) images and integer labels as 3073-byte records."""
    images = np.asarray(images, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if images.ndim != 4 or images.shape[1:] != (3, CIFAR_IMAGE_HW, CIFAR_IMAGE_HW):
        raise ValueError(f"expected (N, 3, 32, 32) images, got {images.shape}")
    if labels.shape != (images.shape[0],):
        raise ValueError(f"need one label per image, got {labels.shape}")
    if labels.size and (labels.min() < 0 or labels.max() >= CIFAR_CLASSES):
        raise LabelOutOfRange(f"labels must lie in [0, {CIFAR_CLASSES})")
    pixels = np.floor(np.clip(images, 0.0, 255.0) + 0.5).astype(np.uint8)
    with open(path, "wb") as fh:
        for img, lab in zip(pixels, labels):
            fh.write(bytes([int(lab)]))
            fh.write(img.tobytes())


def load_cifar10_batch(path):
    """Read 3073-byte records into ((N, 3, 32, 32) float64, (N,) int64)."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) % CIFAR_RECORD_BYTES != 0:
        raise TruncatedFile(f"file length {len(data)} is not a multiple of "
                            f"{CIFAR_RECORD_BYTES}-byte records")
    records = np.frombuffer(data, dtype=np.uint8).reshape(-1, CIFAR_RECORD_BYTES)
    labels = records[:, 0].astype(np.int64)
    if labels.size and labels.max() >= CIFAR_CLASSES:
        raise LabelOutOfRange(f"label byte {labels.max()} outside [0, {CIFAR_CLASSES})")
    images = records[:, 1:].reshape(-1, 3, CIFAR_IMAGE_HW, CIFAR_IMAGE_HW).astype(np.float64)
    return images, labels
