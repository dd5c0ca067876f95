"""Experiment drivers: train surrogates against a black-box labeler and
report quality next to computational cost.

Three drivers cover the workflow:

- run_denoise_experiment: a graph-cut denoiser labels noisy images; a small
  skip autoencoder is trained on those imputed pairs and scored against the
  denoiser itself (metric: mean test SSIM).
- run_ratio_sweep: at each ground-truth ratio x, train one model on the
  ground-truth portion alone (gt_only) and one on the ground-truth plus
  imputed blend (bootstrapped), for either the denoise or classify task.
- run_classify_experiment: a teacher network trained on a labeled split
  stands in for the black box; a student trained on teacher-labeled data is
  scored against it (metric: test accuracy).

Every random choice derives from the config seed through fixed stream keys,
so a rerun with the same config reproduces results bit for bit. Surrogate
inputs and targets are scaled to [0, 1]; grayscale image values elsewhere
stay in [0, 255].
"""

from dataclasses import dataclass, field

import numpy as np

from .bootstrap import (BlackBoxPipeline, MixConfig, impute_labels,
                        mix_datasets)
from .data import (Dataset, LabeledExample, add_gaussian_noise,
                   split_examples, synth_classification, synth_shapes)
from .errors import ConfigError
from .graphcut import CrfParams, denoise
from .metrics import MetricRow, accuracy, ssim
from .nn import (SgdConfig, build_skip_autoencoder, build_target_classifier,
                 count_flops, network_forward, train)
from .rng import Rng, derive_seed

# stream keys for deriving independent child seeds from a config seed
(_KEY_CLEAN, _KEY_NOISE, _KEY_PATCH, _KEY_INIT, _KEY_TRAIN, _KEY_DATA,
 _KEY_SPLIT) = range(1, 8)


@dataclass
class DenoiseConfig:
    train_count: int = 64
    test_count: int = 16
    image_hw: int = 32
    noise_sigma: float = 20.0
    crf: CrfParams = field(default_factory=lambda: CrfParams(
        num_labels=16, smoothness_weight=12.0))
    depth: int = 4
    channels: int = 16
    patch_hw: int = 16
    patches_per_image: int = 32
    sgd: SgdConfig = field(default_factory=lambda: SgdConfig(
        learning_rate=0.05, momentum=0.9, batch_size=16, epochs=90))
    seed: int = 0


@dataclass
class SweepConfig:
    task: str = "denoise"
    ratios: tuple = (0.02, 0.25, 1.0)
    seed: int = 0
    # denoise task fields
    pool_count: int = 48
    gt_count: int = 48
    test_count: int = 12
    image_hw: int = 32
    noise_sigma: float = 20.0
    crf: CrfParams = field(default_factory=lambda: CrfParams(
        num_labels=16, smoothness_weight=16.0))
    depth: int = 4
    channels: int = 8
    patch_hw: int = 16
    patches_per_image: int = 8
    sgd: SgdConfig = field(default_factory=lambda: SgdConfig(
        learning_rate=0.02, momentum=0.9, batch_size=16, epochs=45))
    # classify task fields
    num_classes: int = 4
    class_hw: int = 16
    teacher_count: int = 64
    conv_channels: int = 8
    fc_sizes: tuple = (32, 4)
    teacher_sgd: SgdConfig = field(default_factory=lambda: SgdConfig(
        learning_rate=0.02, momentum=0.9, batch_size=16, epochs=45))

    def __post_init__(self):
        if self.task not in ("denoise", "classify"):
            raise ConfigError(f"task must be 'denoise' or 'classify', got {self.task!r}")
        if not self.ratios or any(not 0.0 < r <= 1.0 for r in self.ratios):
            raise ConfigError(f"ratios must lie in (0, 1], got {self.ratios}")


@dataclass
class ClassifyConfig:
    num_classes: int = 4
    image_hw: int = 16
    train_count: int = 128
    test_count: int = 64
    teacher_uses_all: bool = False
    conv_channels: int = 8
    fc_sizes: tuple = (32, 4)
    sgd: SgdConfig = field(default_factory=lambda: SgdConfig(
        learning_rate=0.05, momentum=0.9, batch_size=16, epochs=30))
    seed: int = 0


@dataclass
class ExperimentResult:
    rows: list
    artifacts: dict = field(default_factory=dict)


# ---------------------------------------------------------------- denoise --

def _noisy_copies(images, sigma, seed):
    stream = Rng(seed)
    return [add_gaussian_noise(img, sigma, stream.split(i))
            for i, img in enumerate(images)]


def _paired_patches(pairs, patch_hw, per_image, seed):
    """Aligned patch pairs cut at shared positions from (input, target) images."""
    stream = Rng(seed)
    out = []
    for i, (a, b) in enumerate(pairs):
        r = stream.split(i)
        h, w = a.shape
        ys = r.randint(0, h - patch_hw + 1, per_image)
        xs = r.randint(0, w - patch_hw + 1, per_image)
        for y, x in zip(ys, xs):
            out.append((a[y:y + patch_hw, x:x + patch_hw],
                        b[y:y + patch_hw, x:x + patch_hw]))
    return out


def _patch_dataset(pairs, patch_hw, per_image, seed):
    """Unit-scaled single-channel training set from aligned image pairs."""
    examples = [LabeledExample(input=a[None] / 255.0, target=b[None] / 255.0)
                for a, b in _paired_patches(pairs, patch_hw, per_image, seed)]
    return Dataset(examples)


def _apply_denoiser_net(net, image):
    out = network_forward(net, image[None, None] / 255.0)[0, 0]
    return np.clip(out * 255.0, 0.0, 255.0)


def _mean_ssim(outputs, references):
    return float(np.mean([ssim(o, r) for o, r in zip(outputs, references)]))


def _make_denoise_pipeline(params):
    return BlackBoxPipeline(lambda img: denoise(img, params), name="pipeline")


def _train_denoiser(pairs, cfg, cell_seed):
    """Patch-train a fresh skip autoencoder on (noisy, target) image pairs."""
    train_set = _patch_dataset(pairs, cfg.patch_hw, cfg.patches_per_image,
                               derive_seed(cell_seed, _KEY_PATCH))
    net = build_skip_autoencoder(cfg.depth, cfg.channels,
                                 seed=derive_seed(cell_seed, _KEY_INIT))
    sgd = SgdConfig(learning_rate=cfg.sgd.learning_rate, momentum=cfg.sgd.momentum,
                    batch_size=cfg.sgd.batch_size, epochs=cfg.sgd.epochs,
                    seed=derive_seed(cell_seed, _KEY_TRAIN))
    log = train(net, train_set, "mse", sgd)
    return net, log


def run_denoise_experiment(cfg):
    """Black-box denoiser vs a surrogate trained on its outputs.

    Returns rows for methods noisy_input, pipeline and surrogate (task
    "denoise", metric "ssim", mean over the held-out test images).
    """
    clean_seed = derive_seed(cfg.seed, _KEY_CLEAN)
    noise_seed = derive_seed(cfg.seed, _KEY_NOISE)
    clean_train = synth_shapes(cfg.train_count, cfg.image_hw, seed=clean_seed)
    clean_test = synth_shapes(cfg.test_count, cfg.image_hw, seed=clean_seed + 1)
    noisy_train = _noisy_copies(clean_train, cfg.noise_sigma, noise_seed)
    noisy_test = _noisy_copies(clean_test, cfg.noise_sigma, noise_seed + 1)

    pipeline = _make_denoise_pipeline(cfg.crf)
    imputed = impute_labels(pipeline, noisy_train)
    pipeline_test = [pipeline(img) for img in noisy_test]

    net, log = _train_denoiser([(ex.input, ex.target) for ex in imputed],
                               cfg, cfg.seed)
    surrogate_test = [_apply_denoiser_net(net, img) for img in noisy_test]

    rows = [
        MetricRow("denoise", "noisy_input", None, "ssim",
                  _mean_ssim(noisy_test, clean_test), 0),
        MetricRow("denoise", "pipeline", None, "ssim",
                  _mean_ssim(pipeline_test, clean_test), pipeline.mean_ops),
        MetricRow("denoise", "surrogate", None, "ssim",
                  _mean_ssim(surrogate_test, clean_test),
                  count_flops(net, (1, cfg.image_hw, cfg.image_hw))),
    ]
    return ExperimentResult(rows, artifacts={"net": net, "train_log": log,
                                             "pipeline": pipeline})


def _run_denoise_sweep(cfg):
    clean_seed = derive_seed(cfg.seed, _KEY_CLEAN)
    noise_seed = derive_seed(cfg.seed, _KEY_NOISE)
    clean_gt = synth_shapes(cfg.gt_count, cfg.image_hw, seed=clean_seed)
    clean_pool = synth_shapes(cfg.pool_count, cfg.image_hw, seed=clean_seed + 1)
    clean_test = synth_shapes(cfg.test_count, cfg.image_hw, seed=clean_seed + 2)
    noisy_gt = _noisy_copies(clean_gt, cfg.noise_sigma, noise_seed)
    noisy_pool = _noisy_copies(clean_pool, cfg.noise_sigma, noise_seed + 1)
    noisy_test = _noisy_copies(clean_test, cfg.noise_sigma, noise_seed + 2)

    pipeline = _make_denoise_pipeline(cfg.crf)
    imputed = impute_labels(pipeline, noisy_pool)
    pipeline_test = [pipeline(img) for img in noisy_test]

    gt_examples = Dataset([LabeledExample(input=n, target=c)
                           for n, c in zip(noisy_gt, clean_gt)])
    rows = [MetricRow("denoise", "pipeline", None, "ssim",
                      _mean_ssim(pipeline_test, clean_test), pipeline.mean_ops)]
    net_flops = None
    for ri, ratio in enumerate(cfg.ratios):
        ratio_seed = derive_seed(cfg.seed, 100 + ri)
        blended = mix_datasets(gt_examples, imputed,
                               MixConfig(ratio_x=float(ratio), total=cfg.pool_count,
                                         seed=ratio_seed))
        # gt_only trains on exactly the blend's ground-truth share
        gt_share = Dataset([ex for ex in blended if ex.label_source == "ground_truth"])
        for mi, (method, data) in enumerate([("gt_only", gt_share),
                                             ("bootstrapped", blended)]):
            net, _ = _train_denoiser([(ex.input, ex.target) for ex in data],
                                     cfg, derive_seed(ratio_seed, 1000 + mi))
            if net_flops is None:
                net_flops = count_flops(net, (1, cfg.image_hw, cfg.image_hw))
            outputs = [_apply_denoiser_net(net, img) for img in noisy_test]
            rows.append(MetricRow("denoise", method, float(ratio), "ssim",
                                  _mean_ssim(outputs, clean_test), net_flops))
    return ExperimentResult(rows)


# --------------------------------------------------------------- classify --

def _unit_inputs(dataset):
    return Dataset([LabeledExample(input=ex.input / 255.0, target=ex.target)
                    for ex in dataset])


def _build_classifier(cfg, hw, seed):
    return build_target_classifier(num_classes=cfg.num_classes,
                                   conv_channels=cfg.conv_channels,
                                   fc_sizes=tuple(cfg.fc_sizes),
                                   image_channels=1, image_hw=hw, seed=seed)


def _train_classifier(net, dataset, sgd_template, seed):
    sgd = SgdConfig(learning_rate=sgd_template.learning_rate,
                    momentum=sgd_template.momentum,
                    batch_size=sgd_template.batch_size,
                    epochs=sgd_template.epochs, seed=seed)
    return train(net, dataset, "softmax_xent", sgd)


def _classifier_accuracy(net, dataset):
    inputs = np.stack([ex.input for ex in dataset])
    logits = network_forward(net, inputs)
    predicted = logits.argmax(axis=1)
    actual = np.array([ex.target for ex in dataset])
    return accuracy(predicted, actual)


def _classifier_pipeline(net):
    """Teacher network as a black-box labeler: argmax class plus flop cost."""
    def label_one(x):
        logits = network_forward(net, x[None])
        return int(logits[0].argmax()), count_flops(net, x.shape)

    return BlackBoxPipeline(label_one, name="teacher")


def _run_classify_sweep(cfg):
    data_seed = derive_seed(cfg.seed, _KEY_DATA)
    # one long balanced stream, sliced into teacher / pool / test segments
    total = cfg.teacher_count + cfg.pool_count + cfg.test_count
    everything = list(synth_classification(total, size=cfg.class_hw,
                                           num_classes=cfg.num_classes,
                                           seed=data_seed))
    teacher_data = Dataset(everything[:cfg.teacher_count])
    pool_data = Dataset(everything[cfg.teacher_count:cfg.teacher_count + cfg.pool_count])
    test_data = Dataset(everything[cfg.teacher_count + cfg.pool_count:])

    teacher = _build_classifier(cfg, cfg.class_hw, derive_seed(cfg.seed, _KEY_INIT))
    _train_classifier(teacher, _unit_inputs(teacher_data), cfg.teacher_sgd,
                      derive_seed(cfg.seed, _KEY_TRAIN))

    pipeline = _classifier_pipeline(teacher)
    unit_pool = _unit_inputs(pool_data)
    imputed = impute_labels(pipeline, unit_pool)
    unit_test = _unit_inputs(test_data)

    rows = [MetricRow("classify", "pipeline", None, "accuracy",
                      _classifier_accuracy(teacher, unit_test), pipeline.mean_ops)]
    net_flops = None
    for ri, ratio in enumerate(cfg.ratios):
        ratio_seed = derive_seed(cfg.seed, 200 + ri)
        blended = mix_datasets(unit_pool, imputed,
                               MixConfig(ratio_x=float(ratio), total=cfg.pool_count,
                                         seed=ratio_seed))
        gt_share = Dataset([ex for ex in blended if ex.label_source == "ground_truth"])
        for mi, (method, data) in enumerate([("gt_only", gt_share),
                                             ("bootstrapped", blended)]):
            cell_seed = derive_seed(ratio_seed, 1000 + mi)
            student = _build_classifier(cfg, cfg.class_hw,
                                        derive_seed(cell_seed, _KEY_INIT))
            _train_classifier(student, data, cfg.sgd,
                              derive_seed(cell_seed, _KEY_TRAIN))
            if net_flops is None:
                net_flops = count_flops(student, (1, cfg.class_hw, cfg.class_hw))
            rows.append(MetricRow("classify", method, float(ratio), "accuracy",
                                  _classifier_accuracy(student, unit_test), net_flops))
    return ExperimentResult(rows)


def run_ratio_sweep(cfg):
    """Ground-truth ratio sweep for one task and one seed.

    Rows: a ratio-free pipeline reference plus, per ratio, gt_only and
    bootstrapped surrogate scores.
    """
    if cfg.task == "denoise":
        return _run_denoise_sweep(cfg)
    return _run_classify_sweep(cfg)


def run_classify_experiment(cfg):
    """Teacher-as-black-box distillation.

    The labeled training pool is split 50/50 into a teacher half and a
    student half. The teacher trains on its half, labels the other half's
    inputs, and the student trains purely on those imputed labels. With
    teacher_uses_all set, the teacher instead trains on the full pool and
    the student on teacher labels for the full pool's inputs. Rows report
    held-out test accuracy for both (task "classify").
    """
    data_seed = derive_seed(cfg.seed, _KEY_DATA)
    all_train = synth_classification(cfg.train_count, size=cfg.image_hw,
                                     num_classes=cfg.num_classes, seed=data_seed)
    test_data = _unit_inputs(synth_classification(cfg.test_count, size=cfg.image_hw,
                                                  num_classes=cfg.num_classes,
                                                  seed=data_seed + 1))
    phi, psi = split_examples(all_train, 0.5, Rng(derive_seed(cfg.seed, _KEY_SPLIT)))
    if cfg.teacher_uses_all:
        phi = psi = all_train

    teacher = _build_classifier(cfg, cfg.image_hw, derive_seed(cfg.seed, _KEY_INIT))
    _train_classifier(teacher, _unit_inputs(phi), cfg.sgd,
                      derive_seed(cfg.seed, _KEY_TRAIN))

    pipeline = _classifier_pipeline(teacher)
    imputed = impute_labels(pipeline, _unit_inputs(psi))

    student = _build_classifier(cfg, cfg.image_hw, derive_seed(cfg.seed, _KEY_INIT) + 1)
    _train_classifier(student, imputed, cfg.sgd,
                      derive_seed(cfg.seed, _KEY_TRAIN) + 1)

    flops = count_flops(teacher, (1, cfg.image_hw, cfg.image_hw))
    rows = [
        MetricRow("classify", "teacher", None, "accuracy",
                  _classifier_accuracy(teacher, test_data), flops),
        MetricRow("classify", "student", None, "accuracy",
                  _classifier_accuracy(student, test_data),
                  count_flops(student, (1, cfg.image_hw, cfg.image_hw))),
    ]
    return ExperimentResult(rows, artifacts={"teacher": teacher, "student": student,
                                             "pipeline": pipeline})
