"""Label imputation: an expensive black-box map stands in for an annotator.

The workflow pairs every unlabeled input with the black box's output,
producing an imputed dataset that can be blended with a (usually much
smaller) ground-truth dataset at a chosen ratio. Surrogate models trained
on such blends are then compared against the black box itself.
"""

from dataclasses import dataclass, replace

import numpy as np

from .data import Dataset, LabeledExample
from .errors import (InsufficientGroundTruth, InsufficientImputed,
                     PipelineEvaluationFailure)
from .rng import Rng


class BlackBoxPipeline:
    """Callable labeler that tracks how much work it has done.

    fn maps one input to (label, ops); calls and cumulative ops are exposed
    so experiments can report the pipeline's cost alongside its quality.
    """

    def __init__(self, fn, name="pipeline"):
        self._fn = fn
        self.name = name
        self.calls = 0
        self.total_ops = 0

    def __call__(self, x):
        label, ops = self._fn(x)
        self.calls += 1
        self.total_ops += int(ops)
        return label

    @property
    def mean_ops(self):
        """Average per-call cost; 0 before the first call."""
        return self.total_ops // self.calls if self.calls else 0


def _inputs_of(collection):
    """Raw inputs of a dataset or of a plain iterable of arrays."""
    return [ex.input if isinstance(ex, LabeledExample) else ex
            for ex in collection]


def impute_labels(pipeline, inputs):
    """Label every input with the pipeline, preserving order.

    Accepts a Dataset (inputs are taken from its examples) or any iterable
    of inputs. A pipeline exception aborts the whole pass; the raised
    PipelineEvaluationFailure records which example broke.
    """
    examples = []
    for index, x in enumerate(_inputs_of(inputs)):
        try:
            label = pipeline(x)
        except Exception as exc:
            raise PipelineEvaluationFailure(index, exc) from exc
        examples.append(LabeledExample(input=x, target=label, label_source="imputed"))
    return Dataset(examples, role="S_imputed")


@dataclass(frozen=True)
class MixConfig:
    """Blend recipe: total examples, the fraction carrying true labels, and
    the seed that picks which examples each pool contributes."""

    ratio_x: float
    total: int
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.ratio_x <= 1.0:
            raise ValueError(f"ratio_x must lie in [0, 1], got {self.ratio_x}")
        if self.total < 1:
            raise ValueError(f"total must be >= 1, got {self.total}")


def ground_truth_count(ratio_x, total):
    """Number of ground-truth examples at a ratio: round half up."""
    return min(int(np.floor(ratio_x * total + 0.5)), total)


def mix_datasets(ground_truth, imputed, config):
    """Seeded blend: k ground-truth plus (total - k) imputed examples.

    k = ground_truth_count(config.ratio_x, config.total). Each pool
    contributes a uniform sample without replacement, drawn from two child
    streams of config.seed; the blend lists the ground-truth block first.
    Raises if either pool is too small. Examples keep their inputs/targets
    but are re-tagged by origin, so the blend's composition is checkable.
    """
    take_gt = ground_truth_count(config.ratio_x, config.total)
    take_imp = config.total - take_gt
    if take_gt > len(ground_truth):
        raise InsufficientGroundTruth(f"need {take_gt} ground-truth examples, "
                                      f"pool has {len(ground_truth)}")
    if take_imp > len(imputed):
        raise InsufficientImputed(f"need {take_imp} imputed examples, "
                                  f"pool has {len(imputed)}")
    stream = Rng(config.seed)
    gt_pick = stream.split(0).permutation(len(ground_truth))[:take_gt]
    imp_pick = stream.split(1).permutation(len(imputed))[:take_imp]
    gt_pool, imp_pool = list(ground_truth), list(imputed)
    examples = (
        [replace(gt_pool[i], label_source="ground_truth") for i in sorted(gt_pick)]
        + [replace(imp_pool[i], label_source="imputed") for i in sorted(imp_pick)]
    )
    return Dataset(examples, role="mixed")
