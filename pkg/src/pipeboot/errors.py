"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Array shapes incompatible with the requested operation."""


class LabelOutOfRange(ValueError):
    """Class label index outside [0, num_classes)."""


class OddDepth(ValueError):
    """Skip autoencoder depth must be even."""


class BadArchitecture(ValueError):
    """Inconsistent network construction arguments."""


class EmptyDataset(ValueError):
    """Training requires at least one example."""


class NonMetricSmoothness(ValueError):
    """Pairwise smoothness cost violates the metric conditions needed for expansion moves."""


class SameLabels(ValueError):
    """Swap move requires two distinct labels."""


class DimensionMismatch(ValueError):
    """Labeling/image dimensions disagree."""


class NegativeSigma(ValueError):
    """Noise standard deviation must be non-negative."""


class PatchTooLarge(ValueError):
    """Requested patch does not fit inside the source image."""


class BadParams(ValueError):
    """Generator parameters outside their documented bounds."""


class MalformedHeader(ValueError):
    """PGM header could not be parsed."""


class UnsupportedMaxval(ValueError):
    """Only 8-bit (maxval 255) PGM images are supported."""


class TruncatedFile(ValueError):
    """Binary dataset file size does not match the record layout."""


class InsufficientGroundTruth(ValueError):
    """Mix requests more ground-truth examples than are available."""


class InsufficientImputed(ValueError):
    """Mix requests more imputed examples than are available."""


class PipelineEvaluationFailure(RuntimeError):
    """Black-box pipeline raised while labeling; carries the offending example index."""

    def __init__(self, index, cause):
        super().__init__(f"pipeline failed on example {index}: {cause}")
        self.index = index
        self.cause = cause


class TooSmall(ValueError):
    """Image smaller than the metric window."""


class EmptyInput(ValueError):
    """Metric requires at least one element."""


class ConfigError(ValueError):
    """Experiment config violates the documented schema; message names the key path."""
