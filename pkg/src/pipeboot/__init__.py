"""Bootstrap neural-network surrogates from a black-box image-processing pipeline.

A classical graph-cut denoiser (or any deterministic evaluator) labels
unlabeled inputs; the resulting imputed pairs, optionally mixed with scarce
ground truth at a configurable ratio, train compact networks whose quality
and multiply+add cost are swept and reported.
"""

__version__ = "0.1.0"
