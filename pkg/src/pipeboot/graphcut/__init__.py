"""Exact graph-cut machinery: max-flow solver and grid-labeling moves."""

from .crf import (CrfParams, alpha_expansion, denoise, energy, expansion_move,
                  nearest_labeling, smoothness_is_metric, swap_move)
from .maxflow import SINK, SOURCE, FlowGraph, MaxFlowResult

__all__ = [
    "SOURCE", "SINK", "FlowGraph", "MaxFlowResult",
    "CrfParams", "energy", "nearest_labeling", "expansion_move", "swap_move",
    "alpha_expansion", "denoise", "smoothness_is_metric",
]
