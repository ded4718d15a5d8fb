"""Trace data model, scaling, windowing, synthetic generation and file I/O."""

from .scaling import ScalerParams, destandardize, standardize
from .synthetic import (
    GroundTruth,
    SynthConfig,
    TruthCluster,
    generate_synthetic_trace,
    load_ground_truth,
    save_ground_truth,
)
from .trace import CirTrace, load_trace, meta_sidecar_path, save_trace
from .windows import WindowedDataset, make_windows

__all__ = [
    "CirTrace",
    "GroundTruth",
    "ScalerParams",
    "SynthConfig",
    "TruthCluster",
    "WindowedDataset",
    "destandardize",
    "generate_synthetic_trace",
    "load_ground_truth",
    "load_trace",
    "make_windows",
    "meta_sidecar_path",
    "save_ground_truth",
    "save_trace",
    "standardize",
]
