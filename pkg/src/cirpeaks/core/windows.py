"""Sliding-window dataset construction.

Each training sample is a window of k consecutive values and its target is
the value immediately after the window:

    inputs[j] = series[j : j + k]
    target[j] = series[j + k]

so a series of length n yields exactly n - k (input, target) pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import InsufficientDataError, ValidationError


@dataclass(frozen=True)
class WindowedDataset:
    """Sliding-window samples over a (standardized) series.

    k              window length
    inputs         (N, k) matrix, row j = series[j : j+k]
    targets        (N,) vector, targets[j] = series[j+k]
    origin_offset  index in the source series of the first target (= k)
    """

    k: int
    inputs: np.ndarray
    targets: np.ndarray
    origin_offset: int

    def __post_init__(self):
        if self.inputs.shape != (len(self.targets), self.k):
            raise ValidationError("inputs shape inconsistent with k and targets")
        if not (np.isfinite(self.inputs).all() and np.isfinite(self.targets).all()):
            raise ValidationError("windowed dataset contains non-finite values")

    def __len__(self):
        return int(self.targets.size)


def make_windows(series, k: int) -> WindowedDataset:
    """Build the sliding-window dataset for window length ``k``.

    Requires len(series) >= k + 1 (at least one target must remain).
    """
    if k < 1:
        raise ValidationError(f"window length k must be >= 1, got {k}")
    x = np.asarray(series, dtype=np.float64)
    if x.ndim != 1:
        raise ValidationError("make_windows expects a 1-D series")
    if x.size <= k:
        raise InsufficientDataError(
            f"series of length {x.size} leaves no target for window length {k}"
        )
    inputs = sliding_window_view(x, k)[:-1].copy()
    targets = x[k:].copy()
    return WindowedDataset(k=k, inputs=inputs, targets=targets, origin_offset=k)
