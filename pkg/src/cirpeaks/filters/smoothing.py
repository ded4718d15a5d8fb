"""FIR-style smoothers: Savitzky-Golay kernels and the sliding median."""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ValidationError


def _validate_window(window: int, n: int | None = None) -> None:
    if window < 1 or window % 2 == 0:
        raise ValidationError(f"window must be an odd positive integer, got {window}")
    if n is not None and window > n:
        raise ValidationError(f"window {window} exceeds series length {n}")


def savgol_coefficients(window: int, polyorder: int) -> np.ndarray:
    """Central Savitzky-Golay smoothing kernel.

    Least-squares fit of a degree-``polyorder`` polynomial over the window
    positions -h..h, evaluated at 0; equivalently row 0 of the pseudo-inverse
    of the position Vandermonde matrix.  Coefficients sum to 1 (a constant
    signal passes through unchanged).
    """
    _validate_window(window)
    if not (0 <= polyorder < window):
        raise ValidationError(f"polyorder must satisfy 0 <= polyorder < window, got {polyorder}")
    h = (window - 1) // 2
    positions = np.arange(-h, h + 1, dtype=np.float64)
    vander = np.vander(positions, polyorder + 1, increasing=True)
    return np.linalg.pinv(vander)[0]


def apply_savgol(series, kernel: np.ndarray) -> np.ndarray:
    """Correlate with a smoothing kernel using reflect padding."""
    x = np.asarray(series, dtype=np.float64)
    h = (kernel.size - 1) // 2
    if x.size <= h:
        raise ValidationError(f"series of {x.size} samples is too short for window {kernel.size}")
    padded = np.pad(x, h, mode="reflect")
    return np.correlate(padded, kernel, mode="valid")


def apply_median(series, window: int) -> np.ndarray:
    """Sliding median with edge-replicate padding; output length = input."""
    x = np.asarray(series, dtype=np.float64)
    _validate_window(window, x.size)
    h = (window - 1) // 2
    padded = np.pad(x, h, mode="edge")
    return np.median(sliding_window_view(padded, window), axis=-1)
