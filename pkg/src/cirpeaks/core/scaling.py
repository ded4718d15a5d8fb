"""Standard scaling: x -> (x - mean) / std and its inverse.

Uses the population standard deviation (divide by N).  A constant series has
std == 0 and is rejected rather than silently guarded, since a zero-division
epsilon would corrupt the scaling semantics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateInputError, ValidationError


@dataclass(frozen=True)
class ScalerParams:
    mean: float
    std: float

    def __post_init__(self):
        if not (np.isfinite(self.mean) and np.isfinite(self.std)):
            raise ValidationError("scaler parameters must be finite")
        if self.std < 0:
            raise ValidationError(f"scaler std must be >= 0, got {self.std}")


def standardize(series) -> tuple[np.ndarray, ScalerParams]:
    """Scale a series to zero mean and unit population std.

    Returns the scaled series and the fitted :class:`ScalerParams`.
    Raises :class:`DegenerateInputError` for a constant series.
    """
    x = np.asarray(series, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise ValidationError("standardize needs a 1-D series of length >= 2")
    if not np.isfinite(x).all():
        raise ValidationError("standardize: non-finite input")
    mean = float(x.mean())
    std = float(x.std())  # population std (ddof=0)
    if std == 0.0:
        raise DegenerateInputError("cannot standardize a constant series (std = 0)")
    return (x - mean) / std, ScalerParams(mean, std)


def destandardize(series, params: ScalerParams) -> np.ndarray:
    """Invert :func:`standardize`: y = x * std + mean."""
    if not (params.std > 0):
        raise ValidationError(f"destandardize needs std > 0, got {params.std}")
    x = np.asarray(series, dtype=np.float64)
    return x * params.std + params.mean
