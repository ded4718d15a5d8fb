"""cirpeaks: peak-cluster detection in channel impulse response traces.

Pipeline: standardize a power-vs-delay trace, train a small next-sample
predictor (LSTM autoencoder or dense network), take the signed residual
between input and prediction, separate anomalous residuals from the noise
bulk with DBSCAN, and group them into peak clusters.  Classical smoothing
filters (Butterworth, Bessel, Savitzky-Golay, median) provide the trend
baseline for comparison.
"""

from .errors import (
    CirPeaksError,
    DegenerateInputError,
    InsufficientDataError,
    NumericalError,
    ParseError,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = [
    "CirPeaksError",
    "DegenerateInputError",
    "InsufficientDataError",
    "NumericalError",
    "ParseError",
    "ValidationError",
    "__version__",
]
