"""Hot time-step kernels with compiled/pure backend selection.

The compiled extension (Cython + BLAS) is used when available; the
pure-numpy implementation is the fallback.  Set CIRPEAKS_PURE_PYTHON=1 to
force the fallback — results agree to ~1e-12 (the compiled backend orders
a few floating-point reductions differently), and benchmarks/bench_kernels.py
compares their throughput.
"""

import os

from . import _pure

if os.environ.get("CIRPEAKS_PURE_PYTHON"):
    _impl = _pure
else:
    try:
        from . import _speedups as _impl
    except ImportError:  # extension not built; fall back silently
        _impl = _pure

BACKEND = _impl.NAME
ACT_RELU = _pure.ACT_RELU
ACT_LINEAR = _pure.ACT_LINEAR

lstm_forward = _impl.lstm_forward
lstm_backward = _impl.lstm_backward
biquad_pass = _impl.biquad_pass

__all__ = [
    "ACT_LINEAR",
    "ACT_RELU",
    "BACKEND",
    "biquad_pass",
    "lstm_backward",
    "lstm_forward",
]
