"""CIR trace data model and CSV/JSON file I/O.

A trace is a series of relative-power values in dB versus delay-tap index.
The on-disk format is a two-column CSV (``index,power_db``) with an optional
metadata sidecar JSON holding label, sample rate and provenance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .._util import atomic_write_text
from ..errors import ParseError, ValidationError

SOURCES = ("measured", "synthetic")


def _readonly(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CirTrace:
    """A relative-power-vs-delay series in dB.

    samples      1-D float array, finite, non-empty
    sample_rate  samples per unit delay (Fs), > 0
    label        free-form trace identifier
    source       "measured" or "synthetic"
    """

    samples: np.ndarray
    sample_rate: float = 1.0
    label: str = ""
    source: str = "synthetic"

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size == 0:
            raise ValidationError("trace samples must be a non-empty 1-D series")
        if not np.isfinite(samples).all():
            raise ValidationError("trace samples contain non-finite values")
        if not (self.sample_rate > 0):
            raise ValidationError(f"sample_rate must be > 0, got {self.sample_rate}")
        if self.source not in SOURCES:
            raise ValidationError(f"source must be one of {SOURCES}, got {self.source!r}")
        object.__setattr__(self, "samples", _readonly(samples))

    def __len__(self):
        return int(self.samples.size)


def meta_sidecar_path(path) -> Path:
    """``trace.csv`` -> ``trace.meta.json``."""
    path = Path(path)
    return path.with_name(path.stem + ".meta.json")


def save_trace(trace: CirTrace, path) -> None:
    """Write ``index,power_db`` CSV plus the metadata sidecar.

    Powers are written with shortest round-trip representation (up to 17
    significant digits), so load(save(x)) reproduces the samples exactly.
    """
    lines = ["index,power_db"]
    lines.extend(f"{i},{repr(float(v))}" for i, v in enumerate(trace.samples))
    atomic_write_text(path, "\n".join(lines) + "\n")
    meta = {"label": trace.label, "sample_rate": trace.sample_rate, "source": trace.source}
    atomic_write_text(meta_sidecar_path(path), json.dumps(meta, indent=2) + "\n")


def load_trace(path, format: str = "csv") -> CirTrace:
    """Load a trace CSV written by :func:`save_trace`.

    The metadata sidecar is honoured when present; otherwise the label
    defaults to the file stem, the sample rate to 1.0 and the source to
    "measured".  Malformed rows raise :class:`ParseError` naming the 1-based
    line number.
    """
    if format != "csv":
        raise ValidationError(f"unsupported trace format {format!r}")
    path = Path(path)
    text = path.read_text()
    lines = text.splitlines()
    if not lines:
        raise ParseError(f"{path}: empty file")
    header = lines[0].strip()
    if header != "index,power_db":
        raise ParseError(f"{path}: line 1: expected header 'index,power_db', got {header!r}")
    values = []
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = raw.split(",")
        if len(parts) != 2:
            raise ParseError(f"{path}: line {lineno}: expected 'index,power_db', got {raw!r}")
        try:
            idx = int(parts[0])
            val = float(parts[1])
        except ValueError:
            raise ParseError(f"{path}: line {lineno}: malformed row {raw!r}") from None
        if idx != len(values):
            raise ParseError(f"{path}: line {lineno}: expected index {len(values)}, got {idx}")
        if not np.isfinite(val):
            raise ParseError(f"{path}: line {lineno}: non-finite value {parts[1]!r}")
        values.append(val)
    if not values:
        raise ParseError(f"{path}: no samples")

    label, sample_rate, source = path.stem, 1.0, "measured"
    meta_path = meta_sidecar_path(path)
    if meta_path.exists():
        meta = json.loads(meta_path.read_text())
        label = meta.get("label", label)
        sample_rate = float(meta.get("sample_rate", sample_rate))
        source = meta.get("source", source)
    return CirTrace(np.array(values), sample_rate=sample_rate, label=label, source=source)
