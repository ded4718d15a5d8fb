"""Synthetic CIR generation with ground truth.

Real sounder traces are a noise floor with groups of decaying multipath
peaks rising above it.  The generator reproduces that shape: Gaussian noise
in dB, plus clusters of exponentially decaying taps composed in the
linear-power domain (dB-domain addition of peak and noise power would be
physically wrong) and converted back to dB.  Every injected tap is recorded
in the returned :class:`GroundTruth`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .._util import atomic_write_text
from ..errors import ValidationError
from .trace import CirTrace


@dataclass(frozen=True)
class TruthCluster:
    start_index: int
    end_index: int
    tap_indices: tuple[int, ...]
    peak_power_db: float

    def __post_init__(self):
        if not self.tap_indices:
            raise ValidationError("truth cluster needs at least one tap")
        if not all(self.start_index <= t <= self.end_index for t in self.tap_indices):
            raise ValidationError("tap indices must lie within [start_index, end_index]")


@dataclass(frozen=True)
class GroundTruth:
    clusters: tuple[TruthCluster, ...]

    def __post_init__(self):
        prev_end = -1
        for c in self.clusters:
            if c.start_index <= prev_end:
                raise ValidationError("truth clusters must be disjoint and sorted by start")
            prev_end = c.end_index


@dataclass(frozen=True)
class SynthConfig:
    """Knobs for the synthetic trace generator.

    Powers are relative to the noise in dB, so the floor defaults to 0 dB
    and peak_snr_db is the height of a cluster's strongest tap above it.
    """

    n_samples: int = 2000
    noise_floor_db: float = 0.0
    noise_sigma_db: float = 1.5
    n_clusters: int = 4
    taps_per_cluster: tuple[int, int] = (3, 8)
    cluster_decay_db_per_tap: float = 2.0
    peak_snr_db: tuple[float, float] = (15.0, 25.0)
    seed: int = 0

    def __post_init__(self):
        if self.n_samples < 200:
            raise ValidationError(f"n_samples must be >= 200, got {self.n_samples}")
        if not (self.noise_sigma_db > 0):
            raise ValidationError("noise_sigma_db must be > 0")
        if self.n_clusters < 0:
            raise ValidationError("n_clusters must be >= 0")
        lo, hi = self.taps_per_cluster
        if not (1 <= lo <= hi):
            raise ValidationError(f"bad taps_per_cluster range {self.taps_per_cluster}")
        if not (self.cluster_decay_db_per_tap > 0):
            raise ValidationError("cluster_decay_db_per_tap must be > 0")
        slo, shi = self.peak_snr_db
        if not (0 < slo <= shi):
            raise ValidationError(f"bad peak_snr_db range {self.peak_snr_db}")
        if not (0 <= self.seed < 2**64):
            raise ValidationError("seed must be an unsigned 64-bit integer")


def generate_synthetic_trace(config: SynthConfig) -> tuple[CirTrace, GroundTruth]:
    """Generate a noise-floor trace with decaying peak clusters.

    Each cluster is placed uniformly inside its own equal slice of the trace,
    which keeps clusters disjoint and well separated.  Tap powers decay
    linearly in dB from the cluster peak and are never injected below the
    noise floor.  Bit-identical for a fixed config (single seeded generator,
    fixed draw order).
    """
    rng = np.random.default_rng(config.seed)
    noise_db = rng.normal(config.noise_floor_db, config.noise_sigma_db, config.n_samples)
    power = 10.0 ** (noise_db / 10.0)

    clusters = []
    if config.n_clusters > 0:
        lo, hi = config.taps_per_cluster
        slo, shi = config.peak_snr_db
        segment = config.n_samples // config.n_clusters
        for j in range(config.n_clusters):
            n_taps = int(rng.integers(lo, hi + 1))
            snr = float(rng.uniform(slo, shi))
            room = segment - n_taps
            if room < 0:
                raise ValidationError(
                    f"cluster of {n_taps} taps does not fit in a segment of {segment} samples"
                )
            start = j * segment + int(rng.integers(0, room + 1))
            taps = range(start, start + n_taps)
            snr_per_tap = np.maximum(snr - config.cluster_decay_db_per_tap * np.arange(n_taps), 0.0)
            power[start : start + n_taps] += 10.0 ** ((config.noise_floor_db + snr_per_tap) / 10.0)
            clusters.append(
                TruthCluster(
                    start_index=start,
                    end_index=start + n_taps - 1,
                    tap_indices=tuple(taps),
                    peak_power_db=config.noise_floor_db + snr,
                )
            )

    samples = 10.0 * np.log10(power)
    trace = CirTrace(samples, sample_rate=1.0, label=f"synthetic-{config.seed}", source="synthetic")
    return trace, GroundTruth(clusters=tuple(clusters))


def save_ground_truth(truth: GroundTruth, path) -> None:
    doc = {
        "clusters": [
            {
                "start": c.start_index,
                "end": c.end_index,
                "taps": list(c.tap_indices),
                "peak_power_db": c.peak_power_db,
            }
            for c in truth.clusters
        ]
    }
    atomic_write_text(path, json.dumps(doc, indent=2) + "\n")


def load_ground_truth(path) -> GroundTruth:
    with open(path) as fh:
        doc = json.load(fh)
    clusters = tuple(
        TruthCluster(
            start_index=int(c["start"]),
            end_index=int(c["end"]),
            tap_indices=tuple(int(t) for t in c["taps"]),
            peak_power_db=float(c["peak_power_db"]),
        )
        for c in doc["clusters"]
    )
    return GroundTruth(clusters=clusters)
