"""Anomaly detection on prediction residuals.

The residual is the signed difference input - predicted (never squared:
squaring would fold negative deviations into the peaks of interest).
Detection runs in two DBSCAN stages:

  1. amplitude separation: 1-D clustering of the standardized residual
     values; the largest cluster is the noise bulk, everything else is an
     anomaly candidate (optionally positive residuals only);
  2. index grouping: 1-D clustering of the candidates' sample indices into
     peak clusters; stage-2 noise (isolated candidates) is discarded.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ._util import atomic_write_text
from .core.scaling import standardize
from .core.trace import CirTrace
from .errors import DegenerateInputError, ValidationError


@dataclass(frozen=True)
class ResidualSeries:
    """Signed input-minus-predicted series with a masked warmup prefix."""

    values: np.ndarray
    warmup_len: int = 0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ValidationError("residual values must be 1-D")
        if not (0 <= self.warmup_len <= values.size):
            raise ValidationError(f"warmup_len {self.warmup_len} out of range")
        if np.any(values[: self.warmup_len] != 0.0):
            raise ValidationError("warmup prefix of a residual must be exactly zero")
        if not np.isfinite(values).all():
            raise ValidationError("residual contains non-finite values")
        object.__setattr__(self, "values", values)

    def __len__(self):
        return int(self.values.size)


def residual(trace: CirTrace, predicted, warmup_len: int = 0) -> ResidualSeries:
    """values[x] = input[x] - predicted[x] for x >= warmup_len, else 0."""
    predicted = np.asarray(predicted, dtype=np.float64)
    if predicted.shape != trace.samples.shape:
        raise ValidationError(
            f"trace has {len(trace)} samples but prediction has {predicted.size}"
        )
    values = trace.samples - predicted
    values[:warmup_len] = 0.0
    return ResidualSeries(values=values, warmup_len=warmup_len)


def dbscan(points, eps: float, min_samples: int) -> np.ndarray:
    """Density-based clustering; returns one integer label per point.

    A core point has at least ``min_samples`` neighbours within Euclidean
    distance ``eps``, counting itself.  Clusters are maximal sets of
    density-connected points, labelled 0, 1, ... in order of their first
    core point in input order; unreachable non-core points get -1.  A
    border point in reach of several clusters goes to the one that reaches
    it first (the lowest label, since clusters are grown to completion in
    discovery order).
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2:
        raise ValidationError("dbscan expects an (N, D) matrix")
    if not (eps > 0):
        raise ValidationError(f"eps must be > 0, got {eps}")
    if min_samples < 1:
        raise ValidationError(f"min_samples must be >= 1, got {min_samples}")
    n = pts.shape[0]
    if n and not np.isfinite(pts).all():
        raise ValidationError("dbscan input contains non-finite values")

    eps2 = eps * eps

    def neighbours(i):
        d2 = ((pts - pts[i]) ** 2).sum(axis=1)
        return np.flatnonzero(d2 <= eps2)

    labels = np.full(n, -1, dtype=np.int64)
    visited = np.zeros(n, dtype=bool)
    queued = np.zeros(n, dtype=bool)
    cluster = 0
    for p in range(n):
        if visited[p]:
            continue
        visited[p] = True
        nb = neighbours(p)
        if nb.size < min_samples:
            continue  # noise for now; may become a border point later
        labels[p] = cluster
        queue = deque(int(q) for q in nb if q != p)
        queued[nb] = True
        while queue:
            q = queue.popleft()
            if labels[q] == -1:
                labels[q] = cluster  # border or new core, first reach wins
            if visited[q]:
                continue
            visited[q] = True
            nq = neighbours(q)
            if nq.size >= min_samples:
                fresh = nq[~queued[nq]]
                queue.extend(int(r) for r in fresh)
                queued[fresh] = True
        cluster += 1
    return labels


@dataclass(frozen=True)
class DetectConfig:
    """Knobs for the two detection stages.

    eps_value      stage-1 radius on standardized residual values
    min_samples    DBSCAN density threshold for both stages
    eps_index      stage-2 radius in sample-index units
    positive_only  drop candidates whose residual is <= 0
    """

    eps_value: float = 0.5
    min_samples: int = 2
    eps_index: float = 10.0
    positive_only: bool = True

    def __post_init__(self):
        if not (self.eps_value > 0 and self.eps_index > 0):
            raise ValidationError("eps_value and eps_index must be > 0")
        if self.min_samples < 1:
            raise ValidationError("min_samples must be >= 1")


@dataclass(frozen=True)
class DetectedCluster:
    id: int
    start_index: int
    end_index: int
    peak_index: int
    peak_residual_db: float
    size: int


@dataclass
class AnomalyReport:
    """Residual, per-sample cluster labels and the summarized peak clusters.

    point_labels[i] is -1 for noise-bulk/unassigned samples and the cluster
    id otherwise.  ``diagnostic`` is set (and clusters left empty) when
    detection was impossible, e.g. on a constant residual.
    """

    residual: ResidualSeries
    point_labels: np.ndarray
    clusters: list[DetectedCluster] = field(default_factory=list)
    diagnostic: str | None = None


def _empty_report(res: ResidualSeries, diagnostic: str) -> AnomalyReport:
    return AnomalyReport(
        residual=res,
        point_labels=np.full(len(res), -1, dtype=np.int64),
        clusters=[],
        diagnostic=diagnostic,
    )


def detect_anomalies(res: ResidualSeries, cfg: DetectConfig | None = None) -> AnomalyReport:
    """Group anomalous residuals into peak clusters (two DBSCAN stages)."""
    cfg = cfg or DetectConfig()
    r = res.values
    body = r[res.warmup_len :]
    if body.size < 2:
        return _empty_report(res, "residual is entirely warmup")
    try:
        std_body, _ = standardize(body)
    except DegenerateInputError:
        return _empty_report(res, "constant residual; nothing to separate")

    stage1 = dbscan(std_body[:, None], cfg.eps_value, cfg.min_samples)
    cluster_ids, counts = np.unique(stage1[stage1 >= 0], return_counts=True)
    if cluster_ids.size:
        bulk = int(cluster_ids[np.argmax(counts)])  # unique is sorted: ties -> lowest id
        candidate_mask = stage1 != bulk
    else:
        candidate_mask = np.ones(body.size, dtype=bool)  # no bulk found: all candidates
    candidates = np.flatnonzero(candidate_mask) + res.warmup_len
    if cfg.positive_only:
        candidates = candidates[r[candidates] > 0.0]

    labels = np.full(len(res), -1, dtype=np.int64)
    clusters: list[DetectedCluster] = []
    if candidates.size:
        stage2 = dbscan(candidates.astype(np.float64)[:, None], cfg.eps_index, cfg.min_samples)
        for cid in range(stage2.max() + 1 if stage2.size else 0):
            members = candidates[stage2 == cid]
            if members.size < cfg.min_samples:
                continue  # border-stealing remnant; treat like stage-2 noise
            new_id = len(clusters)
            labels[members] = new_id
            peak = int(members[np.argmax(r[members])])
            clusters.append(
                DetectedCluster(
                    id=new_id,
                    start_index=int(members.min()),
                    end_index=int(members.max()),
                    peak_index=peak,
                    peak_residual_db=float(r[peak]),
                    size=int(members.size),
                )
            )
    return AnomalyReport(residual=res, point_labels=labels, clusters=clusters)


def _labels_rle(labels: np.ndarray) -> list[list[int]]:
    runs = []
    for value in labels:
        v = int(value)
        if runs and runs[-1][0] == v:
            runs[-1][1] += 1
        else:
            runs.append([v, 1])
    return runs


def _labels_from_rle(runs) -> np.ndarray:
    if not runs:
        return np.empty(0, dtype=np.int64)
    return np.concatenate([np.full(int(n), int(v), dtype=np.int64) for v, n in runs])


def report_to_dict(report: AnomalyReport) -> dict:
    return {
        "warmup": report.residual.warmup_len,
        "clusters": [
            {
                "id": c.id,
                "start": c.start_index,
                "end": c.end_index,
                "peak": c.peak_index,
                "peak_db": c.peak_residual_db,
                "size": c.size,
            }
            for c in report.clusters
        ],
        "labels_rle": _labels_rle(report.point_labels),
    }


def save_report(report: AnomalyReport, path) -> None:
    atomic_write_text(path, json.dumps(report_to_dict(report), indent=2) + "\n")


def load_report_labels(path) -> tuple[int, list[DetectedCluster], np.ndarray]:
    """Load the JSON report: (warmup, clusters, per-sample labels)."""
    with open(path) as fh:
        doc = json.load(fh)
    clusters = [
        DetectedCluster(
            id=int(c["id"]),
            start_index=int(c["start"]),
            end_index=int(c["end"]),
            peak_index=int(c["peak"]),
            peak_residual_db=float(c["peak_db"]),
            size=int(c["size"]),
        )
        for c in doc["clusters"]
    ]
    return int(doc["warmup"]), clusters, _labels_from_rle(doc["labels_rle"])
