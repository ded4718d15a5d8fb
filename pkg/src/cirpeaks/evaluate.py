"""Scoring detections against ground truth and the method comparison harness."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._util import atomic_write_text
from .core.scaling import standardize
from .core.synthetic import GroundTruth
from .core.trace import CirTrace
from .core.windows import make_windows
from .detect import AnomalyReport, DetectConfig, detect_anomalies, residual
from .errors import ValidationError
from .filters import filter_preset, filter_trend
from .nn import TrainConfig, build_model, predict_series, preset, train


@dataclass(frozen=True)
class DetectionMetrics:
    true_positives: int
    false_positives: int
    false_negatives: int
    precision: float
    recall: float
    f1: float
    cluster_count_delta: int
    mean_peak_offset_samples: float


def _peak_to_taps(peak: int, taps) -> int:
    return min(abs(peak - t) for t in taps)


def match_clusters(detected: AnomalyReport, truth: GroundTruth, tol_samples: int = 10) -> DetectionMetrics:
    """Greedy one-to-one matching of detected clusters to truth clusters.

    A pair is admissible when the two index ranges, each dilated by
    ``tol_samples``, overlap; admissible pairs are consumed in order of
    ascending peak-to-nearest-tap distance.  Unmatched detections count as
    false positives, unmatched truths as false negatives.

    Conventions for empty sides: no detections and no truth scores perfect
    (1, 1, 1); no detections against a non-empty truth scores precision 0
    (pessimistic rather than undefined); detections against an empty truth
    score recall 1 (vacuous) but precision 0.
    """
    if tol_samples < 0:
        raise ValidationError("tol_samples must be >= 0")
    det = detected.clusters
    tru = truth.clusters

    pairs = []
    for di, d in enumerate(det):
        for ti, t in enumerate(tru):
            if (
                d.start_index - tol_samples <= t.end_index + tol_samples
                and t.start_index - tol_samples <= d.end_index + tol_samples
            ):
                pairs.append((_peak_to_taps(d.peak_index, t.tap_indices), di, ti))
    pairs.sort()

    det_used = [False] * len(det)
    tru_used = [False] * len(tru)
    offsets = []
    for dist, di, ti in pairs:
        if det_used[di] or tru_used[ti]:
            continue
        det_used[di] = True
        tru_used[ti] = True
        offsets.append(dist)

    tp = len(offsets)
    fp = len(det) - tp
    fn = len(tru) - tp
    precision = tp / (tp + fp) if (tp + fp) else (1.0 if not tru else 0.0)
    recall = tp / (tp + fn) if (tp + fn) else 1.0
    f1 = 2.0 * precision * recall / (precision + recall) if (precision + recall) else 0.0
    return DetectionMetrics(
        true_positives=tp,
        false_positives=fp,
        false_negatives=fn,
        precision=precision,
        recall=recall,
        f1=f1,
        cluster_count_delta=len(det) - len(tru),
        mean_peak_offset_samples=float(np.mean(offsets)) if offsets else 0.0,
    )


@dataclass
class TrendResult:
    predicted: np.ndarray
    warmup_len: int = 0
    train_seconds: float | None = None


@dataclass
class TrendMethod:
    name: str
    produce: Callable[[CirTrace], TrendResult]


@dataclass
class MethodRow:
    name: str
    metrics: DetectionMetrics | None
    report: AnomalyReport | None
    wall_seconds: float
    train_seconds: float | None = None
    error: str | None = None


def filter_method(preset_name: str) -> TrendMethod:
    spec = filter_preset(preset_name)

    def produce(trace: CirTrace) -> TrendResult:
        return TrendResult(predicted=filter_trend(spec, trace), warmup_len=0)

    return TrendMethod(name=preset_name, produce=produce)


def lstm_method(
    model_preset: str = "table4",
    window_k: int = 100,
    scale: float = 1.0,
    train_cfg: TrainConfig | None = None,
    name: str = "lstm",
) -> TrendMethod:
    """Train the given architecture on the trace itself, then predict it.

    The model seed equals the training seed, so one --seed reproduces the
    whole row.
    """
    cfg = train_cfg or TrainConfig()

    def produce(trace: CirTrace) -> TrendResult:
        tic = time.perf_counter()
        std, scaler = standardize(trace.samples)
        dataset = make_windows(std, window_k)
        model = build_model(preset(model_preset, input_window=window_k, scale=scale), cfg.seed)
        trained, history = train(model, dataset, cfg, scaler=scaler)
        train_seconds = time.perf_counter() - tic
        predicted = predict_series(trained, trace)
        return TrendResult(predicted=predicted, warmup_len=window_k, train_seconds=train_seconds)

    return TrendMethod(name=name, produce=produce)


def compare_methods(
    trace: CirTrace,
    truth: GroundTruth,
    methods: list[TrendMethod],
    detect_cfg: DetectConfig | None = None,
    tol_samples: int = 10,
) -> list[MethodRow]:
    """Run every method through trend -> residual -> detect -> match.

    A failing method yields a row with ``error`` set; the others still run.
    Row order follows the input method order.
    """
    if not methods:
        raise ValidationError("compare_methods needs at least one method")
    cfg = detect_cfg or DetectConfig()
    rows: list[MethodRow] = []
    for method in methods:
        tic = time.perf_counter()
        try:
            trend = method.produce(trace)
            res = residual(trace, trend.predicted, warmup_len=trend.warmup_len)
            report = detect_anomalies(res, cfg)
            metrics = match_clusters(report, truth, tol_samples)
            rows.append(
                MethodRow(
                    name=method.name,
                    metrics=metrics,
                    report=report,
                    wall_seconds=time.perf_counter() - tic,
                    train_seconds=trend.train_seconds,
                )
            )
        except Exception as exc:  # a bad method must not sink the others
            rows.append(
                MethodRow(
                    name=method.name,
                    metrics=None,
                    report=None,
                    wall_seconds=time.perf_counter() - tic,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
    return rows


def comparison_csv(rows: list[MethodRow]) -> str:
    lines = ["method,tp,fp,fn,precision,recall,f1,cluster_delta,peak_offset,seconds,train_seconds"]
    for row in rows:
        if row.metrics is None:
            lines.append(f"{row.name},,,,,,,,,{row.wall_seconds:.3f},")
            continue
        m = row.metrics
        train_s = f"{row.train_seconds:.3f}" if row.train_seconds is not None else ""
        lines.append(
            f"{row.name},{m.true_positives},{m.false_positives},{m.false_negatives},"
            f"{m.precision:.6f},{m.recall:.6f},{m.f1:.6f},{m.cluster_count_delta},"
            f"{m.mean_peak_offset_samples:.3f},{row.wall_seconds:.3f},{train_s}"
        )
    return "\n".join(lines) + "\n"


def save_comparison_csv(rows: list[MethodRow], path) -> None:
    atomic_write_text(path, comparison_csv(rows))
