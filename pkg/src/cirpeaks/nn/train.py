"""Mini-batch Adam training of the next-sample predictor.

Loss is mean squared error in standardized units.  A single seeded
generator drives both the per-epoch shuffle and the dropout masks, so a
run is bit-reproducible for a fixed (model seed, train seed, backend).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .._util import atomic_write_text
from ..core.scaling import ScalerParams
from ..core.windows import WindowedDataset
from ..errors import NumericalError, ValidationError
from .model import Model, backward_batch, forward_batch


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 20
    batch_size: int = 32
    learning_rate: float = 1e-3
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    seed: int = 0
    shuffle: bool = True

    def __post_init__(self):
        if self.epochs < 1:
            raise ValidationError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValidationError(f"batch_size must be >= 1, got {self.batch_size}")
        if not (0.0 < self.learning_rate < 1.0):
            raise ValidationError(f"learning_rate must be in (0, 1), got {self.learning_rate}")
        for name in ("adam_beta1", "adam_beta2"):
            v = getattr(self, name)
            if not (0.0 <= v < 1.0):
                raise ValidationError(f"{name} must be in [0, 1), got {v}")
        if not (self.adam_epsilon > 0.0):
            raise ValidationError("adam_epsilon must be > 0")
        if not (0 <= self.seed < 2**64):
            raise ValidationError("seed must be an unsigned 64-bit integer")


@dataclass
class TrainHistory:
    """Per-epoch mean training loss (standardized MSE) and wall-clock seconds."""

    losses: list[float] = field(default_factory=list)
    seconds: list[float] = field(default_factory=list)

    @property
    def total_seconds(self) -> float:
        return float(sum(self.seconds))

    def to_csv(self) -> str:
        lines = ["epoch,loss,seconds"]
        lines.extend(
            f"{e},{repr(l)},{s:.6f}" for e, (l, s) in enumerate(zip(self.losses, self.seconds))
        )
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        atomic_write_text(path, self.to_csv())


def train(
    model: Model,
    dataset: WindowedDataset,
    cfg: TrainConfig,
    scaler: ScalerParams | None = None,
) -> tuple[Model, TrainHistory]:
    """Train a copy of ``model`` on the windowed dataset.

    Epoch losses are accumulated from the pre-update forward passes, so the
    reported loss for an epoch reflects the parameters as they were while
    that epoch ran.  ``scaler`` (the standardizer fitted to the training
    trace) is stored on the returned model for later prediction in dB.
    """
    if dataset.k != model.spec.input_window:
        raise ValidationError(
            f"dataset window {dataset.k} != model input window {model.spec.input_window}"
        )
    n = len(dataset)
    if n == 0:
        raise ValidationError("dataset is empty")

    params = model.copy_params()
    trained = Model(spec=model.spec, params=params, scaler=scaler or model.scaler)
    m_state = [{k: np.zeros_like(v) for k, v in p.items()} for p in params]
    v_state = [{k: np.zeros_like(v) for k, v in p.items()} for p in params]
    step = 0

    rng = np.random.default_rng(cfg.seed)
    history = TrainHistory()
    for epoch in range(cfg.epochs):
        tic = time.perf_counter()
        order = rng.permutation(n) if cfg.shuffle else np.arange(n)
        sse = 0.0
        for lo in range(0, n, cfg.batch_size):
            idx = order[lo : lo + cfg.batch_size]
            x = dataset.inputs[idx]
            y = dataset.targets[idx]
            pred, caches = forward_batch(trained, x, train=True, rng=rng)
            err = pred - y
            batch_sse = float(err @ err)
            if not np.isfinite(batch_sse):
                raise NumericalError(
                    f"non-finite loss at epoch {epoch}, batch {lo // cfg.batch_size}"
                )
            sse += batch_sse
            grads = backward_batch(trained, caches, 2.0 * err / len(idx))

            step += 1
            bias1 = 1.0 - cfg.adam_beta1**step
            bias2 = 1.0 - cfg.adam_beta2**step
            for p, m, v, g in zip(params, m_state, v_state, grads):
                for key in p:
                    gk = g[key]
                    m[key] = cfg.adam_beta1 * m[key] + (1.0 - cfg.adam_beta1) * gk
                    v[key] = cfg.adam_beta2 * v[key] + (1.0 - cfg.adam_beta2) * gk * gk
                    p[key] -= (
                        cfg.learning_rate * (m[key] / bias1) / (np.sqrt(v[key] / bias2) + cfg.adam_epsilon)
                    )
        history.losses.append(sse / n)
        history.seconds.append(time.perf_counter() - tic)
    return trained, history
