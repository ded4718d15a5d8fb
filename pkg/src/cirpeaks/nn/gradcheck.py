"""Finite-difference verification of the analytic gradients."""

from __future__ import annotations

import numpy as np

from .model import backward_batch, build_model, forward_batch
from .spec import ModelSpec

# Relative error floor: gradients this far below the loss scale are compared
# in the absolute sense, where central-difference cancellation noise
# (~|loss| * 2e-11 at eps = 1e-5) would otherwise dominate the ratio.
_DENOM_FLOOR = 1e-6


def _loss_forward(model, window, target):
    pred, caches = forward_batch(model, window, train=False)
    err = float(pred[0]) - target
    return err * err, caches, err


def grad_check(spec: ModelSpec, seed: int, epsilon: float = 1e-5) -> float:
    """Worst relative error between analytic and central-difference gradients.

    Builds a model from ``spec``, draws one random window/target pair and
    compares every parameter's analytic squared-error gradient against
    (f(p + eps) - f(p - eps)) / (2 eps).  Dropout runs in infer mode, so the
    check is deterministic.  Intended for small (scaled-down) specs; cost is
    two forward passes per parameter.

    Freshly built models hold zero biases, which parks relu preactivations
    exactly on the kink whenever an upstream layer goes quiet; central
    differences are one-sided there and the comparison is meaningless.  The
    check therefore runs at a generic nearby point: every bias receives a
    small random offset before probing.
    """
    model = build_model(spec, seed)
    rng = np.random.default_rng([seed, 0x9E3779B9])
    for p in model.params:
        if "b" in p:
            p["b"] += rng.uniform(-0.2, 0.2, size=p["b"].shape)
    window = rng.normal(size=(1, spec.input_window))
    target = float(rng.normal())

    f0, caches, err = _loss_forward(model, window, target)
    grads = backward_batch(model, caches, np.array([2.0 * err]))
    floor = _DENOM_FLOOR * max(1.0, f0)

    worst = 0.0
    for p, g in zip(model.params, grads):
        for key, values in p.items():
            flat = values.reshape(-1)
            gflat = g[key].reshape(-1)
            for j in range(flat.size):
                orig = flat[j]
                flat[j] = orig + epsilon
                f_plus, _, _ = _loss_forward(model, window, target)
                flat[j] = orig - epsilon
                f_minus, _, _ = _loss_forward(model, window, target)
                flat[j] = orig
                numeric = (f_plus - f_minus) / (2.0 * epsilon)
                denom = max(abs(gflat[j]), abs(numeric), floor)
                worst = max(worst, abs(gflat[j] - numeric) / denom)
    return worst
