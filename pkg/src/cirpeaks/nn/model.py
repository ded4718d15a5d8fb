"""Model parameters, forward/backward passes and series prediction.

The forward pass is defined batch-first.  A recurrent spec feeds the window
in as a (k, 1) sequence: encoder LSTMs, a repeated code vector, decoder
LSTMs and a per-step one-unit readout whose LAST step is the prediction.
A dense spec consumes the window as one flat feature vector.

Backward is plain reverse accumulation of the squared-error loss; LSTM
layers backpropagate through every time step (the recurrent loops live in
cirpeaks.kernels).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .. import kernels
from ..core.scaling import ScalerParams, destandardize
from ..core.trace import CirTrace
from ..errors import NumericalError, ValidationError
from .spec import ModelSpec, effective_layers

_ACT_CODE = {"relu": kernels.ACT_RELU, "linear": kernels.ACT_LINEAR}

# Per-kind parameter key order; also the Adam update and serialization order.
PARAM_KEYS = {"lstm": ("W", "U", "b"), "dense": ("W", "b"), "time_distributed_dense": ("W", "b")}


@dataclass
class Model:
    """A spec plus its (trained or freshly initialized) parameters.

    ``params`` has one dict per spec layer ({} for parameterless layers).
    ``scaler`` is captured at training time and used by predict_series to
    map between dB and standardized units.  Treat instances as immutable.
    """

    spec: ModelSpec
    params: list[dict[str, np.ndarray]]
    scaler: ScalerParams | None = None

    def copy_params(self) -> list[dict[str, np.ndarray]]:
        return [{k: v.copy() for k, v in p.items()} for p in self.params]


def _glorot(rng, fan_in, fan_out, shape):
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=shape)


def _shape_walk(spec: ModelSpec):
    """Yield (layer, input_dim) pairs while validating the wiring.

    Tracks whether the tensor is a sequence; raises on impossible wiring
    (e.g. an LSTM fed a flat vector or a repeat_vector fed a sequence).
    """
    layers = effective_layers(spec)
    is_seq = spec.is_recurrent
    steps = spec.input_window if is_seq else None
    dim = 1 if is_seq else spec.input_window
    for layer in layers:
        yield layer, dim
        if layer.kind == "dense":
            if is_seq:
                raise ValidationError("dense layer requires a flat input, got a sequence")
            dim = layer.width
        elif layer.kind == "lstm":
            if not is_seq:
                raise ValidationError("lstm layer requires a sequence input")
            dim = layer.width
            if not layer.returns_sequence:
                is_seq, steps = False, None
        elif layer.kind == "flatten":
            if is_seq:
                dim = steps * dim
                is_seq, steps = False, None
        elif layer.kind == "repeat_vector":
            if is_seq:
                raise ValidationError("repeat_vector requires a flat input, got a sequence")
            is_seq, steps = True, layer.repeat
        elif layer.kind == "time_distributed_dense":
            dim = layer.width
        # dropout: shape-preserving


def build_model(spec: ModelSpec, seed: int) -> Model:
    """Allocate parameters for ``spec``.

    Weights are Glorot-uniform (bound sqrt(6 / (fan_in + fan_out))) from a
    single seeded generator in layer order; biases start at zero except the
    LSTM forget-gate block, which starts at one.  Deterministic per seed.
    """
    rng = np.random.default_rng(seed)
    params: list[dict[str, np.ndarray]] = []
    for layer, dim in _shape_walk(spec):
        if layer.kind == "lstm":
            h = layer.width
            w = _glorot(rng, dim, 4 * h, (4 * h, dim))
            u = _glorot(rng, h, 4 * h, (4 * h, h))
            b = np.zeros(4 * h)
            b[h : 2 * h] = 1.0  # forget gate block
            params.append({"W": w, "U": u, "b": b})
        elif layer.kind in ("dense", "time_distributed_dense"):
            w = _glorot(rng, dim, layer.width, (layer.width, dim))
            params.append({"W": w, "b": np.zeros(layer.width)})
        else:
            params.append({})
    return Model(spec=spec, params=params)


def lstm_cell_step(params, x, h, c, activation: str = "relu"):
    """One LSTM cell update for a single (x, h, c) triple.

    i = sig(Wi x + Ui h + bi)   f, o likewise
    g = act(Wg x + Ug h + bg)
    c' = f*c + i*g,  h' = o * act(c')

    The gate blocks are stacked [i, f, o, g] along the first axis of W, U, b.
    """
    w, u, b = params["W"], params["U"], params["b"]
    x = np.asarray(x, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    n = u.shape[1]
    if w.shape[0] != 4 * n or x.shape != (w.shape[1],) or h.shape != (n,) or c.shape != (n,):
        raise ValidationError("lstm_cell_step: shape mismatch between params and state")
    z = w @ x + u @ h + b
    sig = lambda v: 1.0 / (1.0 + np.exp(-v))
    i, f, o = sig(z[:n]), sig(z[n : 2 * n]), sig(z[2 * n : 3 * n])
    g = np.maximum(z[3 * n :], 0.0) if activation == "relu" else z[3 * n :]
    c_new = f * c + i * g
    a = np.maximum(c_new, 0.0) if activation == "relu" else c_new
    return o * a, c_new


def _dropout_mask(rng, rate, shape):
    # Inverted dropout: surviving units are scaled by 1/keep so the
    # expectation matches the no-dropout forward.
    keep = 1.0 - rate
    return (rng.random(shape) >= rate) / keep


def forward_batch(model: Model, windows: np.ndarray, train: bool = False, rng=None):
    """Run a (B, k) batch of windows through the network.

    Returns (predictions (B,), caches).  In train mode dropout masks are
    drawn from ``rng``; in infer mode dropout is the identity.
    """
    spec = model.spec
    x = np.ascontiguousarray(windows, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != spec.input_window:
        raise ValidationError(f"expected windows of shape (B, {spec.input_window})")
    if train and rng is None and any(l.kind == "dropout" for l in spec.layers):
        raise ValidationError("train-mode forward with dropout needs an rng")

    if spec.is_recurrent:
        x = x[:, :, None]  # (B, k, 1) sequence of 1-dim inputs
    caches = []
    for (layer, _), p in zip(_shape_walk(spec), model.params):
        kind = layer.kind
        if kind == "lstm":
            zx = x @ p["W"].T + p["b"]
            hs, cs, gates = kernels.lstm_forward(
                np.ascontiguousarray(zx), p["U"], _ACT_CODE[layer.activation]
            )
            caches.append({"x": x, "hs": hs, "cs": cs, "gates": gates})
            x = hs if layer.returns_sequence else hs[:, -1, :].copy()
        elif kind in ("dense", "time_distributed_dense"):
            seq_shape = x.shape if x.ndim == 3 else None
            flat = x.reshape(-1, x.shape[-1])
            y = flat @ p["W"].T + p["b"]
            if layer.activation == "relu":
                y = np.maximum(y, 0.0)
            caches.append({"x": flat, "y": y, "seq_shape": seq_shape})
            x = y.reshape(seq_shape[0], seq_shape[1], -1) if seq_shape else y
        elif kind == "dropout":
            if train and layer.rate > 0.0:
                mask = _dropout_mask(rng, layer.rate, x.shape)
                caches.append({"mask": mask})
                x = x * mask
            else:
                caches.append({"mask": None})
        elif kind == "flatten":
            caches.append({"shape": x.shape})
            if x.ndim == 3:
                x = x.reshape(x.shape[0], -1)
        else:  # repeat_vector
            caches.append({})
            x = np.ascontiguousarray(np.repeat(x[:, None, :], layer.repeat, axis=1))

    pred = x[:, -1, 0] if x.ndim == 3 else x[:, 0]
    if not np.isfinite(pred).all():
        raise NumericalError("forward pass produced non-finite predictions")
    return pred, caches


def backward_batch(model: Model, caches, dpred: np.ndarray):
    """Reverse accumulation from d(loss)/d(prediction) to parameter gradients.

    ``caches`` must come from a matching forward_batch call.  Returns one
    gradient dict per layer, aligned with model.params.
    """
    spec = model.spec
    layers = effective_layers(spec)
    if len(caches) != len(layers):
        raise ValidationError("cache does not match the model's layers")
    dpred = np.asarray(dpred, dtype=np.float64)

    # Seed the output gradient: the prediction is the last step's scalar for
    # sequence outputs, or the single unit for flat outputs.
    last_cache = caches[-1]
    if last_cache.get("seq_shape") is not None:
        b, t, _ = last_cache["seq_shape"]
        dx = np.zeros((b, t, 1))
        dx[:, -1, 0] = dpred
    else:
        dx = dpred[:, None].copy()

    grads: list[dict[str, np.ndarray]] = [None] * len(layers)
    for idx in range(len(layers) - 1, -1, -1):
        layer, p, cache = layers[idx], model.params[idx], caches[idx]
        kind = layer.kind
        if kind == "lstm":
            hs, cs, gates, xin = cache["hs"], cache["cs"], cache["gates"], cache["x"]
            bsz, steps, h = hs.shape
            if layer.returns_sequence:
                dhs = np.ascontiguousarray(dx)
            else:
                dhs = np.zeros((bsz, steps, h))
                dhs[:, -1, :] = dx
            dzx = kernels.lstm_backward(gates, cs, p["U"], dhs, _ACT_CODE[layer.activation])
            dzx_flat = dzx.reshape(-1, 4 * h)
            x_flat = xin.reshape(-1, xin.shape[-1])
            h_prev = np.zeros_like(hs)
            h_prev[:, 1:, :] = hs[:, :-1, :]
            grads[idx] = {
                "W": dzx_flat.T @ x_flat,
                "U": dzx_flat.T @ h_prev.reshape(-1, h),
                "b": dzx_flat.sum(axis=0),
            }
            dx = (dzx_flat @ p["W"]).reshape(xin.shape)
        elif kind in ("dense", "time_distributed_dense"):
            x_flat, y, seq_shape = cache["x"], cache["y"], cache["seq_shape"]
            dy = dx.reshape(-1, dx.shape[-1])
            dz = dy * (y > 0.0) if layer.activation == "relu" else dy
            grads[idx] = {"W": dz.T @ x_flat, "b": dz.sum(axis=0)}
            dx = dz @ p["W"]
            if seq_shape is not None:
                dx = dx.reshape(seq_shape)
        elif kind == "dropout":
            grads[idx] = {}
            if cache["mask"] is not None:
                dx = dx * cache["mask"]
        elif kind == "flatten":
            grads[idx] = {}
            dx = dx.reshape(cache["shape"])
        else:  # repeat_vector
            grads[idx] = {}
            dx = dx.sum(axis=1)
    return grads


def forward(model: Model, window, mode: str = "infer", rng=None):
    """Single-window forward pass; returns (prediction, cache).

    ``mode`` is "train" (dropout active, needs rng) or "infer".
    """
    if mode not in ("train", "infer"):
        raise ValidationError(f"mode must be 'train' or 'infer', got {mode!r}")
    window = np.asarray(window, dtype=np.float64)
    if window.ndim != 1:
        raise ValidationError("forward expects a single 1-D window")
    if not np.isfinite(window).all():
        raise ValidationError("window contains non-finite values")
    pred, caches = forward_batch(model, window[None, :], train=(mode == "train"), rng=rng)
    return float(pred[0]), caches


def backward(model: Model, cache, d_loss_d_prediction: float):
    """Single-window companion to :func:`forward`."""
    return backward_batch(model, cache, np.array([d_loss_d_prediction]))


def predict_series(model: Model, trace: CirTrace) -> np.ndarray:
    """Predict every sample of a trace from its k predecessors.

    The trace is standardized with the model's stored scaler, each window
    predicts the next sample and predictions are mapped back to dB.  The
    first k positions have no context: they carry the input values
    themselves (zero residual by construction) and callers treat them as
    the warmup prefix.
    """
    k = model.spec.input_window
    samples = trace.samples
    if len(samples) <= k:
        raise ValidationError(f"trace of {len(samples)} samples is too short for window {k}")
    if model.scaler is None:
        raise ValidationError("model has no scaler; train it (or attach ScalerParams) first")
    std = (samples - model.scaler.mean) / model.scaler.std
    n_windows = len(samples) - k
    out = np.empty(len(samples))
    out[:k] = samples[:k]
    windows = sliding_window_view(std, k)[:n_windows]
    preds = np.empty(n_windows)
    chunk = 512
    for lo in range(0, n_windows, chunk):
        hi = min(lo + chunk, n_windows)
        preds[lo:hi], _ = forward_batch(model, windows[lo:hi], train=False)
    out[k:] = destandardize(preds, model.scaler)
    return out


def with_scaler(model: Model, scaler: ScalerParams) -> Model:
    return Model(spec=model.spec, params=model.copy_params(), scaler=scaler)
