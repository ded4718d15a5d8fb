"""Pure-numpy fallback for the time-step kernels.

Semantics match cirpeaks.kernels._speedups exactly; only the per-step loop
overhead differs.  See the package __init__ for the selection logic.
"""

from __future__ import annotations

import numpy as np

NAME = "pure-python"

ACT_RELU = 0
ACT_LINEAR = 1


def _sigmoid(z):
    # Split by sign to stay overflow-free for large |z|.
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def lstm_forward(zx, u, act):
    """Run an LSTM layer over a batch of sequences.

    zx   (B, T, 4H) input projections x_t @ W.T + b, gate blocks [i, f, o, g]
    u    (4H, H) recurrent weights
    act  ACT_RELU or ACT_LINEAR, the candidate/cell-output activation

    Initial hidden and cell state are zero.  Returns (hs, cs, gates) with
    shapes (B, T, H), (B, T, H), (B, T, 4H); gates hold post-activation
    values.
    """
    B, T, H4 = zx.shape
    H = H4 // 4
    hs = np.empty((B, T, H))
    cs = np.empty((B, T, H))
    gates = np.empty((B, T, H4))
    h = np.zeros((B, H))
    c = np.zeros((B, H))
    for t in range(T):
        z = zx[:, t, :] + h @ u.T
        i = _sigmoid(z[:, :H])
        f = _sigmoid(z[:, H : 2 * H])
        o = _sigmoid(z[:, 2 * H : 3 * H])
        g = z[:, 3 * H :]
        if act == ACT_RELU:
            g = np.maximum(g, 0.0)
        c = f * c + i * g
        a = np.maximum(c, 0.0) if act == ACT_RELU else c
        h = o * a
        gates[:, t, :H] = i
        gates[:, t, H : 2 * H] = f
        gates[:, t, 2 * H : 3 * H] = o
        gates[:, t, 3 * H :] = g
        cs[:, t, :] = c
        hs[:, t, :] = h
    return hs, cs, gates


def lstm_backward(gates, cs, u, dhs, act):
    """Backpropagate through time for :func:`lstm_forward`.

    dhs is the loss gradient w.r.t. every hidden-state output (zero rows for
    steps without upstream gradient).  Returns dzx, the gradient w.r.t. the
    input projections; weight and input gradients follow from dzx outside
    the kernel via batched matmuls.
    """
    B, T, H4 = gates.shape
    H = H4 // 4
    dzx = np.empty((B, T, H4))
    dh_rec = np.zeros((B, H))
    dc_rec = np.zeros((B, H))
    for t in range(T - 1, -1, -1):
        i = gates[:, t, :H]
        f = gates[:, t, H : 2 * H]
        o = gates[:, t, 2 * H : 3 * H]
        g = gates[:, t, 3 * H :]
        c = cs[:, t, :]
        c_prev = cs[:, t - 1, :] if t > 0 else np.zeros((B, H))
        dh = dhs[:, t, :] + dh_rec
        a = np.maximum(c, 0.0) if act == ACT_RELU else c
        do = dh * a
        da = dh * o
        dc = dc_rec + (da * (c > 0.0) if act == ACT_RELU else da)
        di = dc * g
        df = dc * c_prev
        dg = dc * i
        dc_rec = dc * f
        dzx[:, t, :H] = di * i * (1.0 - i)
        dzx[:, t, H : 2 * H] = df * f * (1.0 - f)
        dzx[:, t, 2 * H : 3 * H] = do * o * (1.0 - o)
        dzx[:, t, 3 * H :] = dg * (g > 0.0) if act == ACT_RELU else dg
        dh_rec = dzx[:, t, :] @ u
    return dzx


def biquad_pass(sections, x, zi):
    """Single causal pass of a biquad cascade (direct form II transposed).

    sections  (S, 5) rows [b0, b1, b2, a1, a2] (a0 = 1)
    x         input series
    zi        (S, 2) initial [z1, z2] state per section
    """
    y = np.array(x, dtype=np.float64)
    n = y.size
    for s in range(sections.shape[0]):
        b0, b1, b2, a1, a2 = (float(v) for v in sections[s])
        z1 = float(zi[s, 0])
        z2 = float(zi[s, 1])
        for idx in range(n):
            xn = y[idx]
            yn = b0 * xn + z1
            z1 = b1 * xn - a1 * yn + z2
            z2 = b2 * xn - a2 * yn
            y[idx] = yn
    return y
