"""Pure numpy GRU recurrence; the fallback when the compiled kernel is absent.

Gate layout along the last axis is (reset, update, candidate), each of width
``h``. ``gx`` already holds the input projections ``x @ W_x + b_x``; these
kernels only run the recurrence over ``h_{t-1} @ W_h + b_h``:

    r = sigmoid(gx_r + gh_r)
    z = sigmoid(gx_z + gh_z)
    n = tanh(gx_n + r * gh_n)
    h_t = (1 - z) * n + z * h_{t-1}

with ``h_0 = 0``.
"""

import numpy as np


def _sigmoid(x):
    return 0.5 * (np.tanh(0.5 * x) + 1.0)


def gru_forward(gx, w_h, b_h):
    """Return ``(hs, r, z, n, ghn)``; ``hs`` has L+1 rows, row 0 is h_0."""
    length = gx.shape[0]
    h = w_h.shape[0]
    hs = np.zeros((length + 1, h))
    r = np.empty((length, h))
    z = np.empty((length, h))
    n = np.empty((length, h))
    ghn = np.empty((length, h))
    for t in range(length):
        gh = hs[t] @ w_h + b_h
        r[t] = _sigmoid(gx[t, :h] + gh[:h])
        z[t] = _sigmoid(gx[t, h:2 * h] + gh[h:2 * h])
        ghn[t] = gh[2 * h:]
        n[t] = np.tanh(gx[t, 2 * h:] + r[t] * ghn[t])
        hs[t + 1] = (1.0 - z[t]) * n[t] + z[t] * hs[t]
    return hs, r, z, n, ghn


def gru_backward(dout, hs, r, z, n, ghn, w_h):
    """Backpropagate through time. Returns ``(dgx, dw_h, db_h)``."""
    length, h = dout.shape
    dgx = np.zeros((length, 3 * h))
    dw_h = np.zeros_like(w_h)
    db_h = np.zeros(3 * h)
    dh_next = np.zeros(h)
    w_h_t = w_h.T
    for t in range(length - 1, -1, -1):
        dh = dout[t] + dh_next
        dn = dh * (1.0 - z[t])
        dz = dh * (hs[t] - n[t])
        da_n = dn * (1.0 - n[t] * n[t])
        da_r = da_n * ghn[t] * r[t] * (1.0 - r[t])
        da_z = dz * z[t] * (1.0 - z[t])
        dgx[t, :h] = da_r
        dgx[t, h:2 * h] = da_z
        dgx[t, 2 * h:] = da_n
        dgh = np.concatenate([da_r, da_z, da_n * r[t]])
        dw_h += np.outer(hs[t], dgh)
        db_h += dgh
        dh_next = dh * z[t] + dgh @ w_h_t
    return dgx, dw_h, db_h
