"""Dense, LSTM, bidirectional-LSTM and dropout layers with hand-written
backward passes.

All computation is float64 numpy. Batched inputs use shape (B, ...) in the
leading axis; LSTM sequences are (B, T, d) with a per-sample true length so
tail padding never influences the output.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import ConfigError

ACTIVATIONS = ("identity", "relu", "sigmoid", "tanh", "softmax")

# LSTM parameter initialization: uniform weights, forget-gate bias 1.0
WEIGHT_INIT_RANGE = 0.05
FORGET_BIAS = 1.0


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=float)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    shifted = x - np.max(x, axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=axis, keepdims=True)


def _apply_activation(z: np.ndarray, act: str) -> np.ndarray:
    if act == "identity":
        return z
    if act == "relu":
        return np.maximum(z, 0.0)
    if act == "sigmoid":
        return sigmoid(z)
    if act == "tanh":
        return np.tanh(z)
    if act == "softmax":
        return softmax(z)
    raise ValueError(f"unknown activation {act!r}, expected one of {ACTIVATIONS}")


def _activation_grad(dy: np.ndarray, y: np.ndarray, act: str) -> np.ndarray:
    """dL/dz given dL/dy and y = act(z). Softmax is only supported fused
    with cross-entropy, where dL/dz is computed directly."""
    if act == "identity":
        return dy
    if act == "relu":
        return dy * (y > 0)
    if act == "sigmoid":
        return dy * y * (1.0 - y)
    if act == "tanh":
        return dy * (1.0 - y * y)
    raise ValueError(f"no standalone backward for activation {act!r}")


def dense(x: np.ndarray, W: np.ndarray, b: np.ndarray, act: str = "identity") -> np.ndarray:
    """act(W x + b) for a single vector or a (B, n) batch."""
    y, _ = dense_forward(x, W, b, act)
    return y


def dense_forward(x, W, b, act="identity"):
    x = np.asarray(x, dtype=float)
    if W.ndim != 2 or b.ndim != 1 or W.shape[0] != b.shape[0] or x.shape[-1] != W.shape[1]:
        raise ConfigError(
            f"dense shape mismatch: x {x.shape}, W {W.shape}, b {b.shape}"
        )
    z = x @ W.T + b
    y = _apply_activation(z, act)
    return y, (x, W, y, act)


def dense_backward(dy, cache):
    x, W, y, act = cache
    dz = _activation_grad(dy, y, act)
    if x.ndim == 1:
        dW = np.outer(dz, x)
        db = dz
    else:
        dW = dz.T @ x
        db = dz.sum(axis=0)
    dx = dz @ W
    return dx, dW, db


@dataclass
class LstmParams:
    """Gate-stacked LSTM parameters, gate order (i, f, g, o)."""

    W: np.ndarray  # (4h, d) input-to-gates
    U: np.ndarray  # (4h, h) hidden-to-gates
    b: np.ndarray  # (4h,)

    def __post_init__(self):
        h = self.hidden_size
        if self.W.shape[0] != 4 * h or self.U.shape != (4 * h, h) or self.b.shape != (4 * h,):
            raise ConfigError(
                f"inconsistent LSTM shapes: W {self.W.shape}, U {self.U.shape}, b {self.b.shape}"
            )

    @property
    def hidden_size(self) -> int:
        return self.U.shape[1]

    @property
    def input_size(self) -> int:
        return self.W.shape[1]

    @classmethod
    def init(cls, input_size: int, hidden_size: int, rng: np.random.Generator) -> "LstmParams":
        shape_w = (4 * hidden_size, input_size)
        shape_u = (4 * hidden_size, hidden_size)
        b = np.zeros(4 * hidden_size)
        b[hidden_size : 2 * hidden_size] = FORGET_BIAS
        return cls(
            W=rng.uniform(-WEIGHT_INIT_RANGE, WEIGHT_INIT_RANGE, shape_w),
            U=rng.uniform(-WEIGHT_INIT_RANGE, WEIGHT_INIT_RANGE, shape_u),
            b=b,
        )


def lstm_step(
    p: LstmParams, x: np.ndarray, h_prev: np.ndarray, c_prev: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """One LSTM cell update: sigmoid input/forget/output gates, tanh
    candidate; c = f*c_prev + i*g, h = o*tanh(c)."""
    h, c, _ = lstm_step_forward(p, x, h_prev, c_prev)
    return h, c


def lstm_step_forward(p, x, h_prev, c_prev):
    x = np.asarray(x, dtype=float)
    h_prev = np.asarray(h_prev, dtype=float)
    c_prev = np.asarray(c_prev, dtype=float)
    h = p.hidden_size
    if x.shape[-1] != p.input_size or h_prev.shape[-1] != h or c_prev.shape[-1] != h:
        raise ConfigError(
            f"lstm shape mismatch: x {x.shape}, h {h_prev.shape}, c {c_prev.shape}, "
            f"expected input {p.input_size}, hidden {h}"
        )
    z = x @ p.W.T + h_prev @ p.U.T + p.b
    zi, zf, zg, zo = np.split(z, 4, axis=-1)
    i = sigmoid(zi)
    f = sigmoid(zf)
    g = np.tanh(zg)
    o = sigmoid(zo)
    c = f * c_prev + i * g
    tc = np.tanh(c)
    h_new = o * tc
    cache = (p, x, h_prev, c_prev, i, f, g, o, tc)
    return h_new, c, cache


def lstm_step_backward(dh, dc, cache):
    p, x, h_prev, c_prev, i, f, g, o, tc = cache
    do = dh * tc
    dc_total = dc + dh * o * (1.0 - tc * tc)
    di = dc_total * g
    df = dc_total * c_prev
    dg = dc_total * i
    dc_prev = dc_total * f
    dz = np.concatenate(
        [
            di * i * (1.0 - i),
            df * f * (1.0 - f),
            dg * (1.0 - g * g),
            do * o * (1.0 - o),
        ],
        axis=-1,
    )
    dx = dz @ p.W
    dh_prev = dz @ p.U
    if x.ndim == 1:
        dW = np.outer(dz, x)
        dU = np.outer(dz, h_prev)
        db = dz
    else:
        dW = dz.T @ x
        dU = dz.T @ h_prev
        db = dz.sum(axis=0)
    return dx, dh_prev, dc_prev, dW, dU, db


def lstm_sequence_forward(p, X, lengths, reverse=False):
    """Run an LSTM over (B, T, d) inputs, freezing each sample's state once
    its true length is exhausted. Returns the final hidden state (B, h)."""
    B, T, _ = X.shape
    h = np.zeros((B, p.hidden_size))
    c = np.zeros((B, p.hidden_size))
    caches = []
    steps = range(T - 1, -1, -1) if reverse else range(T)
    for t in steps:
        active = (lengths > t)[:, None]
        h_new, c_new, cache = lstm_step_forward(p, X[:, t, :], h, c)
        h = np.where(active, h_new, h)
        c = np.where(active, c_new, c)
        caches.append((t, active, cache))
    return h, caches


def lstm_sequence_backward(dh_final, caches, input_shape):
    dX = np.zeros(input_shape)
    dh = dh_final.copy()
    dc = np.zeros_like(dh_final)
    dW = dU = db = None
    for t, active, cache in reversed(caches):
        dx, dh_prev, dc_prev, dWt, dUt, dbt = lstm_step_backward(dh * active, dc * active, cache)
        dX[:, t, :] = dx
        dh = np.where(active, dh_prev, dh)
        dc = np.where(active, dc_prev, dc)
        if dW is None:
            dW, dU, db = dWt, dUt, dbt
        else:
            dW += dWt
            dU += dUt
            db += dbt
    return dX, dW, dU, db


def bilstm_forward(p_fwd, p_bwd, X, lengths):
    """Concatenated final states of a forward and a backward pass, (B, 2h)."""
    h_fwd, caches_fwd = lstm_sequence_forward(p_fwd, X, lengths, reverse=False)
    h_bwd, caches_bwd = lstm_sequence_forward(p_bwd, X, lengths, reverse=True)
    out = np.concatenate([h_fwd, h_bwd], axis=-1)
    return out, (caches_fwd, caches_bwd, X.shape, p_fwd.hidden_size)


def bilstm_backward(dout, cache):
    caches_fwd, caches_bwd, input_shape, h = cache
    dX_f, dWf, dUf, dbf = lstm_sequence_backward(dout[:, :h], caches_fwd, input_shape)
    dX_b, dWb, dUb, dbb = lstm_sequence_backward(dout[:, h:], caches_bwd, input_shape)
    grads = {
        "fwd.W": dWf,
        "fwd.U": dUf,
        "fwd.b": dbf,
        "bwd.W": dWb,
        "bwd.U": dUb,
        "bwd.b": dbb,
    }
    return dX_f + dX_b, grads


def bilstm(
    p_fwd: LstmParams,
    p_bwd: LstmParams,
    xs: Sequence[np.ndarray],
    true_len: int,
) -> np.ndarray:
    """Single-sequence BiLSTM encoding: forward over positions
    0..true_len-1, backward over true_len-1..0, final states concatenated.
    Padding beyond true_len is ignored; true_len 0 gives a zero vector."""
    X = np.asarray(xs, dtype=float)
    if X.ndim != 2:
        raise ConfigError(f"expected a (T, d) sequence, got shape {X.shape}")
    if true_len > X.shape[0]:
        raise ValueError(f"true_len {true_len} exceeds sequence length {X.shape[0]}")
    out, _ = bilstm_forward(p_fwd, p_bwd, X[None, :, :], np.array([true_len]))
    return out[0]


def dropout(
    x: np.ndarray,
    rate: float,
    training: bool = True,
    rng: np.random.Generator | int | None = None,
) -> np.ndarray:
    """Inverted dropout: zero entries with probability ``rate`` and scale
    survivors by 1/(1-rate) during training; identity at inference."""
    y, _ = dropout_forward(x, rate, training, rng)
    return y


def dropout_forward(x, rate, training=True, rng=None):
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if not training or rate == 0.0:
        return x, None
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    mask = (rng.random(x.shape) >= rate) / (1.0 - rate)
    return x * mask, mask


def dropout_backward(dy, mask):
    return dy if mask is None else dy * mask
