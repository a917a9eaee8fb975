"""Minimal neural computation core: layers, losses, Adam, gradient checks."""

from .gradcheck import gradient_check, relative_error
from .layers import (
    LstmParams,
    bilstm,
    bilstm_backward,
    bilstm_forward,
    dense,
    dense_backward,
    dense_forward,
    dropout,
    dropout_backward,
    dropout_forward,
    lstm_step,
    lstm_step_backward,
    lstm_step_forward,
    sigmoid,
    softmax,
)
from .losses import (
    bce_loss_and_dlogits,
    cce_loss_and_dlogits,
    weighted_bce,
    weighted_cce,
)
from .optim import AdamState, adam_update

__all__ = [
    "AdamState",
    "LstmParams",
    "adam_update",
    "bce_loss_and_dlogits",
    "bilstm",
    "bilstm_backward",
    "bilstm_forward",
    "cce_loss_and_dlogits",
    "dense",
    "dense_backward",
    "dense_forward",
    "dropout",
    "dropout_backward",
    "dropout_forward",
    "gradient_check",
    "lstm_step",
    "lstm_step_backward",
    "lstm_step_forward",
    "relative_error",
    "sigmoid",
    "softmax",
    "weighted_bce",
    "weighted_cce",
]
