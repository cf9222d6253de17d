"""From-scratch Tacotron-2 building blocks with gradient-checked kernels."""
from .backward import (attention_step_backward, conv1d_backward, grad_check, linear_backward,
                       lstm_cell_backward, relative_error)
from .layers import (AttentionParams, ConvParams, LinearParams, LstmParams, attention_step, bilstm,
                     conv1d, dropout, embedding_init, embedding_lookup, linear, lstm_cell, postnet,
                     prenet, relu, sigmoid, softmax)
from .model import ForwardOutput, ModelDims, Tacotron2Params, init_params, tacotron_forward, zeros_params
from .schedule import LrSchedule, lr_at
from .weights import load_weights, save_weights

__all__ = [
    "AttentionParams", "ConvParams", "ForwardOutput", "LinearParams", "LrSchedule", "LstmParams",
    "ModelDims", "Tacotron2Params", "attention_step", "attention_step_backward", "bilstm", "conv1d",
    "conv1d_backward", "dropout", "embedding_init", "embedding_lookup", "grad_check", "init_params",
    "linear", "linear_backward", "load_weights", "lr_at", "lstm_cell", "lstm_cell_backward", "postnet",
    "prenet", "relative_error", "relu", "save_weights", "sigmoid", "softmax", "tacotron_forward",
    "zeros_params",
]
