from .activations import ACTIVATION_NAMES, ACTIVATIONS, Activation, relu, selu, sigmoid
from .gradcheck import (
    Differentiable,
    GradCheckResult,
    grad_check,
    numeric_gradients,
    relative_error,
)
from .layers import (
    GATES,
    CellType,
    DenseLayer,
    DenseTape,
    RecurrentLayer,
    RecurrentTape,
    dense_backward,
    dense_forward,
    gru_backward,
    gru_forward,
    gru_step,
    init_dense,
    init_recurrent,
    lstm_backward,
    lstm_forward,
    lstm_step,
    recurrent_backward,
    recurrent_forward,
)
from .loss import RegSpec, mae_loss, reg_penalty
from .nadam import NadamState, nadam_step
from .serialize import (
    MODEL_FORMAT_VERSION,
    layer_from_dict,
    layer_to_dict,
    layers_from_list,
    layers_to_list,
)

__all__ = [
    "ACTIVATIONS",
    "ACTIVATION_NAMES",
    "Activation",
    "CellType",
    "DenseLayer",
    "DenseTape",
    "Differentiable",
    "GATES",
    "GradCheckResult",
    "MODEL_FORMAT_VERSION",
    "NadamState",
    "RecurrentLayer",
    "RecurrentTape",
    "RegSpec",
    "dense_backward",
    "dense_forward",
    "grad_check",
    "gru_backward",
    "gru_forward",
    "gru_step",
    "init_dense",
    "init_recurrent",
    "layer_from_dict",
    "layer_to_dict",
    "layers_from_list",
    "layers_to_list",
    "lstm_backward",
    "lstm_forward",
    "lstm_step",
    "mae_loss",
    "nadam_step",
    "numeric_gradients",
    "recurrent_backward",
    "recurrent_forward",
    "reg_penalty",
    "relative_error",
    "relu",
    "selu",
    "sigmoid",
]
