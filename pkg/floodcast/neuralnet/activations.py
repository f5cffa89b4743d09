from typing import Callable, Dict, Literal, Tuple

import numpy as np
from scipy.special import expit

Activation = Literal["relu", "selu", "linear", "tanh", "sigmoid"]
ACTIVATION_NAMES = ("relu", "selu", "linear", "tanh", "sigmoid")

SELU_ALPHA = 1.6732632423543772848170429916717
SELU_SCALE = 1.0507009873554804934193349852946


def sigmoid(x: np.ndarray) -> np.ndarray:
    return expit(x)


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def selu(x: np.ndarray) -> np.ndarray:
    return SELU_SCALE * np.where(x > 0, x, SELU_ALPHA * np.expm1(np.minimum(x, 0.0)))


def linear(x: np.ndarray) -> np.ndarray:
    return x


def _relu_grad(pre: np.ndarray, out: np.ndarray) -> np.ndarray:
    return (pre > 0).astype(float)


def _selu_grad(pre: np.ndarray, out: np.ndarray) -> np.ndarray:
    return np.where(pre > 0, SELU_SCALE, out + SELU_SCALE * SELU_ALPHA)


def _linear_grad(pre: np.ndarray, out: np.ndarray) -> np.ndarray:
    return np.ones_like(pre)


def _tanh_grad(pre: np.ndarray, out: np.ndarray) -> np.ndarray:
    return 1.0 - out**2


def _sigmoid_grad(pre: np.ndarray, out: np.ndarray) -> np.ndarray:
    return out * (1.0 - out)


Forward = Callable[[np.ndarray], np.ndarray]
Derivative = Callable[[np.ndarray, np.ndarray], np.ndarray]

# name -> (f, f' given the pre-activation and f's output)
ACTIVATIONS: Dict[str, Tuple[Forward, Derivative]] = {
    "relu": (relu, _relu_grad),
    "selu": (selu, _selu_grad),
    "linear": (linear, _linear_grad),
    "tanh": (np.tanh, _tanh_grad),
    "sigmoid": (sigmoid, _sigmoid_grad),
}
