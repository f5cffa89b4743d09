"""Dense, LSTM and GRU layers with hand-written backward passes.

Gate blocks are laid out along the last axis of the kernels: ``[i, f, g, o]``
for the LSTM and ``[z, r, h]`` for the GRU. A forward pass returns its output
and a tape; the backward pass consumes the tape and the gradient of the
output, and returns the input gradient and one gradient per parameter.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np

from floodcast.errors import InvalidConfigError, ShapeMismatchError

from .activations import ACTIVATIONS, Activation, sigmoid

CellType = Literal["LSTM", "GRU"]
GATES: Dict[str, int] = {"LSTM": 4, "GRU": 3}
Grads = Dict[str, np.ndarray]


@dataclass(eq=False)
class DenseLayer:
    kernel: np.ndarray
    bias: np.ndarray
    activation: Activation = "linear"

    def __post_init__(self) -> None:
        if self.activation not in ACTIVATIONS:
            raise InvalidConfigError(f"unknown activation {self.activation!r}")
        if self.kernel.ndim != 2 or self.bias.shape != (self.kernel.shape[1],):
            raise ShapeMismatchError(
                f"kernel {self.kernel.shape} and bias {self.bias.shape} disagree"
            )

    @property
    def n_in(self) -> int:
        return self.kernel.shape[0]

    @property
    def n_out(self) -> int:
        return self.kernel.shape[1]

    def parameters(self) -> Dict[str, np.ndarray]:
        return {"kernel": self.kernel, "bias": self.bias}


@dataclass(eq=False)
class RecurrentLayer:
    cell_type: CellType
    kernel: np.ndarray
    recurrent_kernel: np.ndarray
    bias: np.ndarray

    def __post_init__(self) -> None:
        if self.cell_type not in GATES:
            raise InvalidConfigError(f"unknown cell type {self.cell_type!r}")
        width = GATES[self.cell_type] * self.units
        if (
            self.kernel.ndim != 2
            or self.kernel.shape[1] != width
            or self.recurrent_kernel.shape != (self.units, width)
            or self.bias.shape != (width,)
        ):
            raise ShapeMismatchError(
                f"{self.cell_type} shapes disagree: W {self.kernel.shape}, "
                f"U {self.recurrent_kernel.shape}, b {self.bias.shape}"
            )

    @property
    def units(self) -> int:
        return self.recurrent_kernel.shape[0]

    @property
    def n_in(self) -> int:
        return self.kernel.shape[0]

    def parameters(self) -> Dict[str, np.ndarray]:
        return {
            "kernel": self.kernel,
            "recurrent_kernel": self.recurrent_kernel,
            "bias": self.bias,
        }


# %% initialization
def glorot_uniform(rng: np.random.Generator, n_in: int, n_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (n_in + n_out))
    return rng.uniform(-limit, limit, size=(n_in, n_out))


def orthogonal(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    a = rng.standard_normal((max(rows, cols), min(rows, cols)))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))
    return q if rows >= cols else q.T


def init_dense(
    rng: np.random.Generator, n_in: int, n_out: int, activation: Activation
) -> DenseLayer:
    return DenseLayer(
        kernel=glorot_uniform(rng, n_in, n_out),
        bias=np.zeros(n_out),
        activation=activation,
    )


def init_recurrent(
    rng: np.random.Generator, cell_type: CellType, n_in: int, units: int
) -> RecurrentLayer:
    """Glorot input kernel, orthogonal recurrent blocks, zero bias.

    The LSTM forget-gate bias starts at 1.
    """
    gates = GATES[cell_type]
    kernel = glorot_uniform(rng, n_in, gates * units)
    recurrent = np.concatenate(
        [orthogonal(rng, units, units) for _ in range(gates)], axis=1
    )
    bias = np.zeros(gates * units)
    if cell_type == "LSTM":
        bias[units : 2 * units] = 1.0
    return RecurrentLayer(cell_type, kernel, recurrent, bias)


# %% dense
@dataclass
class DenseTape:
    inputs: np.ndarray
    pre: np.ndarray
    out: np.ndarray


def dense_forward(layer: DenseLayer, x: np.ndarray) -> Tuple[np.ndarray, DenseTape]:
    if x.ndim != 2 or x.shape[1] != layer.n_in:
        raise ShapeMismatchError(f"dense expects [n, {layer.n_in}], got {x.shape}")
    f, _ = ACTIVATIONS[layer.activation]
    pre = x @ layer.kernel + layer.bias
    out = f(pre)
    return out, DenseTape(x, pre, out)


def dense_backward(
    layer: DenseLayer, tape: DenseTape, grad_out: np.ndarray
) -> Tuple[np.ndarray, Grads]:
    if grad_out.shape != tape.out.shape:
        raise ShapeMismatchError(
            f"gradient {grad_out.shape} does not match output {tape.out.shape}"
        )
    _, df = ACTIVATIONS[layer.activation]
    grad_pre = grad_out * df(tape.pre, tape.out)
    grads = {
        "kernel": tape.inputs.T @ grad_pre,
        "bias": grad_pre.sum(axis=0),
    }
    return grad_pre @ layer.kernel.T, grads


# %% recurrent
@dataclass
class RecurrentTape:
    inputs: np.ndarray
    h0: np.ndarray
    steps: List[Dict[str, np.ndarray]] = field(default_factory=list)
    c0: Optional[np.ndarray] = None


def _check_sequence(layer: RecurrentLayer, x: np.ndarray) -> None:
    if x.ndim != 3 or x.shape[2] != layer.n_in:
        raise ShapeMismatchError(
            f"{layer.cell_type} expects [n, L, {layer.n_in}], got {x.shape}"
        )


def lstm_step(
    layer: RecurrentLayer, x_t: np.ndarray, h: np.ndarray, c: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, Dict[str, np.ndarray]]:
    u = layer.units
    a = x_t @ layer.kernel + h @ layer.recurrent_kernel + layer.bias
    i = sigmoid(a[:, :u])
    f = sigmoid(a[:, u : 2 * u])
    g = np.tanh(a[:, 2 * u : 3 * u])
    o = sigmoid(a[:, 3 * u :])
    c_next = f * c + i * g
    tanh_c = np.tanh(c_next)
    h_next = o * tanh_c
    cache = {"i": i, "f": f, "g": g, "o": o, "tanh_c": tanh_c}
    return h_next, c_next, cache


def lstm_forward(
    layer: RecurrentLayer,
    x: np.ndarray,
    h0: Optional[np.ndarray] = None,
    c0: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, RecurrentTape]:
    """Hidden state of every step, shape ``[n, L, units]``."""
    if layer.cell_type != "LSTM":
        raise InvalidConfigError(f"not an LSTM layer: {layer.cell_type}")
    _check_sequence(layer, x)
    n, steps, _ = x.shape
    h = np.zeros((n, layer.units)) if h0 is None else h0
    c = np.zeros((n, layer.units)) if c0 is None else c0
    tape = RecurrentTape(inputs=x, h0=h, c0=c)
    out = np.empty((n, steps, layer.units))
    for t in range(steps):
        h_prev, c_prev = h, c
        h, c, cache = lstm_step(layer, x[:, t], h, c)
        cache.update(h_prev=h_prev, c_prev=c_prev)
        tape.steps.append(cache)
        out[:, t] = h
    return out, tape


def lstm_backward(
    layer: RecurrentLayer, tape: RecurrentTape, grad_out: np.ndarray
) -> Tuple[np.ndarray, Grads]:
    """Backpropagation through time over the whole taped sequence."""
    x = tape.inputs
    n, steps, _ = x.shape
    u = layer.units
    if grad_out.shape != (n, steps, u):
        raise ShapeMismatchError(
            f"gradient {grad_out.shape} does not match output {(n, steps, u)}"
        )
    d_kernel = np.zeros_like(layer.kernel)
    d_recurrent = np.zeros_like(layer.recurrent_kernel)
    d_bias = np.zeros_like(layer.bias)
    d_x = np.empty_like(x)
    dh_next = np.zeros((n, u))
    dc_next = np.zeros((n, u))
    for t in reversed(range(steps)):
        s = tape.steps[t]
        dh = grad_out[:, t] + dh_next
        d_o = dh * s["tanh_c"]
        dc = dh * s["o"] * (1.0 - s["tanh_c"] ** 2) + dc_next
        d_i = dc * s["g"]
        d_g = dc * s["i"]
        d_f = dc * s["c_prev"]
        dc_next = dc * s["f"]
        da = np.concatenate(
            [
                d_i * s["i"] * (1.0 - s["i"]),
                d_f * s["f"] * (1.0 - s["f"]),
                d_g * (1.0 - s["g"] ** 2),
                d_o * s["o"] * (1.0 - s["o"]),
            ],
            axis=1,
        )
        d_kernel += x[:, t].T @ da
        d_recurrent += s["h_prev"].T @ da
        d_bias += da.sum(axis=0)
        d_x[:, t] = da @ layer.kernel.T
        dh_next = da @ layer.recurrent_kernel.T
    grads = {"kernel": d_kernel, "recurrent_kernel": d_recurrent, "bias": d_bias}
    return d_x, grads


def gru_step(
    layer: RecurrentLayer, x_t: np.ndarray, h: np.ndarray
) -> Tuple[np.ndarray, Dict[str, np.ndarray]]:
    """``h' = z * h + (1 - z) * h_hat``; the reset gate acts before ``U_h``."""
    u = layer.units
    U = layer.recurrent_kernel
    a_x = x_t @ layer.kernel + layer.bias
    z = sigmoid(a_x[:, :u] + h @ U[:, :u])
    r = sigmoid(a_x[:, u : 2 * u] + h @ U[:, u : 2 * u])
    h_hat = np.tanh(a_x[:, 2 * u :] + (r * h) @ U[:, 2 * u :])
    h_next = z * h + (1.0 - z) * h_hat
    return h_next, {"z": z, "r": r, "h_hat": h_hat}


def gru_forward(
    layer: RecurrentLayer, x: np.ndarray, h0: Optional[np.ndarray] = None
) -> Tuple[np.ndarray, RecurrentTape]:
    if layer.cell_type != "GRU":
        raise InvalidConfigError(f"not a GRU layer: {layer.cell_type}")
    _check_sequence(layer, x)
    n, steps, _ = x.shape
    h = np.zeros((n, layer.units)) if h0 is None else h0
    tape = RecurrentTape(inputs=x, h0=h)
    out = np.empty((n, steps, layer.units))
    for t in range(steps):
        h_prev = h
        h, cache = gru_step(layer, x[:, t], h)
        cache["h_prev"] = h_prev
        tape.steps.append(cache)
        out[:, t] = h
    return out, tape


def gru_backward(
    layer: RecurrentLayer, tape: RecurrentTape, grad_out: np.ndarray
) -> Tuple[np.ndarray, Grads]:
    x = tape.inputs
    n, steps, _ = x.shape
    u = layer.units
    if grad_out.shape != (n, steps, u):
        raise ShapeMismatchError(
            f"gradient {grad_out.shape} does not match output {(n, steps, u)}"
        )
    U = layer.recurrent_kernel
    d_kernel = np.zeros_like(layer.kernel)
    d_recurrent = np.zeros_like(U)
    d_bias = np.zeros_like(layer.bias)
    d_x = np.empty_like(x)
    dh_next = np.zeros((n, u))
    for t in reversed(range(steps)):
        s = tape.steps[t]
        h_prev, z, r, h_hat = s["h_prev"], s["z"], s["r"], s["h_hat"]
        dh = grad_out[:, t] + dh_next
        dz = dh * (h_prev - h_hat)
        da_h = dh * (1.0 - z) * (1.0 - h_hat**2)
        d_rh = da_h @ U[:, 2 * u :].T
        da_r = d_rh * h_prev * r * (1.0 - r)
        da_z = dz * z * (1.0 - z)
        da = np.concatenate([da_z, da_r, da_h], axis=1)

        d_kernel += x[:, t].T @ da
        d_bias += da.sum(axis=0)
        d_recurrent[:, :u] += h_prev.T @ da_z
        d_recurrent[:, u : 2 * u] += h_prev.T @ da_r
        d_recurrent[:, 2 * u :] += (r * h_prev).T @ da_h
        d_x[:, t] = da @ layer.kernel.T
        dh_next = (
            dh * z
            + d_rh * r
            + da_z @ U[:, :u].T
            + da_r @ U[:, u : 2 * u].T
        )
    grads = {"kernel": d_kernel, "recurrent_kernel": d_recurrent, "bias": d_bias}
    return d_x, grads


def recurrent_forward(
    layer: RecurrentLayer, x: np.ndarray
) -> Tuple[np.ndarray, RecurrentTape]:
    if layer.cell_type == "LSTM":
        return lstm_forward(layer, x)
    return gru_forward(layer, x)


def recurrent_backward(
    layer: RecurrentLayer, tape: RecurrentTape, grad_out: np.ndarray
) -> Tuple[np.ndarray, Grads]:
    if layer.cell_type == "LSTM":
        return lstm_backward(layer, tape, grad_out)
    return gru_backward(layer, tape, grad_out)
