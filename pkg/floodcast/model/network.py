"""The two-branch depth regressor.

The recurrent branch reads the look-back window, stacked layers passing on
their whole hidden sequence. Its last hidden state is concatenated with the
output of the dense spatial branch and fed to the dense head.
"""
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from floodcast.errors import InvalidConfigError, ShapeMismatchError
from floodcast.neuralnet import (
    DenseLayer,
    DenseTape,
    RecurrentLayer,
    RecurrentTape,
    RegSpec,
    dense_backward,
    dense_forward,
    init_dense,
    init_recurrent,
    mae_loss,
    recurrent_backward,
    recurrent_forward,
    reg_penalty,
)
from floodcast.windowing import SampleBatch

from .config import N_SPATIAL, ArchConfig

Layer = Union[DenseLayer, RecurrentLayer]


@dataclass
class ForwardTape:
    temporal: List[RecurrentTape]
    spatial: List[DenseTape]
    head: List[DenseTape]
    steps: int


class TwoBranchModel:
    def __init__(
        self,
        config: ArchConfig,
        temporal: List[RecurrentLayer],
        spatial: List[DenseLayer],
        head: List[DenseLayer],
        reg: Optional[RegSpec] = None,
    ):
        self.config = config
        self.temporal = temporal
        self.spatial = spatial
        self.head = head
        self.reg = reg or RegSpec()
        self._check_shapes()

    def _check_shapes(self) -> None:
        c = self.config
        if len(self.temporal) != c.rnn_layers or len(self.spatial) != c.spatial_layers:
            raise ShapeMismatchError("layer counts do not match the architecture")
        if [d.n_out for d in self.head] != list(c.head_units):
            raise ShapeMismatchError("head widths do not match the architecture")
        n_in = c.temporal_width
        for layer in self.temporal:
            if layer.n_in != n_in or layer.cell_type != c.rnn_type:
                raise ShapeMismatchError(f"unexpected recurrent layer {layer.n_in}")
            n_in = layer.units
        n_in = N_SPATIAL
        for dense in self.spatial:
            if dense.n_in != n_in:
                raise ShapeMismatchError(f"unexpected spatial layer {dense.n_in}")
            n_in = dense.n_out
        if self.head[0].n_in != self.temporal[-1].units + self.spatial[-1].n_out:
            raise ShapeMismatchError("head input does not match the branch outputs")

    @property
    def layers(self) -> List[Tuple[str, Layer]]:
        named: List[Tuple[str, Layer]] = []
        for branch, layers in (
            ("temporal", self.temporal),
            ("spatial", self.spatial),
            ("head", self.head),
        ):
            named.extend((f"{branch}.{k}", layer) for k, layer in enumerate(layers))
        return named

    def parameters(self) -> Dict[str, np.ndarray]:
        """Live parameter arrays keyed ``<branch>.<layer>.<tensor>``."""
        return {
            f"{prefix}.{name}": array
            for prefix, layer in self.layers
            for name, array in layer.parameters().items()
        }

    def set_parameters(self, params: Dict[str, np.ndarray]) -> None:
        missing = sorted(set(self.parameters()) - set(params))
        if missing:
            raise ShapeMismatchError(f"missing parameters {missing}")
        for prefix, layer in self.layers:
            for name in layer.parameters():
                value = params[f"{prefix}.{name}"]
                if value.shape != getattr(layer, name).shape:
                    raise ShapeMismatchError(f"{prefix}.{name}: shape {value.shape}")
                setattr(layer, name, value)

    @property
    def n_parameters(self) -> int:
        return sum(p.size for p in self.parameters().values())

    # %% forward / backward
    def forward(
        self, temporal: np.ndarray, spatial: np.ndarray
    ) -> Tuple[np.ndarray, ForwardTape]:
        if temporal.ndim != 3 or temporal.shape[2] != self.config.temporal_width:
            raise ShapeMismatchError(
                f"temporal input must be [n, L, {self.config.temporal_width}], "
                f"got {temporal.shape}"
            )
        if spatial.shape != (temporal.shape[0], N_SPATIAL):
            raise ShapeMismatchError(
                f"spatial input must be [{temporal.shape[0]}, 3], got {spatial.shape}"
            )
        tape = ForwardTape([], [], [], steps=temporal.shape[1])
        h = temporal
        for layer in self.temporal:
            h, t = recurrent_forward(layer, h)
            tape.temporal.append(t)
        s = spatial
        for dense in self.spatial:
            s, d = dense_forward(dense, s)
            tape.spatial.append(d)
        z = np.concatenate([h[:, -1, :], s], axis=1)
        for dense in self.head:
            z, d = dense_forward(dense, z)
            tape.head.append(d)
        return z[:, 0], tape

    def backward(
        self, tape: ForwardTape, grad_out: np.ndarray
    ) -> Dict[str, np.ndarray]:
        """Gradients of the prediction loss only, keyed like ``parameters``."""
        grads: Dict[str, np.ndarray] = {}
        g = grad_out.reshape(-1, 1)
        for k in reversed(range(len(self.head))):
            g, layer_grads = dense_backward(self.head[k], tape.head[k], g)
            grads.update({f"head.{k}.{n}": v for n, v in layer_grads.items()})
        units = self.temporal[-1].units
        g_last, g_spatial = g[:, :units], g[:, units:]
        for k in reversed(range(len(self.spatial))):
            g_spatial, layer_grads = dense_backward(
                self.spatial[k], tape.spatial[k], g_spatial
            )
            grads.update({f"spatial.{k}.{n}": v for n, v in layer_grads.items()})
        g_seq = np.zeros((g_last.shape[0], tape.steps, units))
        g_seq[:, -1] = g_last
        for k in reversed(range(len(self.temporal))):
            g_seq, layer_grads = recurrent_backward(
                self.temporal[k], tape.temporal[k], g_seq
            )
            grads.update({f"temporal.{k}.{n}": v for n, v in layer_grads.items()})
        return grads

    def predict_raw(self, temporal: np.ndarray, spatial: np.ndarray) -> np.ndarray:
        out, _ = self.forward(temporal, spatial)
        return out

    def penalty(self) -> Tuple[float, Dict[str, np.ndarray]]:
        layers = self.layers
        total, layer_grads = reg_penalty([layer for _, layer in layers], self.reg)
        grads = {
            f"{prefix}.{name}": g
            for (prefix, _), per_layer in zip(layers, layer_grads)
            for name, g in per_layer.items()
        }
        return total, grads

    # %% training objective
    def loss(self, batch: SampleBatch) -> float:
        """MAE plus the regularization penalty."""
        pred = self.predict_raw(batch.temporal, batch.spatial)
        mae, _ = mae_loss(pred, batch.require_targets())
        penalty, _ = self.penalty()
        return mae + penalty

    def loss_and_grads(
        self, batch: SampleBatch
    ) -> Tuple[float, Dict[str, np.ndarray]]:
        pred, tape = self.forward(batch.temporal, batch.spatial)
        mae, grad_pred = mae_loss(pred, batch.require_targets())
        grads = self.backward(tape, grad_pred)
        penalty, penalty_grads = self.penalty()
        for name, g in penalty_grads.items():
            grads[name] = grads[name] + g
        return mae + penalty, grads


def build_model(
    config: ArchConfig, seed: int = 0, reg: Optional[RegSpec] = None
) -> TwoBranchModel:
    """Freshly initialized model of ``config``."""
    if not isinstance(config, ArchConfig):
        raise InvalidConfigError(f"expected an ArchConfig, got {type(config)}")
    rng = np.random.default_rng(seed)
    temporal = []
    n_in = config.temporal_width
    for _ in range(config.rnn_layers):
        temporal.append(init_recurrent(rng, config.rnn_type, n_in, config.rnn_units))
        n_in = config.rnn_units
    spatial = []
    n_in = N_SPATIAL
    for _ in range(config.spatial_layers):
        spatial.append(
            init_dense(rng, n_in, config.spatial_units, config.spatial_act)
        )
        n_in = config.spatial_units
    head = []
    n_in = config.rnn_units + config.spatial_units
    for width, act in zip(config.head_units, config.head_activations):
        head.append(init_dense(rng, n_in, width, act))
        n_in = width
    return TwoBranchModel(config, temporal, spatial, head, reg=reg)
