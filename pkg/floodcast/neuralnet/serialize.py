"""JSON layout of layer stacks: shapes plus row-major number arrays."""
from typing import Any, Dict, List, Sequence, Union

import numpy as np

from floodcast.errors import InvalidConfigError, ShapeMismatchError

from .layers import DenseLayer, RecurrentLayer

MODEL_FORMAT_VERSION = "floodcast-model-v1"

Layer = Union[DenseLayer, RecurrentLayer]


def _array_to_dict(array: np.ndarray) -> Dict[str, Any]:
    return {"shape": list(array.shape), "data": array.reshape(-1).tolist()}


def _array_from_dict(raw: Dict[str, Any]) -> np.ndarray:
    data = np.asarray(raw["data"], dtype=float)
    shape = tuple(int(s) for s in raw["shape"])
    if data.size != int(np.prod(shape)):
        raise ShapeMismatchError(f"{data.size} numbers for shape {shape}")
    return data.reshape(shape)


def layer_to_dict(layer: Layer) -> Dict[str, Any]:
    params = {name: _array_to_dict(p) for name, p in layer.parameters().items()}
    if isinstance(layer, RecurrentLayer):
        return {"type": layer.cell_type, "units": layer.units, "params": params}
    return {"type": "dense", "activation": layer.activation, "params": params}


def layer_from_dict(raw: Dict[str, Any]) -> Layer:
    params = {name: _array_from_dict(p) for name, p in raw["params"].items()}
    kind = raw["type"]
    if kind == "dense":
        return DenseLayer(params["kernel"], params["bias"], raw["activation"])
    if kind in ("LSTM", "GRU"):
        return RecurrentLayer(
            kind, params["kernel"], params["recurrent_kernel"], params["bias"]
        )
    raise InvalidConfigError(f"unknown layer type {kind!r}")


def layers_to_list(layers: Sequence[Layer]) -> List[Dict[str, Any]]:
    return [layer_to_dict(layer) for layer in layers]


def layers_from_list(raw: Sequence[Dict[str, Any]]) -> List[Layer]:
    return [layer_from_dict(item) for item in raw]
