from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from floodcast.errors import EmptyBatchError, ShapeMismatchError

from .layers import DenseLayer, RecurrentLayer


def mae_loss(pred: np.ndarray, target: np.ndarray) -> Tuple[float, np.ndarray]:
    """Mean absolute error and its subgradient, ``sign(0) = 0``."""
    pred = np.asarray(pred, dtype=float).reshape(-1)
    target = np.asarray(target, dtype=float).reshape(-1)
    if pred.shape != target.shape:
        raise ShapeMismatchError(
            f"{pred.shape[0]} predictions for {target.shape[0]} targets"
        )
    n = pred.shape[0]
    if n == 0:
        raise EmptyBatchError("MAE of an empty batch")
    error = pred - target
    return float(np.abs(error).mean()), np.sign(error) / n


class RegSpec(BaseModel):
    """L1 and L2 factors applied to the recurrent layers only."""

    model_config = ConfigDict(frozen=True)

    l1: float = Field(default=0.01, ge=0)
    l2: float = Field(default=0.01, ge=0)


def reg_penalty(
    layers: Sequence[Union[DenseLayer, RecurrentLayer]], spec: RegSpec
) -> Tuple[float, List[Dict[str, np.ndarray]]]:
    """``sum(l1 * |w| + l2 * w**2)`` over every recurrent W, U and b.

    Gradients come back aligned with ``layers``; dense layers get zeros.
    """
    total = 0.0
    grads = []
    for layer in layers:
        params = layer.parameters()
        if not isinstance(layer, RecurrentLayer):
            grads.append({name: np.zeros_like(w) for name, w in params.items()})
            continue
        layer_grads = {}
        for name, w in params.items():
            total += spec.l1 * float(np.abs(w).sum())
            total += spec.l2 * float((w * w).sum())
            layer_grads[name] = spec.l1 * np.sign(w) + 2.0 * spec.l2 * w
        grads.append(layer_grads)
    return total, grads
