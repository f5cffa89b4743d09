"""Central finite-difference verification of analytic gradients."""
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Mapping, Protocol, Tuple

import numpy as np

logger = logging.getLogger(__name__)


class Differentiable(Protocol):
    def parameters(self) -> Dict[str, np.ndarray]:
        """Named live parameter arrays, perturbed in place by the check."""

    def loss(self, batch: Any) -> float:
        ...

    def loss_and_grads(self, batch: Any) -> Tuple[float, Dict[str, np.ndarray]]:
        ...


@dataclass(frozen=True)
class GradCheckResult:
    max_rel_error: float
    worst_tensor: str
    errors: Dict[str, float]

    def passed(self, tolerance: float) -> bool:
        return self.max_rel_error < tolerance


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    diff = float(np.linalg.norm(analytic - numeric))
    scale = float(np.linalg.norm(analytic) + np.linalg.norm(numeric))
    return diff / max(scale, 1e-12)


def numeric_gradients(
    loss: Callable[[], float],
    params: Mapping[str, np.ndarray],
    eps: float = 1e-5,
) -> Dict[str, np.ndarray]:
    """``(f(p + eps) - f(p - eps)) / (2 eps)`` for every entry of ``params``."""
    grads = {}
    for name, p in params.items():
        g = np.zeros_like(p)
        for k in range(p.size):
            saved = p.flat[k]
            p.flat[k] = saved + eps
            plus = loss()
            p.flat[k] = saved - eps
            minus = loss()
            p.flat[k] = saved
            g.flat[k] = (plus - minus) / (2 * eps)
        grads[name] = g
    return grads


def grad_check(model: Differentiable, batch: Any, eps: float = 1e-5) -> GradCheckResult:
    """Compare ``model``'s analytic gradients of the total loss to numerics."""
    params = model.parameters()
    _, analytic = model.loss_and_grads(batch)
    numeric = numeric_gradients(lambda: model.loss(batch), params, eps)
    errors = {name: relative_error(analytic[name], numeric[name]) for name in params}
    worst = max(errors, key=errors.__getitem__)
    logger.debug("Gradient check: worst tensor %s (%.3e)", worst, errors[worst])
    return GradCheckResult(
        max_rel_error=errors[worst], worst_tensor=worst, errors=errors
    )
