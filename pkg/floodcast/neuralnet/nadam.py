"""Nadam, in its bias-corrected form without a momentum schedule.

    m     = b1 * m + (1 - b1) * g
    v     = b2 * v + (1 - b2) * g**2
    theta = theta - lr * (b1 * m_hat + (1 - b1) * g / (1 - b1**t))
                       / (sqrt(v_hat) + eps)
"""
from dataclasses import dataclass, field
from typing import Dict, Mapping, Tuple

import numpy as np

from floodcast.errors import ShapeMismatchError

Params = Dict[str, np.ndarray]


@dataclass(frozen=True)
class NadamState:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-7
    t: int = 0
    m: Params = field(default_factory=dict)
    v: Params = field(default_factory=dict)

    @classmethod
    def zeros_like(
        cls, params: Mapping[str, np.ndarray], **hyper: float
    ) -> "NadamState":
        return cls(
            m={k: np.zeros_like(p) for k, p in params.items()},
            v={k: np.zeros_like(p) for k, p in params.items()},
            **hyper,  # type: ignore[arg-type]
        )


def nadam_step(
    params: Mapping[str, np.ndarray],
    grads: Mapping[str, np.ndarray],
    state: NadamState,
) -> Tuple[Params, NadamState]:
    """One update of every tensor in ``params``; inputs are left untouched."""
    if set(params) != set(grads) or set(params) != set(state.m):
        raise ShapeMismatchError("parameters, gradients and state differ in names")
    t = state.t + 1
    b1, b2 = state.beta1, state.beta2
    m_correction = 1.0 - b1**t
    v_correction = 1.0 - b2**t
    new_params, new_m, new_v = {}, {}, {}
    for name, theta in params.items():
        g = grads[name]
        if g.shape != theta.shape or state.m[name].shape != theta.shape:
            raise ShapeMismatchError(
                f"{name}: parameter {theta.shape}, gradient {g.shape}, "
                f"state {state.m[name].shape}"
            )
        m = b1 * state.m[name] + (1.0 - b1) * g
        v = b2 * state.v[name] + (1.0 - b2) * g * g
        m_hat = m / m_correction
        v_hat = v / v_correction
        nesterov = b1 * m_hat + (1.0 - b1) * g / m_correction
        step = nesterov / (np.sqrt(v_hat) + state.eps)
        new_params[name] = theta - state.lr * step
        new_m[name] = m
        new_v[name] = v
    return new_params, NadamState(
        lr=state.lr,
        beta1=b1,
        beta2=b2,
        eps=state.eps,
        t=t,
        m=new_m,
        v=new_v,
    )
