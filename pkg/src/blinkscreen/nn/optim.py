"""Adam updates over a named parameter collection."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..errors import ShapeMismatch

Params = dict[str, np.ndarray]


@dataclass(frozen=True)
class AdamState:
    """Optimizer state: step counter and per-parameter moment estimates."""

    step: int
    first_moment: Params
    second_moment: Params
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    @classmethod
    def initial(
        cls,
        params: Params,
        learning_rate: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        epsilon: float = 1e-8,
    ) -> "AdamState":
        return cls(
            step=0,
            first_moment={k: np.zeros_like(v) for k, v in params.items()},
            second_moment={k: np.zeros_like(v) for k, v in params.items()},
            learning_rate=learning_rate,
            beta1=beta1,
            beta2=beta2,
            epsilon=epsilon,
        )


def adam_step(params: Params, grads: Params, state: AdamState) -> tuple[Params, AdamState]:
    """One bias-corrected Adam update; returns new parameters and state."""
    if set(params) != set(grads) or set(params) != set(state.first_moment):
        raise ShapeMismatch("parameter, gradient, and moment names must match")
    t = state.step + 1
    b1, b2 = state.beta1, state.beta2
    new_params: Params = {}
    new_m: Params = {}
    new_v: Params = {}
    for name, value in params.items():
        grad = grads[name]
        if grad.shape != value.shape:
            raise ShapeMismatch(f"{name}: gradient {grad.shape} vs parameter {value.shape}")
        m = b1 * state.first_moment[name] + (1.0 - b1) * grad
        v = b2 * state.second_moment[name] + (1.0 - b2) * grad * grad
        m_hat = m / (1.0 - b1**t)
        v_hat = v / (1.0 - b2**t)
        new_params[name] = value - state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)
        new_m[name] = m
        new_v[name] = v
    return new_params, replace(state, step=t, first_moment=new_m, second_moment=new_v)
