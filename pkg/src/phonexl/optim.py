"""Adam with bias correction, plus global-norm gradient clipping."""

from dataclasses import dataclass, field

import numpy as np

from .autodiff import Tensor
from .model import constrain_parameters


def adam_step(value: np.ndarray, grad: np.ndarray, m: np.ndarray, v: np.ndarray,
              t: int, lr: float, beta1: float, beta2: float, eps: float):
    """One Adam update; returns (new_value, new_m, new_v) for step count t (1-based)."""
    m = beta1 * m + (1.0 - beta1) * grad
    v = beta2 * v + (1.0 - beta2) * grad * grad
    m_hat = m / (1.0 - beta1 ** t)
    v_hat = v / (1.0 - beta2 ** t)
    return value - lr * m_hat / (np.sqrt(v_hat) + eps), m, v


def clip_global_norm(params: dict[str, Tensor], max_norm: float) -> float:
    """Scale all gradients so their joint L2 norm is at most max_norm."""
    total = 0.0
    for tensor in params.values():
        if tensor.grad is not None:
            total += float(np.sum(tensor.grad * tensor.grad))
    norm = float(np.sqrt(total))
    if max_norm > 0 and norm > max_norm:
        scale = max_norm / norm
        for tensor in params.values():
            if tensor.grad is not None:
                tensor.grad *= scale
    return norm


@dataclass
class Adam:
    params: dict[str, Tensor]
    lr: float = 5e-5
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    state: dict = field(default_factory=dict)

    def __post_init__(self):
        for name, tensor in self.params.items():
            self.state[name] = (np.zeros_like(tensor.value), np.zeros_like(tensor.value))

    def step(self) -> None:
        """Apply one update from the accumulated gradients (missing grads count as 0)."""
        self.t += 1
        for name, tensor in sorted(self.params.items()):
            grad = tensor.grad if tensor.grad is not None else np.zeros_like(tensor.value)
            m, v = self.state[name]
            tensor.value, m, v = adam_step(tensor.value, grad, m, v, self.t,
                                           self.lr, self.beta1, self.beta2, self.eps)
            self.state[name] = (m, v)
        constrain_parameters(self.params)
