"""Adaptive-moment gradient descent with optional global-norm clipping.

The update follows the standard bias-corrected first/second moment scheme
(beta1=0.9, beta2=0.999, eps=1e-8 by default):

    m <- b1*m + (1-b1)*g          v <- b2*v + (1-b2)*g^2
    m_hat = m / (1 - b1^t)        v_hat = v / (1 - b2^t)
    p <- p - lr * m_hat / (sqrt(v_hat) + eps)

so the very first step moves each parameter by -lr * sign(g) up to the eps
correction. State (m, v, step counter) lives in :class:`AdamState`, keyed by
parameter name; the step is deterministic given (params, grads, state).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, asdict

import numpy as np

from ..errors import ConfigError, NumericError
from .params import ParamStore


@dataclass
class TrainConfig:
    """Optimization hyperparameters shared by the optimizer and train loop."""

    lr: float = 1e-5
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    clip_norm: float | None = None   # None disables clipping
    batch_size: int = 64
    epochs: int = 500
    seed: int = 0

    def validate(self) -> None:
        if not (self.lr > 0 and math.isfinite(self.lr)):
            raise ConfigError(f"lr must be positive and finite, got {self.lr}")
        if not (0.0 <= self.beta1 < 1.0) or not (0.0 <= self.beta2 < 1.0):
            raise ConfigError(
                f"betas must lie in [0, 1), got {self.beta1}, {self.beta2}")
        if self.eps <= 0:
            raise ConfigError(f"eps must be positive, got {self.eps}")
        if self.clip_norm is not None and self.clip_norm <= 0:
            raise ConfigError(f"clip_norm must be positive, got {self.clip_norm}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown training fields: {sorted(extra)}")
        cfg = cls(**d)
        cfg.validate()
        return cfg


@dataclass
class AdamState:
    """Per-parameter first/second moment buffers plus the step counter."""

    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    step: int = 0


def global_grad_norm(params: ParamStore) -> float:
    """L2 norm of the concatenation of every parameter gradient."""
    total = 0.0
    for _, t in params.items():
        g = t.grad
        if g is not None:
            total += float(np.sum(g * g))
    return math.sqrt(total)


def optimizer_step(params: ParamStore, config: TrainConfig, state: AdamState) -> None:
    """Apply one in-place update using each parameter's accumulated grad.

    Raises :class:`NumericError` naming the first offending parameter if any
    gradient contains a non-finite entry. All-zero gradients leave parameters
    bitwise unchanged (aside from the step counter advancing).
    """
    config.validate()
    for name, t in params.items():
        g = t.grad
        if g is None:
            continue
        if not np.all(np.isfinite(g)):
            raise NumericError(f"non-finite gradient for parameter {name!r}")

    scale = 1.0
    if config.clip_norm is not None:
        norm = global_grad_norm(params)
        if norm > config.clip_norm:
            scale = config.clip_norm / norm

    state.step += 1
    t_step = state.step
    bc1 = 1.0 - config.beta1 ** t_step
    bc2 = 1.0 - config.beta2 ** t_step
    for name, p in params.items():
        g = p.grad
        if g is None:
            g = np.zeros_like(p.value)
        if scale != 1.0:
            g = g * scale
        m = state.m.get(name)
        v = state.v.get(name)
        if m is None:
            m = np.zeros_like(p.value)
            v = np.zeros_like(p.value)
        m = config.beta1 * m + (1.0 - config.beta1) * g
        v = config.beta2 * v + (1.0 - config.beta2) * (g * g)
        state.m[name] = m
        state.v[name] = v
        m_hat = m / bc1
        v_hat = v / bc2
        p.value = p.value - config.lr * m_hat / (np.sqrt(v_hat) + config.eps)
