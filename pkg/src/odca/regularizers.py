"""Strongly convex regularizers with their conjugates and conjugate gradients.

Three choices are supported:

=============  ==========================  ======================  =================
kind           R(w)                        R*(x)                   grad R*(x)
=============  ==========================  ======================  =================
``l2``         ||w||^2 / 2                 ||x||^2 / 2             x
``elastic``    delta ||w||_1 + ||w||^2/2   ||T_delta(x)||^2 / 2    T_delta(x)
``kl``         sum w log w (simplex)       log sum exp(x)          softmax(x)
=============  ==========================  ======================  =================

``T_delta`` is the entrywise soft threshold. The scale ``rho`` is carried on the
model but never folded into ``R``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KINDS = ("l2", "elastic", "kl")


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class RegularizerModel:
    kind: str = "l2"
    rho: float = 1.0
    delta: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown regularizer {self.kind!r}; expected one of {KINDS}")
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        if self.kind == "elastic" and not self.delta > 0:
            raise ValueError("elastic-net delta must be positive")

    @property
    def separable(self) -> bool:
        """True when grad R* acts entrywise, so directional work can stay on a support."""
        return self.kind != "kl"


def L2(rho: float = 1.0) -> RegularizerModel:
    return RegularizerModel("l2", rho)


def ElasticNet(delta: float, rho: float = 1.0) -> RegularizerModel:
    return RegularizerModel("elastic", rho, delta)


def KLSimplex(rho: float = 1.0) -> RegularizerModel:
    return RegularizerModel("kl", rho)


def soft_threshold(x, delta: float) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.maximum(np.abs(x) - delta, 0.0)


def _logsumexp(x: np.ndarray) -> float:
    m = np.max(x)
    return float(m + np.log(np.sum(np.exp(x - m))))


def _softmax(x: np.ndarray) -> np.ndarray:
    e = np.exp(x - np.max(x))
    return e / np.sum(e)


def reg_value(m: RegularizerModel, w) -> float:
    w = np.asarray(w, dtype=np.float64)
    if m.kind == "l2":
        return 0.5 * float(np.dot(w, w))
    if m.kind == "elastic":
        return m.delta * float(np.sum(np.abs(w))) + 0.5 * float(np.dot(w, w))
    if np.any(w <= 0):
        raise DomainError("KL regularizer needs strictly positive entries")
    if abs(np.sum(w) - 1.0) > 1e-9:
        raise DomainError("KL regularizer needs entries summing to one")
    return float(np.sum(w * np.log(w)))


def conj_value(m: RegularizerModel, x) -> float:
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ValueError("conjugate argument must be finite")
    if m.kind == "l2":
        return 0.5 * float(np.dot(x, x))
    if m.kind == "elastic":
        t = soft_threshold(x, m.delta)
        return 0.5 * float(np.dot(t, t))
    return _logsumexp(x)


def conj_grad(m: RegularizerModel, x) -> np.ndarray:
    """Gradient of R* at ``x``; always a fresh array."""
    x = np.asarray(x, dtype=np.float64)
    if m.kind == "l2":
        return x.copy()
    if m.kind == "elastic":
        return soft_threshold(x, m.delta)
    return _softmax(x)
