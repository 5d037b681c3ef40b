"""Data-weighting windows and the recursion they induce on the intermediate variable.

Every window gives weights ``delta_{n,N}`` and a normalizer ``Delta_N``; the
intermediate variable

    w'_N = 1/(rho Delta_N) * sum_n delta_{n,N} lambda(n) h_n

then obeys ``w'_N = f_N(w'_{N-1}) + alpha(N) lambda(N) h_N`` with
``alpha(N) = 1/(rho Delta_N)``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .core import SparseVector, axpy_sparse

KINDS = ("infinite", "exponential", "sliding")


@dataclass(frozen=True)
class WindowScheme:
    kind: str = "infinite"
    beta: float = 0.0
    length: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown window {self.kind!r}; expected one of {KINDS}")
        if self.kind == "exponential" and not 0.0 < self.beta < 1.0:
            raise ValueError("forgetting factor beta must lie in (0, 1)")
        if self.kind == "sliding" and (int(self.length) != self.length or self.length < 1):
            raise ValueError("sliding window length must be a positive integer")

    def new_state(self) -> "WindowState":
        return WindowState(buffer=deque(maxlen=self.length) if self.kind == "sliding" else None)


def InfiniteLength() -> WindowScheme:
    return WindowScheme("infinite")


def Exponential(beta: float) -> WindowScheme:
    return WindowScheme("exponential", beta=beta)


def Sliding(length: int) -> WindowScheme:
    return WindowScheme("sliding", length=length)


@dataclass
class WindowState:
    """Per-learner bookkeeping: the last L (lambda, h) pairs for the sliding window."""

    buffer: deque | None = None
    n: int = 0


def normalizer(ws: WindowScheme, n: int) -> float:
    """Delta_N. Zero at n = 0 so that the forward scale is well defined at N = 1."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if ws.kind == "infinite":
        return float(n)
    if ws.kind == "sliding":
        return float(min(n, ws.length))
    # (1 - beta^n)/(1 - beta) without cancellation for beta near one
    return -math.expm1(n * math.log(ws.beta)) / (1.0 - ws.beta)


def step_scale(ws: WindowScheme, rho: float, n: int) -> float:
    """alpha(N) = 1/(rho Delta_N)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 1.0 / (rho * normalizer(ws, n))


def forward_scale(ws: WindowScheme, n: int) -> float:
    """Multiplicative part of f_N: (N-1)/N, beta Delta_{N-1}/Delta_N, or 1 past the sliding warm-up."""
    if ws.kind == "sliding" and n > ws.length:
        return 1.0
    if ws.kind == "exponential":
        return ws.beta * normalizer(ws, n - 1) / normalizer(ws, n)
    return (n - 1) / n


def apply_forward_map(ws: WindowScheme, w_prime: np.ndarray, rho: float, n: int,
                      state: WindowState | None = None) -> np.ndarray:
    """f_N(w'_{N-1}) as a new array.

    The sliding window behaves like the infinite window while N <= L and then
    evicts the contribution of sample N - L, which must sit at the front of
    ``state.buffer``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if ws.kind == "sliding" and n > ws.length:
        if state is None or state.buffer is None or len(state.buffer) < ws.length:
            raise RuntimeError("sliding-window buffer underflow")
        lam_old, h_old = state.buffer[0]
        return axpy_sparse(-lam_old / (rho * ws.length), h_old, w_prime)
    return forward_scale(ws, n) * np.asarray(w_prime, dtype=np.float64)


def record_step(ws: WindowScheme, state: WindowState, lam: float, h: SparseVector) -> None:
    state.n += 1
    if ws.kind == "sliding":
        state.buffer.append((lam, h))
