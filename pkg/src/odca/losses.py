"""Scalar losses Q(z; gamma), their conjugates, and the one-coordinate dual solve.

The dual step minimizes, over a scalar ``tau``,

    (1/Delta) Q*(-tau; gamma) + rho R*(base + tau * alpha * h)

with ``alpha = 1/(rho Delta)``. Squared and hinge losses under the l2
regularizer have closed-form minimizers; every other pairing goes through a
bracketing search on the monotone derivative of that convex objective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import SparseVector, sparse_dot
from .regularizers import RegularizerModel, conj_grad, conj_value

KINDS = ("squared", "hinge", "logistic")

# bound used for the unbounded dual domain of the squared loss
SEARCH_BOUND = 1e6
SEARCH_TOL = 1e-10


class LabelError(ValueError):
    """Label outside the loss' admissible domain (e.g. non-binary for hinge)."""


class DualSolveError(RuntimeError):
    pass


@dataclass(frozen=True)
class LossModel:
    kind: str = "hinge"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown loss {self.kind!r}; expected one of {KINDS}")

    @property
    def binary(self) -> bool:
        return self.kind != "squared"

    def check_label(self, gamma: float) -> None:
        if self.binary and gamma not in (-1.0, 1.0):
            raise LabelError(f"{self.kind} loss needs labels in {{-1, +1}}, got {gamma}")

    def dual_domain(self, gamma: float) -> tuple[float, float]:
        """Closed interval of tau with Q*(-tau; gamma) finite."""
        if self.kind == "squared":
            return (-math.inf, math.inf)
        self.check_label(gamma)
        return (0.0, 1.0) if gamma > 0 else (-1.0, 0.0)


Squared = LossModel("squared")
Hinge = LossModel("hinge")
Logistic = LossModel("logistic")


def _xlogx(p: float) -> float:
    return 0.0 if p == 0.0 else p * math.log(p)


def loss_value(l: LossModel, z: float, gamma: float) -> float:
    l.check_label(gamma)
    if l.kind == "squared":
        return 0.5 * (gamma - z) ** 2
    if l.kind == "hinge":
        return max(0.0, 1.0 - gamma * z)
    return float(np.logaddexp(0.0, -gamma * z))


def loss_conj(l: LossModel, x: float, gamma: float) -> float:
    """Q*(x; gamma); ``math.inf`` outside the effective domain."""
    if l.kind == "squared":
        return 0.5 * x * x + gamma * x
    l.check_label(gamma)
    gx = gamma * x
    if not -1.0 <= gx <= 0.0:
        return math.inf
    if l.kind == "hinge":
        return gx
    return _xlogx(-gx) + _xlogx(1.0 + gx)


def loss_subgradient_set(l: LossModel, z: float, gamma: float) -> tuple[float, float]:
    """Subdifferential of Q(.; gamma) at ``z`` as a closed interval ``(lo, hi)``."""
    l.check_label(gamma)
    if l.kind == "squared":
        return (z - gamma, z - gamma)
    if l.kind == "hinge":
        m = gamma * z
        if m < 1.0:
            return (-gamma, -gamma)
        if m > 1.0:
            return (0.0, 0.0)
        return (min(-gamma, 0.0), max(-gamma, 0.0))
    g = -gamma / (1.0 + math.exp(gamma * z)) if gamma * z < 700 else 0.0
    return (g, g)


def project_unit_interval(a: float) -> float:
    return min(max(a, 0.0), 1.0)


def _conj_slope_in_tau(l: LossModel, tau: float, gamma: float) -> float:
    """d/dtau of Q*(-tau; gamma) inside the dual domain."""
    if l.kind == "squared":
        return tau - gamma
    if l.kind == "hinge":
        return -gamma
    p = gamma * tau
    if p <= 0.0:
        return -gamma * math.inf
    if p >= 1.0:
        return gamma * math.inf
    return gamma * (math.log(p) - math.log1p(-p))


def _directional_grad(r: RegularizerModel, base: np.ndarray, h: SparseVector, step: float) -> float:
    """h^T grad R*(base + step * h)."""
    if not h.nnz:
        return 0.0
    if r.separable:
        local = base[h.cols] + step * h.values
        return float(np.dot(h.values, conj_grad(r, local)))
    x = base.copy()
    x[h.cols] += step * h.values
    return sparse_dot(h, conj_grad(r, x))


def dual_objective(l: LossModel, r: RegularizerModel, base: np.ndarray, h: SparseVector,
                   gamma: float, alpha: float, delta_n: float, tau: float) -> float:
    """Per-step dual objective in ``tau``; ``inf`` outside the dual domain."""
    q = loss_conj(l, -tau, gamma)
    if math.isinf(q):
        return math.inf
    x = base.copy()
    if h.nnz:
        x[h.cols] += tau * alpha * h.values
    return q / delta_n + r.rho * conj_value(r, x)


def dual_derivative(l: LossModel, r: RegularizerModel, base: np.ndarray, h: SparseVector,
                    gamma: float, alpha: float, delta_n: float, tau: float) -> float:
    return (_conj_slope_in_tau(l, tau, gamma) / delta_n
            + r.rho * alpha * _directional_grad(r, base, h, tau * alpha))


def _bracket_search(deriv, lo: float, hi: float, tol: float) -> float:
    g_lo, g_hi = deriv(lo), deriv(hi)
    if g_lo >= 0.0 and g_hi <= 0.0:
        # objective flat on the whole bracket: take the point of least |tau|
        return min(max(0.0, lo), hi)
    if g_lo >= 0.0:
        return lo
    if g_hi <= 0.0:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        g = deriv(mid)
        if g > 0.0:
            hi = mid
        elif g < 0.0:
            lo = mid
        else:
            return mid
    return 0.5 * (lo + hi)


def solve_generic(l: LossModel, r: RegularizerModel, base: np.ndarray, h: SparseVector,
                  gamma: float, alpha: float, delta_n: float, tol: float = SEARCH_TOL) -> float:
    lo, hi = l.dual_domain(gamma)
    lo, hi = max(lo, -SEARCH_BOUND), min(hi, SEARCH_BOUND)

    def deriv(tau):
        return dual_derivative(l, r, base, h, gamma, alpha, delta_n, tau)

    tau = _bracket_search(deriv, lo, hi, tol)
    if l.kind == "squared" and abs(tau) >= SEARCH_BOUND - tol:
        raise DualSolveError(f"dual solution hit the search bound {SEARCH_BOUND:g}")
    return tau


def solve_dual_coordinate(l: LossModel, r: RegularizerModel, base: np.ndarray, h: SparseVector,
                          gamma: float, alpha: float, delta_n: float) -> float:
    """Exact minimizer lambda(N) of the one-coordinate dual problem.

    ``base`` is the forward-mapped intermediate variable f_N(w'_{N-1}) and
    ``delta_n`` the window normalizer Delta_N.
    """
    if abs(alpha * r.rho * delta_n - 1.0) > 1e-12:
        raise ValueError("alpha must equal 1/(rho * Delta_N)")
    l.check_label(gamma)
    if r.kind == "l2":
        hh = h.norm_sq()
        resid = gamma - sparse_dot(h, base)
        if l.kind == "squared":
            return resid / (1.0 + hh / (r.rho * delta_n))
        if l.kind == "hinge" and hh > 0.0:
            lam_hat = r.rho * delta_n / hh * resid
            return gamma * project_unit_interval(gamma * lam_hat)
    return solve_generic(l, r, base, h, gamma, alpha, delta_n)
