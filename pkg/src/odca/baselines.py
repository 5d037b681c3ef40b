"""Primal-domain comparison methods under the l2 regularizer, plus finite-sample S-DCA."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import Sample, axpy_sparse, sparse_dot
from .losses import LossModel, loss_subgradient_set, loss_value, project_unit_interval, solve_dual_coordinate
from .regularizers import L2

KINDS = ("sgd", "spg", "sdca")
KINK_RULES = ("indicator", "midpoint")


@dataclass(frozen=True)
class BaselineConfig:
    kind: str = "sgd"
    loss: LossModel = field(default_factory=lambda: LossModel("hinge"))
    rho: float = 1e-3
    mu: float = 0.05
    epochs: int = 5
    seed: int = 0
    kink: str = "indicator"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown baseline {self.kind!r}; expected one of {KINDS}")
        if self.kink not in KINK_RULES:
            raise ValueError(f"kink rule must be one of {KINK_RULES}")
        if self.rho < 0:
            raise ValueError("rho must be nonnegative")
        if self.kind in ("sgd", "spg"):
            if not self.mu > 0:
                raise ValueError("step size mu must be positive")
            if not self.mu * self.rho < 1:
                raise ValueError("mu * rho must be < 1 so the leak factor stays in (0, 1]")
        if self.kind == "sdca":
            if not self.rho > 0:
                raise ValueError("S-DCA needs rho > 0")
            if self.epochs < 0:
                raise ValueError("epochs must be nonnegative")


def subgradient(loss: LossModel, z: float, gamma: float, kink: str = "indicator") -> float:
    """One element of dQ(z; gamma).

    ``kink="indicator"`` uses the hinge indicator 1[1 - gamma z >= 0], i.e. -gamma
    at the kink; ``"midpoint"`` takes the middle of the subdifferential.
    """
    if loss.kind == "hinge" and kink == "indicator":
        loss.check_label(gamma)
        return -gamma if 1.0 - gamma * z >= 0.0 else 0.0
    lo, hi = loss_subgradient_set(loss, z, gamma)
    return 0.5 * (lo + hi)


def sgd_multiplier(w: np.ndarray, sample: Sample, cfg: BaselineConfig) -> float:
    """-g for the subgradient g used by the SGD step (the primal analogue of lambda)."""
    return -subgradient(cfg.loss, sparse_dot(sample.features, w), sample.label, cfg.kink)


def sgd_step(w: np.ndarray, sample: Sample, cfg: BaselineConfig) -> np.ndarray:
    m = sgd_multiplier(w, sample, cfg)
    return axpy_sparse(cfg.mu * m, sample.features, (1.0 - cfg.mu * cfg.rho) * w)


def spg_multiplier(w: np.ndarray, sample: Sample, cfg: BaselineConfig) -> float:
    """Scalar m with prox_{mu Q}(v) = v + mu m h, where v = (1 - mu rho) w.

    Only squared and hinge losses have the closed form used here.
    """
    h, gamma = sample.features, sample.label
    cfg.loss.check_label(gamma)
    hh = h.norm_sq()
    hv = (1.0 - cfg.mu * cfg.rho) * sparse_dot(h, w)
    if cfg.loss.kind == "squared":
        return (gamma - hv) / (1.0 + cfg.mu * hh)
    if cfg.loss.kind == "hinge":
        if hh == 0.0:
            return 0.0
        return gamma * project_unit_interval((1.0 - gamma * hv) / (cfg.mu * hh))
    raise ValueError("SPG supports only squared and hinge losses")


def spg_step(w: np.ndarray, sample: Sample, cfg: BaselineConfig) -> np.ndarray:
    """Proximal step on the loss after the l2 leak: prox_{mu Q}((1 - mu rho) w)."""
    m = spg_multiplier(w, sample, cfg)
    return axpy_sparse(cfg.mu * m, sample.features, (1.0 - cfg.mu * cfg.rho) * w)


def primal_objective(samples: Sequence[Sample], w: np.ndarray, loss: LossModel, rho: float) -> float:
    """Regularized empirical risk (1/N) sum Q(h_n^T w; gamma_n) + rho ||w||^2 / 2."""
    risk = np.mean([loss_value(loss, sparse_dot(s.features, w), s.label) for s in samples])
    return float(risk) + 0.5 * rho * float(np.dot(w, w))


@dataclass
class SdcaResult:
    w: np.ndarray
    lambdas: np.ndarray
    picks: int


def sdca_train(dataset: Sequence[Sample], cfg: BaselineConfig, dim: int,
               on_pick: Callable[[int, np.ndarray, float], None] | None = None) -> SdcaResult:
    """Stochastic dual coordinate ascent over a fixed sample.

    Each of ``epochs * N`` picks draws a uniform random index and re-solves
    that dual coordinate exactly, keeping the other multipliers fixed.
    ``on_pick(t, w, lambda_new)`` is called after every pick.
    """
    n = len(dataset)
    if n == 0:
        raise ValueError("S-DCA needs a non-empty dataset")
    for s in dataset:
        cfg.loss.check_label(s.label)
    reg = L2(cfg.rho)
    scale = 1.0 / (cfg.rho * n)
    lambdas = np.zeros(n)
    w_prime = np.zeros(dim)
    rng = np.random.default_rng(cfg.seed)
    picks = rng.integers(0, n, size=cfg.epochs * n)
    for t, i in enumerate(picks, start=1):
        s = dataset[i]
        base = axpy_sparse(-lambdas[i] * scale, s.features, w_prime)
        lam = solve_dual_coordinate(cfg.loss, reg, base, s.features, s.label, scale, float(n))
        w_prime = axpy_sparse(lam * scale, s.features, base)
        lambdas[i] = lam
        if on_pick is not None:
            on_pick(t, w_prime, lam)
    # grad R* is the identity for l2
    return SdcaResult(w=w_prime.copy(), lambdas=lambdas, picks=len(picks))
