"""Shared domain types: sparse samples, dense iterates, learner state, run records."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterable

import numpy as np


class DimensionError(ValueError):
    """A sparse index falls outside the declared feature dimension."""


@dataclass(frozen=True, eq=False)
class SparseVector:
    """Sparse feature vector with 1-based, strictly increasing indices."""

    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64).reshape(-1)
        val = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if idx.shape != val.shape:
            raise ValueError("indices and values must have the same length")
        if idx.size:
            if idx[0] < 1:
                raise ValueError(f"feature index {int(idx[0])} < 1")
            if np.any(np.diff(idx) <= 0):
                raise ValueError("feature indices must be strictly increasing")
        if not np.all(np.isfinite(val)):
            raise ValueError("feature values must be finite")
        idx.setflags(write=False)
        val.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, float]]) -> "SparseVector":
        pairs = list(pairs)
        return cls(np.array([p[0] for p in pairs], dtype=np.int64),
                   np.array([p[1] for p in pairs], dtype=np.float64))

    @classmethod
    def from_dense(cls, x) -> "SparseVector":
        x = np.asarray(x, dtype=np.float64)
        nz = np.flatnonzero(x)
        return cls(nz + 1, x[nz])

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    @property
    def max_index(self) -> int:
        return int(self.indices[-1]) if self.indices.size else 0

    @property
    def cols(self) -> np.ndarray:
        """0-based positions into a dense vector."""
        return self.indices - 1

    def norm_sq(self) -> float:
        return float(np.dot(self.values, self.values))

    def to_dense(self, dim: int) -> np.ndarray:
        _check_bounds(self, dim)
        out = np.zeros(dim)
        out[self.cols] = self.values
        return out

    def scaled(self, a: float) -> "SparseVector":
        return SparseVector(self.indices, a * self.values)

    def pairs(self) -> list[tuple[int, float]]:
        return list(zip(self.indices.tolist(), self.values.tolist()))

    def __eq__(self, other):
        if not isinstance(other, SparseVector):
            return NotImplemented
        return (np.array_equal(self.indices, other.indices)
                and np.array_equal(self.values, other.values))

    def __repr__(self):
        return f"SparseVector({self.pairs()!r})"


@dataclass(frozen=True)
class Sample:
    """One labeled data point; the feature dimension is owned by the stream."""

    label: float
    features: SparseVector

    def __post_init__(self):
        if not math.isfinite(self.label):
            raise ValueError("label must be finite")
        object.__setattr__(self, "label", float(self.label))

    @classmethod
    def from_pairs(cls, label: float, pairs: Iterable[tuple[int, float]]) -> "Sample":
        return cls(label, SparseVector.from_pairs(pairs))


def _check_bounds(h: SparseVector, dim: int) -> None:
    if h.max_index > dim:
        raise DimensionError(f"feature index {h.max_index} exceeds dimension {dim}")


def sparse_dot(h: SparseVector, w: np.ndarray) -> float:
    """Inner product h^T w with h sparse and w dense."""
    _check_bounds(h, len(w))
    if not h.nnz:
        return 0.0
    return float(np.dot(h.values, w[h.cols]))


def axpy_sparse(a: float, h: SparseVector, w: np.ndarray) -> np.ndarray:
    """Return a copy of ``w`` with ``a * h`` added on the stored entries of ``h``."""
    _check_bounds(h, len(w))
    out = np.array(w, dtype=np.float64, copy=True)
    if h.nnz and a != 0.0:
        out[h.cols] += a * h.values
    return out


@dataclass
class DualState:
    """Mutable learner state advanced by :func:`odca.engine.step`.

    ``w`` is always ``conj_grad(regularizer, w_prime)``; ``w_bar`` and ``s``
    carry the exponentially smoothed output and its normalizer.
    """

    w_prime: np.ndarray
    w: np.ndarray
    w_bar: np.ndarray
    s: float = 0.0
    n_seen: int = 0
    window_state: Any = None
    last_lambda: float = 0.0

    @property
    def dim(self) -> int:
        return len(self.w_prime)


@dataclass(frozen=True)
class RunRecord:
    iteration: int
    test_error: float
    dual_lambda: float
    wall_time: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.test_error <= 1.0:
            raise ValueError(f"test_error {self.test_error} outside [0, 1]")
        if self.wall_time < 0:
            raise ValueError("wall_time must be nonnegative")


def check_records(records: list[RunRecord]) -> None:
    """Iterations must be strictly increasing within one run."""
    its = [r.iteration for r in records]
    if any(b <= a for a, b in zip(its, its[1:])):
        raise ValueError("record iterations are not strictly increasing")


class EvalSet:
    """Samples stacked into flat arrays so margins for all rows cost one pass."""

    def __init__(self, samples: list[Sample]):
        if not samples:
            raise ValueError("empty evaluation set")
        self.labels = np.array([s.label for s in samples])
        counts = [s.features.nnz for s in samples]
        self.rows = np.repeat(np.arange(len(samples)), counts)
        self.cols = np.concatenate([s.features.cols for s in samples]).astype(np.int64)
        self.vals = np.concatenate([s.features.values for s in samples])
        self.max_index = max(s.features.max_index for s in samples)

    def __len__(self):
        return len(self.labels)

    def margins(self, w: np.ndarray) -> np.ndarray:
        if self.max_index > len(w):
            raise DimensionError(f"feature index {self.max_index} exceeds dimension {len(w)}")
        return np.bincount(self.rows, weights=self.vals * w[self.cols],
                           minlength=len(self.labels))

    def error(self, w: np.ndarray) -> float:
        pred = np.where(self.margins(w) >= 0.0, 1.0, -1.0)
        return float(np.mean(pred != self.labels))


def test_error(w: np.ndarray, samples) -> float:
    """Fraction of samples with sign(h^T w) != label; sign(0) counts as +1."""
    if not isinstance(samples, EvalSet):
        samples = EvalSet(list(samples))
    return samples.error(w)


test_error.__test__ = False  # keep pytest from collecting it
