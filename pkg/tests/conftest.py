import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from odca.core import Sample, SparseVector  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

finite = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)


@st.composite
def sparse_vectors(draw, dim, min_nnz=0):
    idx = draw(st.lists(st.integers(1, dim), min_size=min_nnz, max_size=dim, unique=True))
    idx.sort()
    vals = draw(st.lists(finite, min_size=len(idx), max_size=len(idx)))
    return SparseVector(np.array(idx, dtype=np.int64), np.array(vals, dtype=float))


def random_sparse(rng, dim, density=0.5, nonempty=True):
    mask = rng.random(dim) < density
    if nonempty and not mask.any():
        mask[rng.integers(dim)] = True
    idx = np.flatnonzero(mask) + 1
    return SparseVector(idx, rng.standard_normal(idx.size))


def random_samples(rng, n, dim, binary=True):
    out = []
    for _ in range(n):
        h = random_sparse(rng, dim)
        y = float(rng.choice([-1.0, 1.0])) if binary else float(rng.standard_normal())
        out.append(Sample(y, h))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import acceptance_log
    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)
