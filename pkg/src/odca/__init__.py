"""Online dual coordinate ascent for streaming regularized risk minimization."""

from .core import DualState, RunRecord, Sample, SparseVector, axpy_sparse, sparse_dot
from .engine import OdcaConfig, initial_state, run_stream, step
from .losses import Hinge, Logistic, LossModel, Squared, solve_dual_coordinate
from .regularizers import L2, ElasticNet, KLSimplex, RegularizerModel
from .windowing import Exponential, InfiniteLength, Sliding, WindowScheme

__all__ = [
    "DualState", "RunRecord", "Sample", "SparseVector", "axpy_sparse", "sparse_dot",
    "OdcaConfig", "initial_state", "run_stream", "step",
    "Hinge", "Logistic", "LossModel", "Squared", "solve_dual_coordinate",
    "L2", "ElasticNet", "KLSimplex", "RegularizerModel",
    "Exponential", "InfiniteLength", "Sliding", "WindowScheme",
]
