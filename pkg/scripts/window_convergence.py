"""Gap between an exact O-DCA step and the proximal (SPG) step as beta^N -> 0.

With beta = 1 - mu rho the two coincide only once the exponential window's
normalizer has saturated; this prints the worst per-step gap against N.

    python3 scripts/window_convergence.py [--mu 0.05] [--rho 0.001]
"""

import argparse
import sys

import numpy as np

from odca import Exponential, Hinge, L2, OdcaConfig, Sample, SparseVector
from odca.baselines import BaselineConfig, spg_step
from odca.engine import initial_state, step


def random_stream(rng, n, dim):
    for _ in range(n):
        h = rng.standard_normal(dim)
        h[rng.random(dim) < 0.5] = 0.0
        yield Sample(float(rng.choice([-1.0, 1.0])), SparseVector.from_dense(h))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--mu", type=float, default=0.05)
    p.add_argument("--rho", type=float, default=0.001)
    p.add_argument("--dim", type=int, default=10)
    p.add_argument("--probe", type=int, default=200, help="steps measured at each N")
    args = p.parse_args(argv)
    beta = 1 - args.mu * args.rho
    cfg = OdcaConfig(Hinge, L2(args.rho), Exponential(beta))
    bcfg = BaselineConfig("spg", Hinge, rho=args.rho, mu=args.mu)
    rng = np.random.default_rng(0)
    state = initial_state(cfg, args.dim)
    for s in random_stream(rng, 5000, args.dim):
        state = step(state, cfg, s)
    print(f"{'N':>10} {'beta^N':>10} {'max gap':>10}")
    for n in (5_000, 20_000, 100_000, 300_000, 600_000, 1_000_000):
        state.n_seen = n
        worst = 0.0
        for s in random_stream(rng, args.probe, args.dim):
            w_prev = state.w.copy()
            state = step(state, cfg, s)
            worst = max(worst, float(np.abs(state.w - spg_step(w_prev, s, bcfg)).max()))
        print(f"{n:10d} {beta ** n:10.3e} {worst:10.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
