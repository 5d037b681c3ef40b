"""Test error around a separator sign flip: exponential vs infinite window O-DCA and SGD.

    python3 scripts/drift_tracking.py [--spec configs/drift_flip.ini] [--beta 0.999] [--out curves.csv]
"""

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from odca import Exponential, Hinge, InfiniteLength, L2, OdcaConfig
from odca.baselines import BaselineConfig, sgd_step
from odca.core import EvalSet
from odca.data_io import draw_samples, generate_drift_stream, load_drift_spec, separator_at
from odca.engine import initial_state, step

ROOT = Path(__file__).resolve().parents[1]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--spec", default=str(ROOT / "configs" / "drift_flip.ini"))
    p.add_argument("--rho", type=float, default=0.001)
    p.add_argument("--beta", type=float, default=0.999)
    p.add_argument("--every", type=int, default=50)
    p.add_argument("--test-size", type=int, default=2000)
    p.add_argument("--out", default=None, help="optional CSV path for the curves")
    args = p.parse_args(argv)

    drift = load_drift_spec(args.spec)
    stream = generate_drift_stream(drift.spec, drift.n, drift.seed)
    dim = drift.spec.dim
    rng = np.random.default_rng(0)
    # one test set per separator regime; each point is scored against the regime in force
    cuts = [0] + [e.iteration for e in drift.spec.schedule]
    tests = {c: EvalSet(draw_samples(separator_at(drift.spec, c + 1), args.test_size, rng,
                                     drift.spec.margin)) for c in cuts}

    exp_cfg = OdcaConfig(Hinge, L2(args.rho), Exponential(args.beta))
    inf_cfg = OdcaConfig(Hinge, L2(args.rho), InfiniteLength())
    sgd_cfg = BaselineConfig("sgd", Hinge, rho=args.rho, mu=(1 - args.beta) / args.rho)
    s_exp, s_inf = initial_state(exp_cfg, dim), initial_state(inf_cfg, dim)
    w_sgd = np.zeros(dim)

    rows = []
    for t, s in enumerate(stream, start=1):
        s_exp = step(s_exp, exp_cfg, s)
        s_inf = step(s_inf, inf_cfg, s)
        w_sgd = sgd_step(w_sgd, s, sgd_cfg)
        if t % args.every == 0:
            ev = tests[max(c for c in cuts if c < t)]
            rows.append((t, ev.error(s_exp.w), ev.error(s_inf.w), ev.error(w_sgd)))

    print(f"{'iter':>6} {'odca_exp':>9} {'odca_inf':>9} {'sgd':>9}")
    for r in rows:
        print(f"{r[0]:6d} {r[1]:9.4f} {r[2]:9.4f} {r[3]:9.4f}")
    if args.out:
        with open(args.out, "w", newline="") as f:
            wr = csv.writer(f)
            wr.writerow(["iteration", "odca_exp", "odca_inf", "sgd"])
            wr.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
