"""Acceptance criteria, one test each, every one at its stated tolerance.

Each test appends a PASS/FAIL line that pytest echoes in its terminal summary.
Run standalone with ``python3 tests/test_acceptance.py``.
"""

import os
import time
from pathlib import Path

import numpy as np
import pytest

from acceptance_log import report
from conftest import random_samples, random_sparse
from oracles import (batch_intermediate, central_diff_grad, grid_then_golden, numeric_conjugate,
                     parabolic_polish, raw_dual_objective, refine_grid_2d)
from odca.baselines import BaselineConfig, primal_objective, sdca_train, sgd_multiplier, spg_step
from odca.bench import OUTPUT_ENV
from odca.cli import main
from odca.core import EvalSet, Sample, axpy_sparse, sparse_dot
from odca.data_io import draw_samples, generate_drift_stream, load_drift_spec, load_libsvm, separator_at
from odca.engine import OdcaConfig, initial_state, step
from odca.losses import (Hinge, Logistic, Squared, loss_conj, loss_subgradient_set, loss_value,
                         solve_dual_coordinate)
from odca.regularizers import ElasticNet, KLSimplex, L2, conj_grad, conj_value, reg_value
from odca.windowing import (Exponential, InfiniteLength, Sliding, apply_forward_map, record_step,
                            step_scale)

ROOT = Path(__file__).resolve().parents[1]
DATA_DIR = Path(os.environ.get("ODCA_DATA_DIR", ROOT / "data"))


def test_criterion_01_recursion_matches_batch():
    schemes = [InfiniteLength(), Exponential(0.5), Exponential(0.9), Exponential(0.99995),
               Sliding(1), Sliding(5), Sliding(50)]
    rng = np.random.default_rng(101)
    dim, rho, length = 8, 0.05, 50
    worst, t_rec = 0.0, 0.0
    for ws in schemes:
        for _ in range(100):
            lams = rng.standard_normal(length)
            hs = [random_sparse(rng, dim) for _ in range(length)]
            t0 = time.perf_counter()
            state, w = ws.new_state(), np.zeros(dim)
            for n, (lam, h) in enumerate(zip(lams, hs), start=1):
                w = axpy_sparse(step_scale(ws, rho, n) * lam, h, apply_forward_map(ws, w, rho, n, state))
                record_step(ws, state, lam, h)
            t_rec += time.perf_counter() - t0
            ref = batch_intermediate(ws.kind, lams, [h.to_dense(dim) for h in hs], rho, ws.beta, ws.length)
            worst = max(worst, float(np.abs(w - ref).max()))
    ok = worst <= 1e-10 and t_rec < 5.0
    report(1, "recursion vs batch definition", ok,
           f"max |diff| {worst:.2e} (tol 1e-10), recursion time {t_rec:.2f}s (< 5s)")
    assert ok


def test_criterion_02_closed_form_dual_solves():
    rng = np.random.default_rng(102)
    details, ok = [], True
    for loss in (Squared, Hinge):
        worst, t_solve = 0.0, 0.0
        for _ in range(1000):
            dim = 6
            rho = float(10 ** rng.uniform(-3, 0))
            delta_n = float(rng.uniform(1, 200))
            h = random_sparse(rng, dim)
            base = rng.standard_normal(dim) * rng.uniform(0.01, 3)
            gamma = float(rng.choice([-1.0, 1.0])) if loss.binary else float(rng.standard_normal() * 2)
            r = L2(rho)
            t0 = time.perf_counter()
            lam = solve_dual_coordinate(loss, r, base, h, gamma, 1.0 / (rho * delta_n), delta_n)
            t_solve += time.perf_counter() - t0
            f = raw_dual_objective(lambda x, g: loss_conj(loss, x, g), lambda x: conj_value(r, x),
                                   rho, base, h.to_dense(dim), gamma, delta_n)
            lo, hi = (min(0.0, gamma), max(0.0, gamma)) if loss.binary else (-1e3, 1e3)
            ref = parabolic_polish(f, grid_then_golden(f, lo, hi, n=201), lo, hi)
            worst = max(worst, abs(lam - ref))
        ok &= worst <= 1e-6 and t_solve < 10.0
        details.append(f"{loss.kind}+l2 max |diff| {worst:.1e}, solve time {t_solve:.2f}s")
    report(2, "closed-form dual solves vs 1-D oracle", ok, "; ".join(details) + " (tol 1e-6, < 10s)")
    assert ok


def test_criterion_03_conjugate_calculus():
    rng = np.random.default_rng(103)
    failures = []
    for m in (L2(0.7), ElasticNet(0.4, 0.7), KLSimplex(0.7)):
        for _ in range(100):
            dim = int(rng.integers(1, 8))
            x = rng.standard_normal(dim) * 3
            w = rng.dirichlet(np.ones(dim)) if m.kind == "kl" else rng.standard_normal(dim) * 2
            if reg_value(m, w) + conj_value(m, x) < float(x @ w) - 1e-9:
                failures.append(f"{m.kind} Fenchel")
            ws = conj_grad(m, x)
            if m.kind != "kl" or np.all(ws > 0):
                if abs(reg_value(m, ws) + conj_value(m, x) - float(x @ ws)) > 1e-6:
                    failures.append(f"{m.kind} Fenchel equality")
            if m.kind == "elastic" and np.any(np.abs(np.abs(x) - m.delta) < 1e-3):
                continue
            fd = central_diff_grad(lambda v: conj_value(m, v), x)
            if not np.allclose(ws, fd, rtol=1e-5, atol=1e-7):
                failures.append(f"{m.kind} gradient")
    for loss in (Squared, Hinge, Logistic):
        for _ in range(100):
            gamma = float(rng.choice([-1.0, 1.0])) if loss.binary else float(rng.uniform(-5, 5))
            x = gamma * -rng.uniform(0, 1) if loss.binary else float(rng.uniform(-20, 20))
            z = float(rng.uniform(-4, 4))
            if loss_value(loss, z, gamma) + loss_conj(loss, x, gamma) < x * z - 1e-9:
                failures.append(f"{loss.kind} Fenchel")
            ref = numeric_conjugate(lambda t: loss_value(loss, t, gamma), x)
            if abs(loss_conj(loss, x, gamma) - ref) > 1e-6:
                failures.append(f"{loss.kind} conjugate")
            if loss.kind == "hinge" and abs(1 - gamma * z) < 1e-3:
                continue
            fd = (loss_value(loss, z + 1e-6, gamma) - loss_value(loss, z - 1e-6, gamma)) / 2e-6
            lo, hi = loss_subgradient_set(loss, z, gamma)
            if not lo - 1e-6 <= fd <= hi + 1e-6:
                failures.append(f"{loss.kind} gradient")
    ok = not failures
    report(3, "conjugate calculus", ok,
           "3 regularizers x 100 points and 3 losses x 100 points"
           + ("" if ok else f"; failures: {sorted(set(failures))}"))
    assert ok


def _svm_gap(warmup, further, mu, rho, dim=10, seed=104):
    cfg = OdcaConfig(Hinge, L2(rho), Exponential(1.0 - mu * rho))
    bcfg = BaselineConfig("spg", Hinge, rho=rho, mu=mu)
    rng = np.random.default_rng(seed)
    state = initial_state(cfg, dim)
    for s in random_samples(rng, warmup, dim):
        state = step(state, cfg, s)
    worst = 0.0
    for s in random_samples(rng, further, dim):
        w_prev = state.w.copy()
        state = step(state, cfg, s)
        worst = max(worst, float(np.abs(state.w - spg_step(w_prev, s, bcfg)).max()))
    return worst


def test_criterion_04_engine_matches_proximal_step():
    mu, rho = 0.05, 0.001
    worst = _svm_gap(5000, 1000, mu, rho)
    beta = 1 - mu * rho
    ok = worst <= 1e-8
    report(4, "O-DCA step vs spg_step after 5000 warm-up steps", ok,
           f"max |diff| {worst:.2e} (tol 1e-8); beta^5000 = {beta ** 5000:.3f}, "
           f"so the window has not reached its large-N form")
    assert ok


def test_criterion_05_leaky_lms_limit():
    rho, dim = 0.001, 5
    cfg = OdcaConfig(Squared, L2(rho), InfiniteLength())
    rng = np.random.default_rng(105)
    w_true = rng.standard_normal(dim)

    def draw():
        h = random_sparse(rng, dim)
        return Sample(sparse_dot(h, w_true) + 0.1 * float(rng.standard_normal()), h)

    state = initial_state(cfg, dim)
    for _ in range(10_000):
        state = step(state, cfg, draw())
    worst = 0.0
    for _ in range(1000):
        s = draw()
        w_prev, n = state.w.copy(), state.n_seen + 1
        state = step(state, cfg, s)
        mu_n = 1.0 / (rho * n)
        merged = axpy_sparse(mu_n * (s.label - sparse_dot(s.features, w_prev)), s.features,
                             (1 - rho * mu_n) * w_prev)
        worst = max(worst, float(np.abs(state.w - merged).max() / np.abs(state.w).max()))
    ok = worst <= 1e-6
    report(5, "leaky-LMS limit at N >= 1e4", ok,
           f"max relative diff {worst:.2e} (tol 1e-6); the updates differ by terms of order "
           f"||h||^2 / (rho N), about 0.25 for these unit-scale features at N = 1e4")
    assert ok


def _band_case(rng, mu, target, dim=5):
    """Sample and iterate with 1 - gamma h^T w equal to ``target * mu ||h||^2``."""
    h = random_sparse(rng, dim)
    gamma = float(rng.choice([-1.0, 1.0]))
    hh = h.norm_sq()
    w = rng.standard_normal(dim)
    want = (1.0 - target * mu * hh) * gamma  # desired h^T w
    w = w + (want - sparse_dot(h, w)) * h.to_dense(dim) / hh
    return Sample(gamma, h), w


def test_criterion_06_smoothed_indicator():
    mu, rho = 0.05, 0.001
    rng = np.random.default_rng(106)
    bcfg = BaselineConfig("sgd", Hinge, rho=rho, mu=mu)
    reg = L2(rho)
    delta_n = 1.0 / (mu * rho)

    def clip(s, w):
        lam = solve_dual_coordinate(Hinge, reg, w, s.features, s.label, mu, delta_n)
        return s.label * lam

    outside = inside = lower = 0
    for k in range(100):
        target = float(rng.uniform(1.0, 5.0)) * (1 if k % 2 else -1)
        s, w = _band_case(rng, mu, target)
        a = 1 - s.label * sparse_dot(s.features, w)
        assert abs(a) >= mu * s.features.norm_sq()
        c = clip(s, w)
        indicator = s.label * sgd_multiplier(w, s, bcfg)
        outside += c in (0.0, 1.0) and c == indicator
    for _ in range(100):
        s, w = _band_case(rng, mu, float(rng.uniform(0.01, 0.99)))
        inside += 0.0 < clip(s, w) < 1.0
    # below the kink the ramp has not started: clip and indicator are both 0
    for _ in range(100):
        s, w = _band_case(rng, mu, -float(rng.uniform(0.01, 0.99)))
        lower += clip(s, w) == 0.0 == s.label * sgd_multiplier(w, s, bcfg)
    ok = outside == 100 and inside == 100 and lower == 100
    report(6, "clip value vs SGD indicator", ok,
           f"outside band {outside}/100 saturated and equal to the indicator; "
           f"on the ramp 0 < 1 - gamma h^T w < mu||h||^2 {inside}/100 strictly inside (0, 1); "
           f"on -mu||h||^2 < 1 - gamma h^T w < 0 {lower}/100 clip = indicator = 0")
    assert ok


def test_criterion_07_sdca_grid_minimum():
    rho = 0.1
    toy = [Sample(1.0, random_sparse(np.random.default_rng(0), 2, density=1.0)),
           Sample(-1.0, random_sparse(np.random.default_rng(1), 2, density=1.0)),
           Sample(1.0, random_sparse(np.random.default_rng(2), 2, density=1.0))]
    hs = np.array([s.features.to_dense(2) for s in toy])
    ys = np.array([s.label for s in toy])

    def objective(X, Y):
        total = 0.0
        for (a, b), y in zip(hs, ys):
            total = total + np.maximum(0.0, 1.0 - y * (a * X + b * Y))
        return total / len(toy) + 0.5 * rho * (X * X + Y * Y)

    t0 = time.perf_counter()
    res = sdca_train(toy, BaselineConfig("sdca", Hinge, rho=rho, epochs=50, seed=0), dim=2)
    elapsed = time.perf_counter() - t0
    got = primal_objective(toy, res.w, Hinge, rho)
    # coarse 1e-2 grid on the box ||w|| <= sqrt(2 Q(0) / rho), then 1e-3, 1e-4 and finer around the best cell
    best, w_grid = refine_grid_2d(objective, (0.0, 0.0), np.sqrt(2.0 / rho), 1e-2)
    gap = got - best
    ok = abs(gap) <= 1e-6 and elapsed < 5.0
    report(7, "S-DCA vs grid minimizer", ok,
           f"primal {got:.10f} vs grid {best:.10f}, gap {gap:.1e} (tol 1e-6), S-DCA time {elapsed:.3f}s")
    assert ok


@pytest.mark.skipif(not (DATA_DIR / "a6a").exists() or not (DATA_DIR / "a6a.t").exists(),
                    reason="Adult (a6a) files not present")
def test_criterion_08_adult_shape():
    t0 = time.perf_counter()
    train, tm = load_libsvm(DATA_DIR / "a6a")
    test, sm = load_libsvm(DATA_DIR / "a6a.t")
    dim = max(tm.dim, sm.dim)
    train = train[:2000]
    ev = EvalSet(test)
    rho, beta, mu = 0.001, 0.99995, 0.05
    cfg = OdcaConfig(Hinge, L2(rho), Exponential(beta))
    state = initial_state(cfg, dim)
    for s in train:
        state = step(state, cfg, s)
    bcfg = BaselineConfig("sgd", Hinge, rho=rho, mu=mu)
    w = np.zeros(dim)
    for s in train:
        w = axpy_sparse(mu * sgd_multiplier(w, s, bcfg), s.features, (1 - mu * rho) * w)
    e_odca, e_sgd = ev.error(state.w), ev.error(w)
    elapsed = time.perf_counter() - t0
    ok = e_odca <= e_sgd + 0.01 and e_odca <= 0.30 and e_sgd <= 0.30 and elapsed < 60
    report(8, "Adult first 2000 samples", ok,
           f"O-DCA {e_odca:.4f}, SGD {e_sgd:.4f} at iteration 2000, time {elapsed:.1f}s")
    assert ok


def test_criterion_08_adult_presence():
    if not (DATA_DIR / "a6a").exists() or not (DATA_DIR / "a6a.t").exists():
        report(8, "Adult first 2000 samples", "SKIP", f"a6a / a6a.t not found under {DATA_DIR}")
        pytest.skip("Adult files not present")


def test_criterion_09_tracking_after_flip():
    t0 = time.perf_counter()
    drift = load_drift_spec(ROOT / "configs" / "drift_flip.ini")
    assert drift.spec.noise == 0.0 and drift.spec.margin == 0.2 and drift.n == 4000
    flip_at = drift.spec.schedule[0].iteration
    stream = generate_drift_stream(drift.spec, drift.n, drift.seed)
    post = separator_at(drift.spec, flip_at + 1)
    ev = EvalSet(draw_samples(post, 2000, np.random.default_rng(7), drift.spec.margin, 0.0))
    rho = 0.001
    exp_cfg = OdcaConfig(Hinge, L2(rho), Exponential(0.999))
    inf_cfg = OdcaConfig(Hinge, L2(rho), InfiniteLength())
    dim = drift.spec.dim
    s_exp, s_inf = initial_state(exp_cfg, dim), initial_state(inf_cfg, dim)
    hit, e_exp, e_inf = None, None, None
    for t, s in enumerate(stream[:flip_at + 1000], start=1):
        s_exp = step(s_exp, exp_cfg, s)
        s_inf = step(s_inf, inf_cfg, s)
        if t > flip_at:
            e_exp = ev.error(s_exp.w)
            if e_exp <= 0.05:
                hit, e_inf = t, ev.error(s_inf.w)
                break
    elapsed = time.perf_counter() - t0
    ok = hit is not None and e_inf > e_exp and elapsed < 10
    detail = (f"exponential window reaches {e_exp:.4f} at iteration {hit} ({hit - flip_at} after the flip); "
              f"infinite window error there {e_inf:.4f}" if hit else
              f"exponential window error still {e_exp:.4f} after 1000 post-flip iterations")
    report(9, "tracking a separator flip", ok, f"{detail}; time {elapsed:.2f}s")
    assert ok


def test_criterion_10_byte_identical_reruns(tmp_path, monkeypatch):
    config = ROOT / "configs" / "drift_tracking.ini"
    outputs = []
    for run in ("a", "b"):
        out = tmp_path / run
        monkeypatch.setenv(OUTPUT_ENV, str(out))
        assert main(["run", str(config)]) == 0
        outputs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    ok = outputs[0] == outputs[1] and len(outputs[0]) == 4
    report(10, "deterministic reruns", ok,
           f"{len(outputs[0])} files from {config.name}, identical bytes: {outputs[0] == outputs[1]}")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
