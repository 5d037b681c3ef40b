"""Experiment runner: stream a training set through several learners and log test error.

Configuration is an INI file; see the README for the full grammar. Sections:

``[experiment]``
    ``output`` (path prefix, required), ``cadence`` (default 100),
    ``timing`` (record wall-clock seconds; default false so reruns are
    byte-identical).
``[data]``
    Either ``train`` + ``test`` (LIBSVM paths) or ``synthetic`` (a drift spec
    file) with ``test_size`` / ``test_seed``. Optional ``dim``, ``limit``,
    ``normalize``, ``shuffle``, ``shuffle_seed``.
``[algorithm NAME]``
    ``type`` is one of odca, sgd, spg, sdca plus that type's hyperparameters.
"""

from __future__ import annotations

import configparser
import logging
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .baselines import BaselineConfig, sdca_train, sgd_multiplier, spg_multiplier
from .core import EvalSet, RunRecord, Sample, axpy_sparse, check_records
from .data_io import (DatasetMeta, draw_samples, generate_drift_stream, load_drift_spec, load_libsvm,
                      normalize, separator_at, shuffle)
from .engine import OdcaConfig, run_stream
from .losses import LossModel
from .regularizers import RegularizerModel
from .windowing import WindowScheme

log = logging.getLogger(__name__)

OUTPUT_ENV = "ODCA_OUTPUT_DIR"
CSV_HEADER = "iteration,test_error,lambda,wall_time_s"


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


class DataError(ValueError):
    pass


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}

ALGO_KEYS = {
    "odca": {"type", "loss", "regularizer", "rho", "delta", "window", "beta", "length", "kappa"},
    "sgd": {"type", "loss", "rho", "mu", "kink"},
    "spg": {"type", "loss", "rho", "mu"},
    "sdca": {"type", "loss", "rho", "epochs", "seed", "fraction", "subset"},
}
ALGO_DEFAULTS = {
    "odca": {"loss": "hinge", "regularizer": "l2", "rho": "0.001", "delta": "0",
             "window": "exponential", "beta": "0.99995", "length": "0", "kappa": "0"},
    "sgd": {"loss": "hinge", "rho": "0.001", "mu": "0.05", "kink": "indicator"},
    "spg": {"loss": "hinge", "rho": "0.001", "mu": "0.05"},
    "sdca": {"loss": "hinge", "rho": "0.001", "epochs": "5", "seed": "0",
             "fraction": "0.2", "subset": "prefix"},
}
EXPERIMENT_KEYS = {"output", "cadence", "timing"}
DATA_KEYS = {"train", "test", "synthetic", "test_size", "test_seed", "dim", "limit",
             "normalize", "shuffle", "shuffle_seed"}


@dataclass(frozen=True)
class AlgorithmSpec:
    name: str
    kind: str
    params: dict
    odca: OdcaConfig | None = None
    baseline: BaselineConfig | None = None
    fraction: float = 1.0
    subset: str = "prefix"


@dataclass(frozen=True)
class DataSpec:
    train: Path | None = None
    test: Path | None = None
    synthetic: Path | None = None
    test_size: int = 1000
    test_seed: int = 0
    dim: int | None = None
    limit: int | None = None
    normalize: bool = False
    shuffle: bool = False
    shuffle_seed: int = 0


@dataclass(frozen=True)
class ExperimentConfig:
    output: str
    data: DataSpec
    algorithms: tuple[AlgorithmSpec, ...]
    cadence: int = 100
    timing: bool = False
    source: str = "<memory>"

    def resolved_lines(self) -> list[str]:
        """Full resolved configuration, one ``key = value`` per line, in INI layout."""
        lines = [f"source = {self.source}", "[experiment]",
                 f"output = {self.output}", f"cadence = {self.cadence}",
                 f"timing = {str(self.timing).lower()}", "[data]"]
        for k in sorted(DATA_KEYS):
            v = getattr(self.data, k)
            if v is not None:
                lines.append(f"{k} = {str(v).lower() if isinstance(v, bool) else v}")
        for a in self.algorithms:
            lines.append(f"[algorithm {a.name}]")
            lines.extend(f"{k} = {a.params[k]}" for k in sorted(a.params))
        return lines


# -- parsing ---------------------------------------------------------------------

class _Reader:
    """Typed lookups that collect every error instead of stopping at the first."""

    def __init__(self, section: str, values: dict, errors: list[str]):
        self.section, self.values, self.errors = section, values, errors

    def _fail(self, key, msg):
        self.errors.append(f"[{self.section}] {key}: {msg}")

    def get(self, key, default=None):
        return self.values.get(key, default)

    def num(self, key, cast=float, default=None, check=None, why=""):
        raw = self.values.get(key)
        if raw is None:
            return default
        try:
            v = cast(raw)
        except ValueError:
            self._fail(key, f"not a valid {cast.__name__}: {raw!r}")
            return default
        if check is not None and not check(v):
            self._fail(key, why or f"invalid value {raw!r}")
            return default
        return v

    def flag(self, key, default=False):
        raw = self.values.get(key)
        if raw is None:
            return default
        if raw.lower() in _TRUE:
            return True
        if raw.lower() in _FALSE:
            return False
        self._fail(key, f"expected true/false, got {raw!r}")
        return default

    def unknown(self, allowed):
        for k in sorted(set(self.values) - allowed):
            self._fail(k, "unknown key")


def _build_algorithm(name: str, values: dict, errors: list[str]) -> AlgorithmSpec | None:
    sec = f"algorithm {name}"
    kind = values.get("type", "").strip().lower()
    if kind not in ALGO_KEYS:
        errors.append(f"[{sec}] type: expected one of {sorted(ALGO_KEYS)}, got {kind!r}")
        return None
    params = {**ALGO_DEFAULTS[kind], **values, "type": kind}
    r = _Reader(sec, params, errors)
    r.unknown(ALGO_KEYS[kind])
    n_err = len(errors)
    rho = r.num("rho", check=lambda v: v > 0, why="must be positive")
    try:
        loss = LossModel(params["loss"].lower())
    except ValueError as exc:
        errors.append(f"[{sec}] loss: {exc}")
        loss = None
    if kind == "odca":
        delta = r.num("delta", default=0.0)
        beta = r.num("beta")
        length = r.num("length", int)
        kappa = r.num("kappa", check=lambda v: 0 <= v <= 1, why="must lie in [0, 1]")
        reg = win = None
        try:
            reg = RegularizerModel(params["regularizer"].lower(), rho if rho else 1.0, delta)
        except ValueError as exc:
            errors.append(f"[{sec}] regularizer: {exc}")
        try:
            win = WindowScheme(params["window"].lower(), beta or 0.0, length or 0)
        except ValueError as exc:
            errors.append(f"[{sec}] window: {exc}")
        if len(errors) > n_err:
            return None
        return AlgorithmSpec(name, kind, params, odca=OdcaConfig(loss, reg, win, kappa))
    mu = r.num("mu", default=0.05)
    epochs = r.num("epochs", int, default=5, check=lambda v: v >= 0, why="must be >= 0")
    seed = r.num("seed", int, default=0)
    fraction = r.num("fraction", default=1.0, check=lambda v: 0 < v <= 1, why="must lie in (0, 1]")
    subset = params.get("subset", "prefix").lower()
    if subset not in ("prefix", "random"):
        errors.append(f"[{sec}] subset: expected prefix or random")
    if kind == "spg" and loss is not None and loss.kind not in ("squared", "hinge"):
        errors.append(f"[{sec}] loss: SPG supports squared and hinge only")
    if len(errors) > n_err:
        return None
    try:
        bc = BaselineConfig(kind, loss, rho, mu, epochs, seed, params.get("kink", "indicator").lower())
    except ValueError as exc:
        errors.append(f"[{sec}] {exc}")
        return None
    return AlgorithmSpec(name, kind, params, baseline=bc,
                         fraction=fraction if kind == "sdca" else 1.0, subset=subset)


def parse_config(text: str, base_dir: str | Path = ".", source: str = "<text>") -> ExperimentConfig:
    """Parse and validate; raises :class:`ConfigError` listing every problem found."""
    base_dir = Path(base_dir)
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError([f"syntax: {exc}"]) from None
    errors: list[str] = []
    for sec in cp.sections():
        if sec not in ("experiment", "data") and not sec.startswith("algorithm "):
            errors.append(f"[{sec}] unknown section")

    exp = _Reader("experiment", dict(cp["experiment"]) if cp.has_section("experiment") else {}, errors)
    exp.unknown(EXPERIMENT_KEYS)
    output = exp.get("output")
    if not output:
        errors.append("[experiment] output: required")
    cadence = exp.num("cadence", int, default=100, check=lambda v: v > 0, why="must be positive")
    timing = exp.flag("timing")

    d = _Reader("data", dict(cp["data"]) if cp.has_section("data") else {}, errors)
    d.unknown(DATA_KEYS)

    def path(key):
        v = d.get(key)
        if v is None:
            return None
        p = Path(v) if Path(v).is_absolute() else base_dir / v
        if not p.is_file():
            errors.append(f"[data] {key}: no such file {str(p)!r}")
        return p

    train, test, synthetic = path("train"), path("test"), path("synthetic")
    if synthetic is None and (d.get("train") is None or d.get("test") is None):
        errors.append("[data] need either train + test or synthetic")
    if synthetic is not None and (d.get("train") or d.get("test")):
        errors.append("[data] train/test and synthetic are mutually exclusive")
    data = DataSpec(train=train, test=test, synthetic=synthetic,
                    test_size=d.num("test_size", int, 1000, lambda v: v > 0, "must be positive"),
                    test_seed=d.num("test_seed", int, 0),
                    dim=d.num("dim", int, None, lambda v: v > 0, "must be positive"),
                    limit=d.num("limit", int, None, lambda v: v > 0, "must be positive"),
                    normalize=d.flag("normalize"), shuffle=d.flag("shuffle"),
                    shuffle_seed=d.num("shuffle_seed", int, 0))

    algos = []
    names = [s for s in cp.sections() if s.startswith("algorithm ")]
    if not names:
        errors.append("no [algorithm NAME] sections")
    for sec in names:
        name = sec.split(None, 1)[1].strip()
        if not name or any(c in name for c in "/\\ ,"):
            errors.append(f"[{sec}] algorithm name must be a single path-safe word")
            continue
        a = _build_algorithm(name, dict(cp[sec]), errors)
        if a is not None:
            algos.append(a)
    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(output, data, tuple(algos), cadence, timing, source)


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError([f"cannot read {path}: {exc}"]) from None
    return parse_config(text, base_dir=path.parent, source=str(path))


def pairing_warnings(cfg: ExperimentConfig) -> list[str]:
    """Flag O-DCA/SGD pairs that break beta = 1 - mu rho."""
    out = []
    odcas = [a for a in cfg.algorithms if a.kind == "odca" and a.odca.window.kind == "exponential"]
    primals = [a for a in cfg.algorithms if a.kind in ("sgd", "spg")]
    for o in odcas:
        for p in primals:
            target = 1.0 - p.baseline.mu * p.baseline.rho
            if abs(o.odca.window.beta - target) > 1e-12:
                out.append(f"{o.name} beta={o.odca.window.beta:g} but 1 - mu*rho for "
                           f"{p.name} is {target:.10g}")
    return out


# -- running ---------------------------------------------------------------------

@dataclass
class ExperimentResult:
    records: dict[str, list[RunRecord]]
    summary: list[dict]
    warnings: list[str] = field(default_factory=list)
    train_meta: DatasetMeta | None = None


def load_data(spec: DataSpec) -> tuple[list[Sample], list[Sample], int, DatasetMeta]:
    try:
        if spec.synthetic is not None:
            drift = load_drift_spec(spec.synthetic)
            train = generate_drift_stream(drift.spec, drift.n, drift.seed)
            w_end = separator_at(drift.spec, drift.n + 1)
            test = draw_samples(w_end, spec.test_size, np.random.default_rng(spec.test_seed),
                                drift.spec.margin, drift.spec.noise)
            dim = drift.spec.dim
            if spec.dim is not None and spec.dim != dim:
                raise DataError(f"configured dim {spec.dim} != synthetic dim {dim}")
            meta = DatasetMeta(str(spec.synthetic), len(train), dim)
        else:
            train, tr_meta = load_libsvm(spec.train, dim=spec.dim)
            test, te_meta = load_libsvm(spec.test, dim=spec.dim)
            # test features may reach past the last training index
            dim = spec.dim or max(tr_meta.dim, te_meta.dim)
            meta = DatasetMeta(tr_meta.source, tr_meta.n_samples, dim)
    except (OSError, ValueError) as exc:
        if isinstance(exc, DataError):
            raise
        raise DataError(str(exc)) from exc
    if spec.shuffle:
        train = shuffle(train, spec.shuffle_seed)
    if spec.limit is not None:
        train = train[:spec.limit]
    if spec.normalize:
        train, test = normalize(train), normalize(test)
    if not train or not test:
        raise DataError("training and test sets must be non-empty")
    return train, test, dim, meta


class _Recorder:
    def __init__(self, ev: EvalSet, cadence: int, timing: bool):
        self.ev, self.cadence, self.timing = ev, cadence, timing
        self.records: list[RunRecord] = []
        self.t0 = time.perf_counter()

    def maybe(self, it: int, w: np.ndarray, lam: float, last: bool = False):
        if it % self.cadence == 0 or (last and (not self.records or self.records[-1].iteration != it)):
            elapsed = time.perf_counter() - self.t0 if self.timing else 0.0
            self.records.append(RunRecord(it, self.ev.error(w), float(lam), elapsed))


def _run_primal(a: AlgorithmSpec, train, dim, rec: _Recorder) -> int:
    bc = a.baseline
    multiplier = sgd_multiplier if a.kind == "sgd" else spg_multiplier
    w = np.zeros(dim)
    leak = 1.0 - bc.mu * bc.rho
    for t, s in enumerate(train, start=1):
        m = multiplier(w, s, bc)
        w = axpy_sparse(bc.mu * m, s.features, leak * w)
        rec.maybe(t, w, m, last=t == len(train))
    return len(train)


def _run_sdca(a: AlgorithmSpec, train, dim, rec: _Recorder) -> int:
    n_sub = max(1, int(round(a.fraction * len(train))))
    if a.subset == "random":
        idx = np.sort(np.random.default_rng(a.baseline.seed).choice(len(train), n_sub, replace=False))
        subset = [train[i] for i in idx]
    else:
        subset = list(train[:n_sub])
    total = a.baseline.epochs * n_sub
    if total == 0:
        rec.maybe(0, np.zeros(dim), 0.0, last=True)
        return 0
    sdca_train(subset, a.baseline, dim,
               on_pick=lambda t, w, lam: rec.maybe(t, w, lam, last=t == total))
    return total


def run_algorithm(a: AlgorithmSpec, train, ev: EvalSet, dim: int, cadence: int,
                  timing: bool) -> tuple[list[RunRecord], int]:
    """Record stream for one algorithm and the number of iterations it ran."""
    if a.kind == "odca":
        records, state = run_stream(a.odca, train, dim, evaluate=ev.error, cadence=cadence,
                                    final_record=True, timing=timing)
        return records, state.n_seen
    rec = _Recorder(ev, cadence, timing)
    n = _run_sdca(a, train, dim, rec) if a.kind == "sdca" else _run_primal(a, train, dim, rec)
    return rec.records, n


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    warnings = pairing_warnings(cfg)
    for w in warnings:
        log.warning("%s", w)
    train, test, dim, meta = load_data(cfg.data)
    ev = EvalSet(test)
    records, summary = {}, []
    for a in cfg.algorithms:
        log.info("running %s (%s) on %d samples", a.name, a.kind, len(train))
        recs, n_iter = run_algorithm(a, train, ev, dim, cfg.cadence, cfg.timing)
        check_records(recs)
        expected = (a.baseline.epochs * max(1, int(round(a.fraction * len(train))))
                    if a.kind == "sdca" else len(train))
        if n_iter != expected or (recs and recs[-1].iteration != n_iter):
            raise RuntimeError(f"{a.name}: ran {n_iter} iterations, expected {expected}")
        records[a.name] = recs
        summary.append({"algorithm": a.name, "type": a.kind, "iterations": n_iter,
                        "final_test_error": recs[-1].test_error})
    return ExperimentResult(records, summary, warnings, meta)


# -- output ----------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.10g}"


def record_line(r: RunRecord) -> str:
    return ",".join(_fmt(v) for v in (r.iteration, r.test_error, r.dual_lambda, r.wall_time))


def resolve_prefix(prefix: str | Path) -> Path:
    override = os.environ.get(OUTPUT_ENV)
    p = Path(prefix)
    return Path(override) / p.name if override else p


def emit_curves(records: dict[str, list[RunRecord]], prefix: str | Path,
                header: list[str] = ()) -> list[Path]:
    """One CSV per algorithm plus ``<prefix>_combined.csv``; returns the paths written."""
    if not records:
        raise ValueError("no record streams to write")
    for name, recs in records.items():
        if not recs:
            raise ValueError(f"record stream for {name!r} is empty")
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    comment = "".join(f"# {line}\n" for line in header)
    paths = []
    for name, recs in records.items():
        p = prefix.parent / f"{prefix.name}_{name}.csv"
        body = "".join(record_line(r) + "\n" for r in recs)
        p.write_text(comment + CSV_HEADER + "\n" + body)
        paths.append(p)
    p = prefix.parent / f"{prefix.name}_combined.csv"
    body = "".join(f"{name},{record_line(r)}\n" for name, recs in records.items() for r in recs)
    p.write_text(comment + "algorithm," + CSV_HEADER + "\n" + body)
    paths.append(p)
    return paths


def format_summary(result: ExperimentResult) -> str:
    rows = [("algorithm", "type", "iterations", "final_test_error")]
    rows += [(s["algorithm"], s["type"], str(s["iterations"]), f"{s['final_test_error']:.4f}")
             for s in result.summary]
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    return "\n".join("  ".join(c.ljust(wd) for c, wd in zip(r, widths)).rstrip() for r in rows)
