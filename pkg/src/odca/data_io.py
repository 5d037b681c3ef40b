"""LIBSVM text datasets and synthetic drifting streams."""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .core import DimensionError, Sample, SparseVector


class ParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass(frozen=True)
class DatasetMeta:
    source: str
    n_samples: int
    dim: int
    label_domain: str = "binary"


def _parse_label(tok: str, binary: bool, lineno: int) -> float:
    try:
        y = float(tok)
    except ValueError:
        raise ParseError(lineno, f"bad label {tok!r}") from None
    if not math.isfinite(y):
        raise ParseError(lineno, f"non-finite label {tok!r}")
    if binary and y not in (1.0, -1.0):
        raise ParseError(lineno, f"label {tok!r} is not +1/-1")
    return y


def parse_line(line: str, lineno: int = 0, binary: bool = True) -> Sample | None:
    """One LIBSVM line to a Sample; ``None`` for blank or comment-only lines."""
    line = line.split("#", 1)[0].strip()
    if not line:
        return None
    toks = line.split()
    label = _parse_label(toks[0], binary, lineno)
    idx, val = [], []
    prev = 0
    for tok in toks[1:]:
        i, sep, v = tok.partition(":")
        if not sep:
            raise ParseError(lineno, f"expected index:value, got {tok!r}")
        try:
            i, v = int(i), float(v)
        except ValueError:
            raise ParseError(lineno, f"non-numeric pair {tok!r}") from None
        if i < 1:
            raise ParseError(lineno, f"index {i} < 1")
        if i <= prev:
            raise ParseError(lineno, f"index {i} not ascending")
        if not math.isfinite(v):
            raise ParseError(lineno, f"non-finite value in {tok!r}")
        idx.append(i)
        val.append(v)
        prev = i
    return Sample(label, SparseVector(np.array(idx, dtype=np.int64), np.array(val)))


def iter_libsvm(lines: Iterable[str], binary: bool = True) -> Iterator[Sample]:
    """Line-at-a-time reader; yields the same samples as :func:`parse_libsvm`."""
    for lineno, line in enumerate(lines, start=1):
        s = parse_line(line, lineno, binary)
        if s is not None:
            yield s


def parse_libsvm(text: str | Iterable[str], dim: int | None = None, binary: bool = True,
                 source: str = "<text>") -> tuple[list[Sample], DatasetMeta]:
    lines = text.splitlines() if isinstance(text, str) else text
    samples = list(iter_libsvm(lines, binary))
    max_idx = max((s.features.max_index for s in samples), default=0)
    if dim is None:
        dim = max_idx
    elif max_idx > dim:
        raise DimensionError(f"feature index {max_idx} exceeds configured dimension {dim}")
    meta = DatasetMeta(source, len(samples), dim, "binary" if binary else "real")
    return samples, meta


def load_libsvm(path: str | Path, dim: int | None = None,
                binary: bool = True) -> tuple[list[Sample], DatasetMeta]:
    with open(path) as f:
        return parse_libsvm(f, dim=dim, binary=binary, source=str(path))


def format_sample(s: Sample) -> str:
    label = f"{s.label:+.17g}" if s.label in (1.0, -1.0) else f"{s.label:.17g}"
    feats = " ".join(f"{i}:{v:.17g}" for i, v in s.features.pairs())
    return f"{label} {feats}".rstrip()


def write_libsvm(samples: Iterable[Sample], path: str | Path) -> None:
    with open(path, "w") as f:
        for s in samples:
            f.write(format_sample(s) + "\n")


def shuffle(samples: Sequence[Sample], seed: int) -> list[Sample]:
    perm = np.random.default_rng(seed).permutation(len(samples))
    return [samples[i] for i in perm]


def normalize(samples: Iterable[Sample]) -> list[Sample]:
    """Scale every feature vector to unit l2 norm; empty vectors stay empty."""
    out = []
    for s in samples:
        nrm = math.sqrt(s.features.norm_sq())
        out.append(s if nrm == 0.0 else Sample(s.label, s.features.scaled(1.0 / nrm)))
    return out


# -- synthetic drifting streams ---------------------------------------------------

@dataclass(frozen=True)
class DriftEvent:
    """Separator change applied after sample ``iteration`` has been drawn.

    ``op`` is ``flip`` (negate), ``rotate`` (``arg`` degrees in the plane of
    the first two coordinates) or ``set`` (``arg`` is the new separator).
    """

    iteration: int
    op: str
    arg: tuple[float, ...] = ()


@dataclass(frozen=True)
class DriftSpec:
    initial: np.ndarray
    schedule: tuple[DriftEvent, ...] = ()
    noise: float = 0.0
    margin: float = 0.0

    def __post_init__(self):
        w = np.asarray(self.initial, dtype=np.float64)
        if w.ndim != 1 or not np.any(w != 0) or not np.all(np.isfinite(w)):
            raise ValueError("initial separator must be a finite nonzero vector")
        object.__setattr__(self, "initial", w)
        its = [e.iteration for e in self.schedule]
        if any(b <= a for a, b in zip(its, its[1:])):
            raise ValueError("drift schedule iterations must be strictly increasing")
        for e in self.schedule:
            if e.op not in ("flip", "rotate", "set"):
                raise ValueError(f"unknown drift op {e.op!r}")
            if e.op == "rotate" and (len(e.arg) != 1 or len(w) < 2):
                raise ValueError("rotate needs one angle and dimension >= 2")
            if e.op == "set" and (len(e.arg) != len(w) or not any(e.arg)):
                raise ValueError("set needs a nonzero vector of the stream dimension")
        if not 0.0 <= self.noise <= 1.0:
            raise ValueError("noise must be a probability")
        if self.margin < 0:
            raise ValueError("margin must be nonnegative")

    @property
    def dim(self) -> int:
        return len(self.initial)


def _apply_event(w: np.ndarray, e: DriftEvent) -> np.ndarray:
    if e.op == "flip":
        return -w
    if e.op == "set":
        return np.array(e.arg, dtype=np.float64)
    t = math.radians(e.arg[0])
    out = w.copy()
    out[0] = math.cos(t) * w[0] - math.sin(t) * w[1]
    out[1] = math.sin(t) * w[0] + math.cos(t) * w[1]
    return out


def separator_at(spec: DriftSpec, t: int) -> np.ndarray:
    """Separator in force for sample ``t`` (1-based)."""
    w = spec.initial
    for e in spec.schedule:
        if e.iteration < t:
            w = _apply_event(w, e)
    return w


def draw_samples(w_true: np.ndarray, n: int, rng: np.random.Generator,
                 margin: float = 0.0, noise: float = 0.0) -> list[Sample]:
    """Gaussian features with ||h|| ~ 1, labelled by sign(h^T w_true).

    Points with |h^T u| < margin (u the unit separator) are redrawn; labels are
    then flipped independently with probability ``noise``.
    """
    dim = len(w_true)
    u = w_true / np.linalg.norm(w_true)
    out = []
    while len(out) < n:
        h = rng.standard_normal(dim) / math.sqrt(dim)
        m = float(h @ u)
        if abs(m) < margin or m == 0.0:
            continue
        y = 1.0 if m > 0 else -1.0
        if noise > 0.0 and rng.random() < noise:
            y = -y
        out.append(Sample(y, SparseVector.from_dense(h)))
    return out


def generate_drift_stream(spec: DriftSpec, n: int, seed: int) -> list[Sample]:
    rng = np.random.default_rng(seed)
    out: list[Sample] = []
    w = spec.initial
    events = list(spec.schedule)
    for t in range(1, n + 1):
        while events and events[0].iteration < t:
            w = _apply_event(w, events.pop(0))
        out.extend(draw_samples(w, 1, rng, spec.margin, spec.noise))
    return out


def parse_schedule(text: str) -> tuple[DriftEvent, ...]:
    """``"2000 flip; 3000 rotate 30; 3500 set 1,0,0"`` to drift events."""
    events = []
    for chunk in text.replace("\n", ";").split(";"):
        parts = chunk.split()
        if not parts:
            continue
        try:
            it, op, rest = int(parts[0]), parts[1], parts[2:]
            arg = tuple(float(x) for x in ",".join(rest).split(",") if x) if rest else ()
        except (ValueError, IndexError):
            raise ValueError(f"bad schedule entry {chunk.strip()!r}") from None
        events.append(DriftEvent(it, op, arg))
    return tuple(events)


@dataclass(frozen=True)
class DriftFile:
    spec: DriftSpec
    n: int
    seed: int
    extra: dict = field(default_factory=dict)


def load_drift_spec(path: str | Path) -> DriftFile:
    """Read a ``[drift]`` INI section: dim, n, seed, noise, margin, initial, schedule."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    with open(path) as f:
        cp.read_file(f)
    if not cp.has_section("drift"):
        raise ValueError(f"{path}: missing [drift] section")
    sec = cp["drift"]
    seed = sec.getint("seed", 0)
    init = sec.get("initial", "random").strip()
    if init == "random":
        dim = sec.getint("dim")
        if dim is None:
            raise ValueError(f"{path}: 'dim' is required with a random initial separator")
        initial = np.random.default_rng(seed + 1).standard_normal(dim)
        initial /= np.linalg.norm(initial)
    else:
        initial = np.array([float(x) for x in init.split(",")])
        if sec.get("dim") is not None and sec.getint("dim") != len(initial):
            raise ValueError(f"{path}: 'dim' disagrees with the initial separator")
    schedule = parse_schedule(sec.get("schedule", ""))
    spec = DriftSpec(initial, schedule, sec.getfloat("noise", 0.0), sec.getfloat("margin", 0.0))
    known = {"dim", "n", "seed", "noise", "margin", "initial", "schedule"}
    extra = {k: v for k, v in sec.items() if k not in known}
    return DriftFile(spec, sec.getint("n", 1000), seed, extra)
