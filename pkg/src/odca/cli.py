"""Command line: ``odca run|validate <config>`` and ``odca gen-synthetic <spec> <out>``."""

from __future__ import annotations

import argparse
import logging
import sys

from .bench import ConfigError, DataError, emit_curves, format_summary, load_config, resolve_prefix, run_experiment
from .data_io import generate_drift_stream, load_drift_spec, write_libsvm

EXIT_OK, EXIT_CONFIG, EXIT_DATA = 0, 2, 3

log = logging.getLogger("odca")


def _report_config(exc: ConfigError) -> int:
    for e in exc.errors:
        print(f"config error: {e}", file=sys.stderr)
    return EXIT_CONFIG


def cmd_validate(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        return _report_config(exc)
    print(f"{args.config}: ok ({len(cfg.algorithms)} algorithms)")
    return EXIT_OK


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        return _report_config(exc)
    try:
        result = run_experiment(cfg)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    header = cfg.resolved_lines() + ["evaluation = smoothed iterate when kappa > 0, raw iterate otherwise"]
    try:
        paths = emit_curves(result.records, resolve_prefix(cfg.output), header)
    except OSError as exc:
        print(f"config error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(format_summary(result))
    for w in result.warnings:
        print(f"warning: {w}")
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK


def cmd_gen_synthetic(args) -> int:
    try:
        drift = load_drift_spec(args.spec)
    except (OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    samples = generate_drift_stream(drift.spec, drift.n, drift.seed)
    try:
        write_libsvm(samples, args.out)
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    print(f"wrote {len(samples)} samples to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="odca", description="Online dual coordinate-ascent benchmarks")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment and write CSV curves")
    r.add_argument("config")
    r.set_defaults(func=cmd_run)
    v = sub.add_parser("validate", help="check a configuration without running it")
    v.add_argument("config")
    v.set_defaults(func=cmd_validate)
    g = sub.add_parser("gen-synthetic", help="write a drifting synthetic stream in LIBSVM format")
    g.add_argument("spec")
    g.add_argument("out")
    g.set_defaults(func=cmd_gen_synthetic)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
