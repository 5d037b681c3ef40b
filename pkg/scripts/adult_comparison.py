"""O-DCA vs SGD vs S-DCA on Adult (a6a) through the benchmark runner.

Expects data/a6a and data/a6a.t (LIBSVM site). Writes out/adult_*.csv.

    python3 scripts/adult_comparison.py [--config configs/adult.ini] [--limit 2000]
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from odca.bench import ConfigError, DataError, emit_curves, format_summary, load_config, resolve_prefix, run_experiment

ROOT = Path(__file__).resolve().parents[1]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--config", default=str(ROOT / "configs" / "adult.ini"))
    p.add_argument("--limit", type=int, default=None, help="use only the first N training samples")
    args = p.parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        for e in exc.errors:
            print(f"config error: {e}", file=sys.stderr)
        print("Adult needs data/a6a and data/a6a.t; see README.", file=sys.stderr)
        return 2
    if args.limit:
        cfg = replace(cfg, data=replace(cfg.data, limit=args.limit))
    try:
        result = run_experiment(cfg)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    paths = emit_curves(result.records, resolve_prefix(cfg.output), cfg.resolved_lines())
    print(format_summary(result))
    for w in result.warnings:
        print(f"warning: {w}")
    for path in paths:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
