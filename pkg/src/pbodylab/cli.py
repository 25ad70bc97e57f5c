"""Command line: check, run, clean-cache."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .cache import ColengthCache, clean_cache
from .dsl import SpecError, parse_spec
from .reports import FAIL
from .runner import build_model, run_experiment


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pbodylab", description="Lattice-count and p-body volume experiments.")
    sub = ap.add_subparsers(dest="verb", required=True)
    chk = sub.add_parser("check", help="parse and build the models, run nothing")
    chk.add_argument("--spec", required=True, type=Path)
    run = sub.add_parser("run", help="run the experiments of a spec file")
    run.add_argument("--spec", required=True, type=Path)
    run.add_argument("--out", type=Path, default=Path("results"))
    run.add_argument("--format", choices=("csv", "json"), default="json")
    run.add_argument("--threads", type=int, default=1)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--cache-dir", type=Path, default=None)
    run.add_argument("--no-cache", action="store_true")
    cc = sub.add_parser("clean-cache", help="delete the colength cache")
    cc.add_argument("--cache-dir", type=Path, default=None)
    return ap


def _load(path: Path):
    return parse_spec(path.read_bytes())


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.verb == "clean-cache":
        n = clean_cache(args.cache_dir)
        print(f"removed {n} cached entries")
        return 0
    try:
        spec = _load(args.spec)
        if args.verb == "check":
            model = build_model(spec)
            for x in spec.experiments:
                model.family(x.family, validate=False)
            print(f"{args.spec}: ok ({len(spec.experiments)} experiments)")
            return 0
        if args.threads < 1:
            print("error: --threads must be >= 1", file=sys.stderr)
            return 2
        cache = None if args.no_cache else ColengthCache(args.cache_dir)
        reports = run_experiment(spec, out_dir=args.out, fmt=args.format, threads=args.threads,
                                 seed=args.seed, cache=cache)
    except SpecError as exc:
        print(f"{args.spec}:{exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for r in reports:
        lim = "-" if r.extrapolated_limit is None else f"{float(r.extrapolated_limit):.6g}"
        print(f"{r.verdict:12} {r.label:32} limit={lim} {r.details.get('message', '')}".rstrip())
    return 1 if any(r.verdict == FAIL for r in reports) else 0


if __name__ == "__main__":
    sys.exit(main())
