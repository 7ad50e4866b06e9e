"""Command line front end.

Exit codes: 0 when every executed run completed without divergence and
every hard acceptance threshold passed, 1 when a run diverged or a hard
threshold failed, 2 for usage, config, or runtime errors.  Informational
gain-check failures never affect the exit code; they appear in reports.
"""

from __future__ import annotations

import argparse
import sys

from ptsm.config import ConfigError, ExperimentConfig
from ptsm.experiments import (
    EXAMPLE_NAMES,
    run_compare,
    run_example,
    run_experiment,
    run_validate,
)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", required=True, help="output directory for run artifacts")
    p.add_argument("--no-plots", action="store_true", help="skip figure rendering")


def _add_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="base seed for the run list")
    p.add_argument("--dt", type=float, default=None, help="integration step override")
    p.add_argument("--horizon", type=float, default=None, help="horizon override in seconds")
    p.add_argument("--sgn", choices=("layer", "exact"), default=None,
                   help="sign regularization of the hitting laws")
    p.add_argument("--layer-width", type=float, default=None,
                   help="boundary layer half-width (with --sgn layer)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ptsm",
        description="Predefined-time terminal sliding mode control: run and analyze experiments")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("example", help="run one of the shipped experiments")
    p.add_argument("name", choices=EXAMPLE_NAMES)
    _add_common(p)
    _add_overrides(p)

    p = sub.add_parser("run", help="run an experiment described by a config file")
    p.add_argument("config", help="path to a sectioned key = value config")
    _add_common(p)
    _add_overrides(p)

    p = sub.add_parser("sweep", help="run a config's full seed list on a worker pool")
    p.add_argument("config")
    _add_common(p)
    p.add_argument("--workers", type=int, default=4)

    p = sub.add_parser("compare", help="energy comparison of the three manipulator laws")
    _add_common(p)
    p.add_argument("--seeds", default="1,2,3", help="comma-separated seed list")

    p = sub.add_parser("validate", help="run the property-validation suite")
    p.add_argument("--out", default=None, help="directory for validate.json")
    return ap


def _override_kwargs(args) -> dict:
    kw = {}
    if args.dt is not None:
        kw["dt"] = args.dt
    if args.horizon is not None:
        kw["horizon"] = args.horizon
    if args.sgn is not None:
        kw["sgn"] = args.sgn
    if args.layer_width is not None:
        kw["layer_width"] = args.layer_width
    return kw


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "example":
            report = run_example(args.name, args.out, seed_override=args.seed,
                                 make_plots=not args.no_plots, **_override_kwargs(args))
            print("\n".join(report.lines()))
            return 0 if report.all_pass else 1

        if args.command in ("run", "sweep"):
            cfg = ExperimentConfig.from_file(args.config)
            kw = _override_kwargs(args) if args.command == "run" else {}
            if args.command == "run" and args.seed is not None:
                kw["seeds"] = tuple(range(args.seed, args.seed + len(cfg.seeds)))
            workers = args.workers if args.command == "sweep" else 1
            report = run_experiment(cfg.with_overrides(**kw), args.out,
                                    make_plots=not args.no_plots, workers=workers)
            print("\n".join(report.lines()))
            return 0 if report.all_pass else 1

        if args.command == "compare":
            seeds = tuple(int(s) for s in args.seeds.split(","))
            report = run_compare(args.out, seeds=seeds, make_plots=not args.no_plots)
            for row in report["rows"]:
                print(f"seed {row['seed']}: E_ptsm={row['ptsm']:.1f} E_tbg={row['tbg']:.1f} "
                      f"E_fixed={row['fixed']:.1f}")
            print("energy ordering (tbg < ptsm):", "PASS" if report["all_pass"] else "FAIL")
            return 0 if report["all_pass"] else 1

        if args.command == "validate":
            report = run_validate(args.out)
            for prop in report["properties"]:
                tag = "PASS" if prop["passed"] else ("INFO-FAIL" if prop["informational"] else "FAIL")
                print(f"{tag:9s} {prop['name']}  margin={prop['margin']:.4g}  {prop['detail']}")
            print("overall:", "PASS" if report["all_pass"] else "FAIL")
            return 0 if report["all_pass"] else 1

        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, RuntimeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
