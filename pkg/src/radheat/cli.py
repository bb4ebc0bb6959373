"""Command-line entry point: ``radheat run|study|props``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .experiments import PRESETS, ConfigError, ExperimentConfig, convergence_study, preset, run_experiment


def _load_config(args) -> ExperimentConfig:
    if args.config:
        if args.preset:
            raise ConfigError("use either --preset or --config, not both")
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read {args.config}: {exc}") from exc
        cfg = ExperimentConfig.from_dict(data)
    elif args.preset:
        cfg = preset(args.preset)
    else:
        raise ConfigError("one of --preset or --config is required")
    overrides = {}
    if args.m is not None:
        if args.command == "study":
            overrides["m_list"] = list(args.m)
        else:
            overrides["m"] = args.m[0]
    if args.lam is not None:
        overrides["lam"] = args.lam
    if args.scheme is not None:
        overrides["scheme"] = args.scheme
    if args.out is not None:
        overrides["out"] = args.out
    return replace(cfg, **overrides)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--config", help="JSON file with ExperimentConfig fields")
    p.add_argument("--m", type=int, nargs="+", help="element count (run) or m-list (study)")
    p.add_argument("--lambda", dest="lam", type=float, help="tau_base = lambda h^2")
    p.add_argument("--scheme", choices=["Sym", "NonSym"])
    p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="radheat", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("run", help="single simulation"))
    p_study = sub.add_parser("study", help="convergence study against a fine reference run")
    _add_common(p_study)
    p_study.add_argument("--jobs", type=int, default=1, help="parallel simulations")
    sub.add_parser("props", help="run the randomized property checks")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "props":
            from .properties import run_all

            results = run_all()
            for r in results:
                print(r.line())
            return 0 if all(r.passed for r in results) else 1
        cfg = _load_config(args)
        if args.command == "run":
            res = run_experiment(cfg)
            last = res.trace.final
            print(f"{cfg.name}: stop={res.trace.stop_reason} steps={last.n} t={last.t_n:.6g} "
                  f"linf={last.linf_norm:.6g} min_nodal={res.trace.column('min_nodal').min():.6g}")
        else:
            study = convergence_study(cfg, jobs=args.jobs)
            sys.stdout.write(study.to_csv())
            sys.stdout.write(study.orders_csv())
    except ConfigError as exc:
        print(f"radheat: config error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
