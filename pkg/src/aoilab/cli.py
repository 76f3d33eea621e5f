"""Command-line entry point: one subcommand per scenario kind."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .harness import SCENARIO_KINDS, ConfigError, parse_config, run_scenario

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aoilab",
        description=(
            "Simulate the distributed age-vs-cost transmission game, solve its "
            "equilibrium, and emit result tables."
        ),
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in SCENARIO_KINDS:
        p = sub.add_parser(kind, help=f"run the {kind} scenario")
        p.add_argument("--config", type=Path, help="INI configuration file")
        p.add_argument("--seed", type=int, help="override the run seed")
        p.add_argument("--frames", type=int, help="override the frame count")
        p.add_argument("--frame-length", type=int, help="override slots per frame")
        p.add_argument("--out-dir", type=Path, default=Path("results"), help="output directory")
        p.add_argument("--mode", choices=("stochastic", "expected"), help="statistics source")
        p.add_argument(
            "--reinit-kappa",
            action="store_true",
            default=None,
            help="restart the learning-rate clock at roster changes",
        )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            print(f"error: cannot read {args.config}: {exc}", file=sys.stderr)
            return 2
    else:
        text = f"[scenario]\nkind = {args.kind}\n"

    overrides = {
        key: value
        for key, value in (
            ("seed", args.seed),
            ("frames", args.frames),
            ("frame_length", args.frame_length),
            ("mode", args.mode),
            ("reinit_kappa", args.reinit_kappa),
        )
        if value is not None
    }
    try:
        config, scenario = parse_config(text)
        if scenario.kind != args.kind:
            raise ConfigError(
                f"scenario.kind: config says {scenario.kind!r} but subcommand is {args.kind!r}"
            )
        if "seed" in overrides:
            config = replace(config, seed=overrides["seed"])
        if "frame_length" in overrides:
            config = replace(config, frame_length=overrides["frame_length"])
        if "frames" in overrides:
            scenario = replace(scenario, frames=overrides["frames"])
        if "mode" in overrides:
            scenario = replace(scenario, mode=overrides["mode"])
        if "reinit_kappa" in overrides:
            scenario = replace(scenario, reinit_kappa=overrides["reinit_kappa"])
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2

    # The manifest hashes the effective run: config text plus any overrides.
    effective = text
    if overrides:
        effective += f"\n; overrides {json.dumps(overrides, sort_keys=True)}\n"
    try:
        result = run_scenario(config, scenario, args.out_dir, config_text=effective)
    except (RuntimeError, ValueError) as exc:
        print(f"error while running {scenario.kind}: {exc}", file=sys.stderr)
        return 1

    for name, path in result.files.items():
        print(f"wrote {name}: {path}")
    for check, passed in result.checks.items():
        print(f"check: {check}: {'PASS' if passed else 'FAIL'}")
    return 0 if result.ok else 1


if __name__ == "__main__":
    sys.exit(main())
