"""Command-line interface.

Exit codes: 0 success, 1 validation or gate failure, 2 usage/config error,
3 external solver failure.
"""

from __future__ import annotations

import argparse
import sys

from .config import load_config
from .errors import ConfigError, ExternalSolverFailure, ToolchainError
from .pipeline import (
    PipelineLock,
    stage_decks,
    stage_mesh,
    stage_networks,
    stage_post,
    stage_run,
)

EXIT_OK = 0
EXIT_GATE = 1
EXIT_CONFIG = 2
EXIT_EXTERNAL = 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="panelpipe",
        description="panel-method pre/post-processing pipeline",
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("check", "ingest mesh, build networks, report abutment/orientation"),
        ("prep", "emit LaWGS, auxiliary, and a502 deck files"),
        ("run", "run the flow solution (embedded or external backend)"),
        ("post", "export Tecplot .dat, macro, and drag-polar CSV"),
        ("all", "run every stage in order"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", required=True, help="pipeline config YAML")
        sp.add_argument("--alpha", nargs="+", type=float, help="override the alpha sweep")
        sp.add_argument("--backend", choices=("embedded", "external"), help="solver backend")
        sp.add_argument("--force", action="store_true", help="emit decks past the abutment gate")
        sp.add_argument("--jobs", type=int, help="worker/thread budget for external runs")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    overrides = {}
    if args.alpha:
        overrides["alphas"] = args.alpha
    if args.backend:
        overrides["backend"] = args.backend
    if args.jobs:
        overrides["jobs"] = args.jobs
    try:
        cfg = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        with PipelineLock(cfg.output_dir):
            return _dispatch(args, cfg)
    except ExternalSolverFailure as exc:
        print(f"external solver failure: {exc}", file=sys.stderr)
        if exc.stderr:
            print(exc.stderr, file=sys.stderr)
        return EXIT_EXTERNAL
    except ToolchainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GATE


def _dispatch(args, cfg) -> int:
    cmd = args.command
    if cmd == "check":
        stage_mesh(cfg)
        built = stage_networks(cfg)
        n_bad = len(built.report.mismatched)
        worst = min(built.orientation.values()) if built.orientation else 1.0
        print(built.report.to_text(), end="")
        for name, frac in sorted(built.orientation.items()):
            print(f"orientation {name}: {frac:.6f}")
        print(f"{n_bad} mismatched")
        return EXIT_OK if n_bad == 0 and worst >= 1.0 else EXIT_GATE

    if cmd == "prep":
        stage_mesh(cfg)
        stage_networks(cfg)
        stage_decks(cfg, force=args.force)
        print(f"decks written under {cfg.output_dir / '03_decks'}")
        return EXIT_OK

    if cmd == "run":
        stage_run(cfg)
        print(f"solution written under {cfg.output_dir / '04_raw'}")
        return EXIT_OK

    if cmd == "post":
        stage_post(cfg)
        print(f"exports written under {cfg.output_dir / '05_post'}")
        return EXIT_OK

    # all
    stage_mesh(cfg)
    built = stage_networks(cfg)
    n_bad = len(built.report.mismatched)
    worst = min(built.orientation.values()) if built.orientation else 1.0
    if (n_bad > 0 or worst < 1.0) and not args.force:
        print(built.report.to_text(), end="", file=sys.stderr)
        print("abutment/orientation gate failed (use --force to override)", file=sys.stderr)
        return EXIT_GATE
    stage_decks(cfg, force=args.force)
    stage_run(cfg)
    stage_post(cfg)
    print(f"pipeline complete under {cfg.output_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
