"""Command-line front end.

One subcommand per experiment kind. A config file supplies the run
definition; repeated --set section.key=value flags override single keys.
Without a config file the defaults apply, but experiment.seed must then be
given via --set (runs are never wall-clock seeded). Output lands in the
config's output_dir, re-rooted by $ROTORPAIR_OUTPUT_ROOT when set.

Exit codes: 0 success, 2 config error, 3 regime refusal, 4 resource refusal.
"""

from __future__ import annotations

import argparse
import sys

from .classical import NoChaoticSeaError
from .config import ConfigError, ExperimentConfig, apply_overrides, parse_config
from .experiments import (
    RUNNERS,
    RegimeRefusalError,
    ResourceRefusalError,
    resolve_output_dir,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_REGIME = 3
EXIT_RESOURCE = 4

# subcommand -> experiment kind
SUBCOMMANDS = {
    "purity-sweep": "purity-sweep",
    "collapse": "lyapunov-collapse",
    "wigner-compare": "wigner-compare",
    "env-decoherence": "env-decoherence",
    "gamma": "gamma-estimate",
    "lyapunov": "lyapunov-estimate",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotorpair",
        description="coupled kicked-rotator entanglement experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, kind in SUBCOMMANDS.items():
        p = sub.add_parser(name, help=f"run the {kind} experiment")
        p.add_argument("--config", help="path to a key = value config file")
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="SECTION.KEY=VALUE",
            help="override one config key (repeatable)",
        )
    return parser


def _load_config(args) -> ExperimentConfig:
    kind = SUBCOMMANDS[args.command]
    if args.config:
        cfg = parse_config(args.config)
        if cfg.kind != kind:
            raise ConfigError(
                f"config kind {cfg.kind!r} does not match subcommand {args.command!r}"
            )
        return apply_overrides(cfg, args.overrides)
    overrides = dict(item.partition("=")[::2] for item in args.overrides)
    if "experiment.seed" not in {k.strip() for k in overrides}:
        raise ConfigError(
            "no config file given: experiment.seed must be set via --set "
            "(runs are never wall-clock seeded)"
        )
    base = ExperimentConfig(kind=kind, seed=0)
    cfg = apply_overrides(base, args.overrides)
    if cfg.kind != kind:
        raise ConfigError(
            f"override kind {cfg.kind!r} does not match subcommand {args.command!r}"
        )
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        out_dir = resolve_output_dir(cfg)
        manifest = RUNNERS[cfg.kind](cfg)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (RegimeRefusalError, NoChaoticSeaError) as err:
        print(f"regime refusal: {err}", file=sys.stderr)
        return EXIT_REGIME
    except ResourceRefusalError as err:
        print(f"resource refusal: {err}", file=sys.stderr)
        return EXIT_RESOURCE
    n_out = len(manifest.get("outputs", []))
    secs = manifest.get("timing", {}).get("wall_seconds", 0.0)
    print(f"{cfg.kind}: {n_out} output file(s) in {out_dir} ({secs:.1f}s)")
    print(f"manifest: {out_dir / 'manifest.json'}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
