"""Command-line front end: ``topoqubits <experiment> [options]``.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from .config import EXPERIMENTS, FORMATS, PRESETS, RunConfig, load_config, preset_config, set_value
from .errors import ConfigError, InvalidSpecError, NumericalError
from .experiments import RUNNERS
from .lattice_models import GENERATOR_IDENTITY
from .outputs import OutputSet, build_manifest, staged_output, write_json

log = logging.getLogger("topoqubits")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="INI file with [section] key = value entries")
    p.add_argument("--preset", help="start from a named preset (see --list-presets)")
    p.add_argument("--out", type=Path, help="output directory (default runs/<experiment>-<digest>)")
    p.add_argument("--seed", type=int, help="disorder seed (unsigned 64-bit)")
    p.add_argument("--format", help=f"comma-separated subset of {','.join(FORMATS)}")
    p.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                   help="override a single config value; repeatable")
    p.add_argument("--list-presets", action="store_true", help="print presets and exit")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="topoqubits", description=__doc__.splitlines()[0])
    parser.add_argument("--list-presets", action="store_true", help="print presets and exit")
    sub = parser.add_subparsers(dest="experiment")
    for name in EXPERIMENTS:
        _add_common(sub.add_parser(name, help=f"run the {name} experiment"))
    return parser


def list_presets(stream=None) -> None:
    stream = stream or sys.stdout
    for name, (experiment, desc, _) in PRESETS.items():
        print(f"{name:12s} {experiment:9s} {desc}", file=stream)


def resolve_config(args: argparse.Namespace) -> RunConfig:
    if args.preset:
        cfg = preset_config(args.preset)
        if cfg.experiment != args.experiment:
            raise ConfigError(
                f"preset {args.preset!r} belongs to '{cfg.experiment}', not '{args.experiment}'"
            )
    else:
        cfg = RunConfig()
    if args.config:
        load_config(args.config, cfg)
    cfg.run.experiment = args.experiment
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set {item!r} must look like section.key=value")
        set_value(cfg, key.strip(), value)
    if args.seed is not None:
        set_value(cfg, "run.seed", str(args.seed))
    if args.format is not None:
        set_value(cfg, "run.formats", args.format)
    return cfg.validate()


def run(cfg: RunConfig, out_dir: Path | None = None) -> Path:
    """Run ``cfg`` into ``out_dir``; nothing is left behind on failure."""
    target = Path(out_dir) if out_dir else Path("runs") / f"{cfg.experiment}-{cfg.digest()[:12]}"
    t0 = time.perf_counter()
    with staged_output(target) as tmp:
        outputs = OutputSet(tmp, cfg.run.formats)
        RUNNERS[cfg.experiment](cfg, outputs)
        for w in outputs.warnings:
            log.warning(w)
        manifest = build_manifest(cfg.to_dict(), cfg.run.seed, GENERATOR_IDENTITY, outputs,
                                  time.perf_counter() - t0)
        manifest["config_digest"] = cfg.digest()
        write_json(manifest, tmp / "manifest.json")
    return target


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.list_presets:
        list_presets()
        return EXIT_OK
    if args.experiment is None:
        parser.print_usage(sys.stderr)
        print("topoqubits: error: choose an experiment", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = resolve_config(args)
        target = run(cfg, args.out)
    except (ConfigError, InvalidSpecError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(target)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
