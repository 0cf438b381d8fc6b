"""Shared helper: run a preset through the library and print its summary."""
import argparse
import json
from pathlib import Path

from topoqubits.cli import run
from topoqubits.config import preset_config, set_value


def run_preset(name: str, description: str) -> Path:
    ap = argparse.ArgumentParser(description=description)
    ap.add_argument("--out", type=Path, default=Path("runs") / name)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE")
    args = ap.parse_args()
    cfg = preset_config(name)
    set_value(cfg, "run.seed", str(args.seed))
    for item in args.set:
        key, _, value = item.partition("=")
        set_value(cfg, key, value)
    out = run(cfg.validate(), args.out)
    for summary in sorted(out.glob("*summary.json")) + sorted(out.glob("edge_modes.json")):
        print(f"== {summary.name}")
        text = json.dumps(json.loads(summary.read_text()), indent=1)
        print(text if len(text) < 4000 else text[:4000] + "\n...")
    print(f"outputs in {out}")
    return out
