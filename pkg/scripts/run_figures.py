#!/usr/bin/env python3
"""Run every bundled experiment config and collect the JSON artifacts.

Writes one <name>.json per config into the output directory and prints a
one-line summary per run. Exit status is the worst exit code seen, so CI
can gate on it.
"""

import argparse
import sys
from pathlib import Path

from qtreesearch.cli import render_json, write_output
from qtreesearch.config import bundled_configs, load_config
from qtreesearch.runner import run_experiment


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="artifacts", help="where to put the JSON files")
    parser.add_argument("--seed", type=int, default=None, help="override every config's seed")
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    worst = 0
    for name, path in sorted(bundled_configs().items()):
        config = load_config(path)
        if args.seed is not None:
            import dataclasses

            config = dataclasses.replace(config, seed=args.seed)
        artifact, exit_code = run_experiment(config)
        write_output(render_json(artifact), str(out_dir / f"{name}.json"))
        worst = max(worst, exit_code)
        summary = artifact.get("result")
        if summary is None:
            top = max(
                artifact["histogram"].items(), key=lambda kv: kv[1]["probability"]
            )
            line = f"prepared, top outcome {top[0]} at {top[1]['probability']:.4f}"
        else:
            line = (
                f"verified={summary['verified']} found={summary['found']} "
                f"trials={summary['trials']}"
            )
        print(f"{name}: strategy={config.strategy} -> {line} [exit {exit_code}]")
    print(f"artifacts in {out_dir}/")
    return worst


if __name__ == "__main__":
    sys.exit(main())
