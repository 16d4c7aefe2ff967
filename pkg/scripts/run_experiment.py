#!/usr/bin/env python3
"""Full experiment pipeline: sweep -> train -> verify -> compare.

Runs the exhaustive oracle sweep, a multi-seed training campaign, checks
every run against the oracle, and emits the optimized-vs-naive comparison
table. All artifacts land in the output directory.

    python scripts/run_experiment.py --config configs/desk.cfg --out out/desk
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from handover_ergo.cli import main as cli  # noqa: E402


def run(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default="configs/desk.cfg")
    ap.add_argument("--out", default="out/experiment")
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--budget-steps", type=int, default=None)
    args = ap.parse_args(argv)

    common = ["--config", args.config, "--out", args.out]
    if args.workers is not None:
        common += ["--workers", str(args.workers)]
    train_flags = []
    if args.budget_steps is not None:
        train_flags += ["--budget-steps", str(args.budget_steps)]

    if rc := cli(["sweep", *common]):
        return rc
    if rc := cli(["train", *common, *train_flags]):
        return rc

    out = Path(args.out)
    failures = 0
    for record in sorted(out.glob("run_seed*.json")):
        rc = cli(["verify", "--report", str(out / "sweep_report.json"), "--run", str(record)])
        failures += rc != 0
    print(f"verification: {failures} of {len(list(out.glob('run_seed*.json')))} runs "
          f"missed the oracle minimum")

    if rc := cli(["compare", *common]):
        return rc
    return 0


if __name__ == "__main__":
    sys.exit(run())
