#!/usr/bin/env python3
"""Render the standard figures from the CSV artifacts of a finished run.

Produces a posture-score histogram (sweep_histogram.csv), a box plot of
per-run minimum scores (train_summary.csv), and an optimized-vs-naive bar
chart (comparison.csv), skipping whichever inputs are missing.

    python scripts/plot_results.py --in out/desk --save figures/
"""

import argparse
import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _rows(path: Path):
    with open(path, newline="") as fh:
        yield from csv.DictReader(fh)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--in", dest="indir", default="out/experiment")
    ap.add_argument("--save", default="figures")
    args = ap.parse_args(argv)
    indir, save = Path(args.indir), Path(args.save)
    save.mkdir(parents=True, exist_ok=True)
    made = []

    hist = indir / "sweep_histogram.csv"
    if hist.exists():
        rows = list(_rows(hist))
        scores = [int(r["postural"]) for r in rows]
        fracs = [float(r["fraction"]) for r in rows]
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.bar(scores, fracs, color="#4878a8")
        ax.set_xlabel("postural score")
        ax.set_ylabel("fraction of grid cells")
        ax.set_title("Posture-score distribution over the handover boundary")
        fig.tight_layout()
        fig.savefig(save / "score_distribution.png", dpi=150)
        made.append("score_distribution.png")

    summary = indir / "train_summary.csv"
    if summary.exists():
        best = [int(r["best_postural"]) for r in _rows(summary)]
        fig, ax = plt.subplots(figsize=(4, 4))
        ax.boxplot([best], tick_labels=["training runs"])
        ax.set_ylabel("minimum postural score found")
        ax.set_title(f"Best score across {len(best)} seeded runs")
        fig.tight_layout()
        fig.savefig(save / "run_minima.png", dpi=150)
        made.append("run_minima.png")

    comparison = indir / "comparison.csv"
    if comparison.exists():
        rows = list(_rows(comparison))
        idx = range(len(rows))
        opt = [int(r["optimized_postural"]) for r in rows]
        naive = [int(r["baseline_postural"]) for r in rows]
        fig, ax = plt.subplots(figsize=(7, 4))
        width = 0.38
        ax.bar([i - width / 2 for i in idx], opt, width, label="optimized")
        ax.bar([i + width / 2 for i in idx], naive, width, label="shortest distance")
        ax.set_xticks(list(idx))
        ax.set_xticklabels([f"({r['start_x']}, {r['start_y']}, {r['start_z']})" for r in rows],
                           rotation=20, fontsize=7)
        ax.set_ylabel("postural score")
        ax.set_title("Optimized vs ergonomically naive handover point")
        ax.legend()
        fig.tight_layout()
        fig.savefig(save / "comparison.png", dpi=150)
        made.append("comparison.png")

    if made:
        print("wrote", ", ".join(str(save / m) for m in made))
    else:
        print(f"no CSV artifacts found under {indir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
