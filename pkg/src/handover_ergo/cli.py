"""Command-line experiment runner.

Subcommands:
    train      budgeted Q-learning runs, one per seed; JSON records + CSVs
    sweep      exhaustive grid sweep; report JSON + histogram CSV
    compare    optimized-vs-naive table over configured start points
    pose-dump  posture breakdown and landmarks for one grid point
    verify     check a training run against a sweep report

Exit codes: 0 success, 2 configuration error, 3 verification failure.
All coordinates in output artifacts are meters in the body-local frame.
"""

from __future__ import annotations

import argparse
import csv
import json
import multiprocessing
import sys
from dataclasses import asdict
from pathlib import Path

from .skeleton import LANDMARK_NAMES, AnthropometryError, forward_kinematics
from .reba import score_pose
from .ik import solve_reach
from .grid import BoundaryError
from .config import ConfigError, ExperimentConfig, load_config
from .evaluator import PostureGrid
from .qlearn import RunRecord, train
from .baseline import shortest_distance_target
from .sweep import ConfigMismatchError, SweepReport, sweep, verify_against

_CONFIG_ERRORS = (ConfigError, AnthropometryError, BoundaryError, ConfigMismatchError,
                  FileNotFoundError, NotADirectoryError)


def _write_json(path: Path, obj: dict) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _train_job(args) -> RunRecord:
    cfg, seed = args
    return train(cfg.anthro, cfg.boundary, cfg.box, cfg.hyper, seed,
                 adjustments=cfg.adjustments, start_cell=cfg.start_cell)


def cmd_train(args) -> int:
    cfg = _config(args)
    out = Path(args.out)
    if args.workers > 1 and cfg.runs > 1:
        with multiprocessing.Pool(processes=args.workers) as pool:
            records = pool.map(_train_job, [(cfg, s) for s in cfg.seeds])
    else:
        evaluator = PostureGrid(cfg.anthro, cfg.boundary, cfg.box, cfg.adjustments)
        records = [train(cfg.anthro, cfg.boundary, cfg.box, cfg.hyper, seed,
                         adjustments=cfg.adjustments, evaluator=evaluator,
                         start_cell=cfg.start_cell)
                   for seed in cfg.seeds]

    out.mkdir(parents=True, exist_ok=True)
    for rec in records:
        _write_json(out / f"run_seed{rec.seed}.json", rec.to_json_dict())
    _write_csv(out / "train_summary.csv",
               ["seed", "best_postural", "steps", "best_x", "best_y", "best_z"],
               [[r.seed, r.best_postural, r.steps, *r.best_position] for r in records])
    best = min(records, key=lambda r: (r.best_postural, r.seed))
    _write_csv(out / "best_position.csv", ["x", "y", "z"], [list(best.best_position)])

    for r in records:
        print(f"seed {r.seed}: best postural {r.best_postural} at "
              f"({r.best_position[0]:.3f}, {r.best_position[1]:.3f}, {r.best_position[2]:.3f}) "
              f"after {r.steps} steps")
    print(f"best over {len(records)} runs: postural {best.best_postural} (seed {best.seed})")
    print(f"artifacts written to {out}/")
    return 0


def cmd_sweep(args) -> int:
    cfg = _config(args)
    out = Path(args.out)
    report = sweep(cfg.anthro, cfg.boundary, cfg.box, cfg.adjustments, workers=args.workers)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "sweep_report.json", report.to_json_dict())
    _write_csv(out / "sweep_histogram.csv",
               ["postural", "count", "fraction"],
               [[s, report.histogram[s], report.fractions[s]] for s in sorted(report.histogram)])
    if args.cells_csv:
        rows = ([*cfg.boundary.cell_point(cfg.boundary.flat_to_cell(flat)), int(report.scores[flat, 0])]
                for flat in range(report.total_cells))
        _write_csv(Path(args.cells_csv), ["x", "y", "z", "postural"], rows)
    print(f"swept {report.total_cells} cells in {report.elapsed:.1f}s")
    print(f"global minimum postural {report.global_min} at {len(report.argmin_cells)} cells "
          f"({len(report.argmin_cells) / report.total_cells:.2%} of the grid)")
    print(f"modal score {report.modal_score} "
          f"({report.fractions[report.modal_score]:.2%} of the grid)")
    print(f"artifacts written to {out}/")
    return 0


def _optimum_cell(args, cfg: ExperimentConfig, evaluator: PostureGrid):
    """Best cell from a sweep report or run record artifact."""
    path = Path(args.optimum) if args.optimum else Path(args.out) / "sweep_report.json"
    if not path.exists():
        raise ConfigError(
            f"no optimum artifact at {path}; run the sweep or train command first, "
            f"or point --optimum at a sweep_report.json / run_seed*.json"
        )
    data = _load_json(path)
    kind = data.get("kind")
    if data.get("config_hash") != evaluator.config_hash:
        raise ConfigMismatchError(
            f"{path} was produced under config {data.get('config_hash')}, "
            f"current config is {evaluator.config_hash}"
        )
    if kind == "sweep_report":
        report = SweepReport.from_json_dict(data)
        # prefer the most laterally centered optimum, as the symmetry reward does
        cell, _ = min(report.argmin_cells, key=lambda cp: (abs(cp[1][0]), cp[0]))
        return tuple(cell)
    if kind == "run_record":
        return tuple(RunRecord.from_json_dict(data).best_cell)
    raise ConfigError(f"{path} is not a sweep report or run record (kind={kind!r})")


def cmd_compare(args) -> int:
    cfg = _config(args)
    if not cfg.compare_starts:
        raise ConfigError("compare.start_points is empty; nothing to compare")
    out = Path(args.out)
    evaluator = PostureGrid(cfg.anthro, cfg.boundary, cfg.box, cfg.adjustments)
    opt_cell = _optimum_cell(args, cfg, evaluator)
    opt_postural, opt_reba = evaluator.scores(opt_cell)

    rows = []
    violations = []
    for start in cfg.compare_starts:
        base_cell = shortest_distance_target(start, cfg.boundary)
        base_postural, base_reba = evaluator.scores(base_cell)
        rows.append([*start, opt_postural, base_postural, opt_reba, base_reba])
        if opt_postural > base_postural:
            violations.append((start, opt_postural, base_postural))

    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "comparison.csv",
               ["start_x", "start_y", "start_z",
                "optimized_postural", "baseline_postural",
                "optimized_final_reba", "baseline_final_reba"],
               rows)

    print(f"{'start':>28}  {'opt.postural':>12} {'naive.postural':>14} "
          f"{'opt.REBA':>8} {'naive.REBA':>10}")
    for r in rows:
        print(f"({r[0]:7.3f}, {r[1]:7.3f}, {r[2]:7.3f})  "
              f"{r[3]:>12} {r[4]:>14} {r[5]:>8} {r[6]:>10}")
    print(f"comparison written to {out / 'comparison.csv'}")
    if violations:
        for start, op, bp in violations:
            print(f"dominance violated at start {start}: optimized {op} > baseline {bp} "
                  f"(optimum artifact is not the true optimum)", file=sys.stderr)
        return 3
    return 0


def cmd_pose_dump(args) -> int:
    cfg = _config(args)
    out = Path(args.out)
    try:
        point = tuple(float(v) for v in args.point.replace(",", " ").split())
        if len(point) != 3:
            raise ValueError
    except ValueError:
        raise ConfigError(f"--point must be 'x,y,z', got {args.point!r}") from None
    if not cfg.boundary.contains_point(point):
        raise ConfigError(f"point {point} lies outside the boundary")

    solution = solve_reach(cfg.anthro, cfg.box.targets_for(point))
    breakdown = score_pose(solution.pose, cfg.adjustments)
    landmarks = forward_kinematics(cfg.anthro, solution.pose)

    out.mkdir(parents=True, exist_ok=True)
    evaluator = PostureGrid(cfg.anthro, cfg.boundary, cfg.box, cfg.adjustments)
    _write_json(out / "pose_breakdown.json", {
        "schema_version": 1,
        "kind": "pose_dump",
        "config_hash": evaluator.config_hash,
        "point": list(point),
        "reachable": solution.reachable,
        "residual_l": solution.residual_l,
        "residual_r": solution.residual_r,
        "pose": asdict(solution.pose),
        "breakdown": breakdown.as_dict(),
    })
    _write_csv(out / "landmarks.csv", ["landmark", "x", "y", "z"],
               [[name, *landmarks.as_dict()[name]] for name in LANDMARK_NAMES])
    print(f"postural {breakdown.postural} (A={breakdown.score_a}, B={breakdown.score_b}), "
          f"final REBA {breakdown.final_reba}, reachable={solution.reachable}")
    print(f"artifacts written to {out}/")
    return 0


def cmd_verify(args) -> int:
    report = SweepReport.from_json_dict(_load_json(args.report))
    run = RunRecord.from_json_dict(_load_json(args.run))
    result = verify_against(report, run)
    print(("PASS: " if result.passed else "FAIL: ") + result.message)
    return 0 if result.passed else 3


def _config(args) -> ExperimentConfig:
    overrides = {
        "boundary.step": getattr(args, "step", None),
        "rl.seed_base": getattr(args, "seed_base", None),
        "rl.budget_seconds": getattr(args, "budget_seconds", None),
        "rl.budget_steps": getattr(args, "budget_steps", None),
    }
    return load_config(args.config, overrides)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="handover-ergo",
        description="Ergonomically optimal bimanual handover positions via "
                    "tabular Q-learning over an exact posture-score field.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="experiment config file")
    common.add_argument("--out", default="out", help="output directory (default: out)")
    common.add_argument("--step", type=float, default=None, help="override boundary.step (m)")
    common.add_argument("--seed-base", type=int, default=None, help="override rl.seed_base")
    common.add_argument("--budget-seconds", type=float, default=None,
                        help="override the training budget (wall clock)")
    common.add_argument("--budget-steps", type=int, default=None,
                        help="override the training budget (steps)")
    common.add_argument("--workers", type=int, default=multiprocessing.cpu_count(),
                        help="parallel workers (default: CPU count)")

    p = sub.add_parser("train", parents=[common], help="run seeded Q-learning campaigns")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("sweep", parents=[common], help="exhaustively score every grid cell")
    p.add_argument("--cells-csv", default=None, help="also dump per-cell x,y,z,postural CSV")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", parents=[common],
                       help="optimized vs shortest-distance baseline at the configured starts")
    p.add_argument("--optimum", default=None,
                   help="sweep report or run record supplying the optimized target "
                        "(default: <out>/sweep_report.json)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("pose-dump", parents=[common],
                       help="dump the posture breakdown and landmarks for one point")
    p.add_argument("--point", required=True,
                   help="handover point 'x,y,z' in meters (use --point=-0.1,... for negatives)")
    p.set_defaults(func=cmd_pose_dump)

    p = sub.add_parser("verify", help="check a run record against a sweep report")
    p.add_argument("--report", required=True, help="sweep_report.json path")
    p.add_argument("--run", required=True, help="run_seed*.json path")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _CONFIG_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
