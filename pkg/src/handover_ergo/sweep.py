"""Exhaustive enumeration of the boundary grid.

Produces the ground-truth posture-score distribution and the global
optimum that training runs are judged against. Cells are partitioned into
fixed-size chunks evaluated independently (optionally across processes);
results are identical for any worker count.
"""

from __future__ import annotations

import multiprocessing
import time
from dataclasses import dataclass

import numpy as np

from .skeleton import Anthropometry
from .reba import TaskAdjustments
from .grid import Boundary, BoxSpec
from .evaluator import PostureGrid
from .qlearn import RunRecord

_CHUNK = 2048
_worker_grid: PostureGrid | None = None


def _init_worker(anthro, boundary, box, adjustments):
    global _worker_grid
    _worker_grid = PostureGrid(anthro, boundary, box, adjustments)


def _eval_range(bounds) -> np.ndarray:
    start, stop = bounds
    grid = _worker_grid
    out = np.empty((stop - start, 2), dtype=np.int16)
    for flat in range(start, stop):
        out[flat - start] = grid.scores(grid.boundary.flat_to_cell(flat))
    return out


class ConfigMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class VerifyResult:
    passed: bool
    message: str


@dataclass
class SweepReport:
    config_hash: str
    total_cells: int
    histogram: dict          # postural score -> cell count
    fractions: dict          # postural score -> share of cells
    global_min: int
    argmin_cells: list       # [(cell ijk, point xyz m)] for every optimal cell
    elapsed: float
    scores: np.ndarray | None = None   # (n_cells, 2) postural/final, not serialized

    @property
    def modal_score(self) -> int:
        return max(self.histogram, key=lambda s: (self.histogram[s], -s))

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "sweep_report",
            "config_hash": self.config_hash,
            "total_cells": self.total_cells,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "fractions": {str(k): v for k, v in sorted(self.fractions.items())},
            "global_min": self.global_min,
            "argmin_cells": [{"cell": list(c), "point": list(p)} for c, p in self.argmin_cells],
            "elapsed_seconds": self.elapsed,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "SweepReport":
        return cls(
            config_hash=d["config_hash"],
            total_cells=d["total_cells"],
            histogram={int(k): v for k, v in d["histogram"].items()},
            fractions={int(k): v for k, v in d["fractions"].items()},
            global_min=d["global_min"],
            argmin_cells=[(tuple(e["cell"]), tuple(e["point"])) for e in d["argmin_cells"]],
            elapsed=d["elapsed_seconds"],
        )


def sweep(anthro: Anthropometry, boundary: Boundary, box: BoxSpec,
          adjustments: TaskAdjustments = TaskAdjustments(),
          workers: int | None = None,
          evaluator: PostureGrid | None = None) -> SweepReport:
    """Score every grid cell; returns the distribution, the optimum and the
    raw per-cell scores. When `evaluator` is given its cache is preloaded
    with the sweep results so subsequent training reuses them."""
    n = boundary.n_cells
    t0 = time.perf_counter()
    ranges = [(s, min(s + _CHUNK, n)) for s in range(0, n, _CHUNK)]

    if workers is None:
        workers = multiprocessing.cpu_count()
    if workers <= 1 or len(ranges) == 1:
        _init_worker(anthro, boundary, box, adjustments)
        parts = [_eval_range(r) for r in ranges]
    else:
        with multiprocessing.Pool(processes=workers, initializer=_init_worker,
                                  initargs=(anthro, boundary, box, adjustments)) as pool:
            parts = pool.map(_eval_range, ranges, chunksize=1)
    scores = np.vstack(parts)
    elapsed = time.perf_counter() - t0

    posturals = scores[:, 0].astype(int)
    counts = np.bincount(posturals)
    histogram = {int(s): int(c) for s, c in enumerate(counts) if c > 0}
    fractions = {s: c / n for s, c in histogram.items()}
    global_min = int(posturals.min())
    argmin_flat = np.nonzero(posturals == global_min)[0]
    argmin_cells = []
    for flat in argmin_flat:
        cell = boundary.flat_to_cell(int(flat))
        argmin_cells.append((cell, tuple(float(v) for v in boundary.cell_point(cell))))

    ref = evaluator if evaluator is not None else PostureGrid(anthro, boundary, box, adjustments)
    if evaluator is not None:
        evaluator.preload(scores)
    return SweepReport(
        config_hash=ref.config_hash,
        total_cells=n,
        histogram=histogram,
        fractions=fractions,
        global_min=global_min,
        argmin_cells=argmin_cells,
        elapsed=elapsed,
        scores=scores,
    )


def verify_against(report: SweepReport, run: RunRecord) -> VerifyResult:
    """Check a training run against the exhaustive oracle: the best found
    score must equal the global minimum and the best cell must be one of
    the optimal cells (any optimum counts when there are ties)."""
    if report.config_hash != run.config_hash:
        raise ConfigMismatchError(
            f"sweep config {report.config_hash} != run config {run.config_hash}"
        )
    argmin = {tuple(c) for c, _ in report.argmin_cells}
    score_ok = run.best_postural == report.global_min
    cell_ok = tuple(run.best_cell) in argmin
    if score_ok and cell_ok:
        return VerifyResult(True, f"run reached the oracle minimum {report.global_min}")
    return VerifyResult(False, (
        f"run best postural {run.best_postural} at cell {tuple(run.best_cell)} vs "
        f"oracle minimum {report.global_min} over {len(argmin)} optimal cells"
    ))
