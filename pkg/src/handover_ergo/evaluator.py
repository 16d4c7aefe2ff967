"""Per-cell posture evaluation with memoized scores.

PostureGrid ties together the boundary grid, the box geometry, the reach
solver and the REBA scorer: cell index -> hand targets -> pose -> scores.
Scores are cached per cell; an exhaustive sweep can preload the cache so
later training runs never re-solve a visited cell.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict

import numpy as np

from .skeleton import Anthropometry, Landmarks, forward_kinematics
from .reba import RebaBreakdown, TaskAdjustments, score_pose
from .ik import HandTargets, ReachSolution, get_solver
from .grid import Boundary, BoxSpec


class PostureGrid:
    def __init__(self, anthro: Anthropometry, boundary: Boundary,
                 box: BoxSpec, adjustments: TaskAdjustments = TaskAdjustments()):
        self.anthro = anthro
        self.boundary = boundary
        self.box = box
        self.adjustments = adjustments
        self._solver = get_solver(anthro)
        self._cache: dict[tuple[int, int, int], tuple[int, int]] = {}

    @property
    def config_hash(self) -> str:
        """Hash of everything that determines a cell's score."""
        payload = {
            "anthro": asdict(self.anthro),
            "boundary": asdict(self.boundary),
            "box": asdict(self.box),
            "adjustments": asdict(self.adjustments),
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def targets(self, cell) -> HandTargets:
        return self.box.targets_for(self.boundary.cell_point(cell))

    def solution(self, cell) -> ReachSolution:
        return self._solver.solve(self.targets(cell))

    def breakdown(self, cell) -> RebaBreakdown:
        return score_pose(self.solution(cell).pose, self.adjustments)

    def landmarks(self, cell) -> Landmarks:
        return forward_kinematics(self.anthro, self.solution(cell).pose)

    def scores(self, cell) -> tuple[int, int]:
        """(postural, final_reba) for a cell, memoized."""
        cell = tuple(cell)
        hit = self._cache.get(cell)
        if hit is None:
            b = self.breakdown(cell)
            hit = (b.postural, b.final_reba)
            self._cache[cell] = hit
        return hit

    def postural(self, cell) -> int:
        return self.scores(cell)[0]

    def preload(self, scores: np.ndarray) -> None:
        """Fill the cache from a full sweep's (n_cells, 2) score array."""
        if scores.shape != (self.boundary.n_cells, 2):
            raise ValueError(f"expected {(self.boundary.n_cells, 2)} score array, got {scores.shape}")
        flat_to_cell = self.boundary.flat_to_cell
        for flat in range(scores.shape[0]):
            self._cache[flat_to_cell(flat)] = (int(scores[flat, 0]), int(scores[flat, 1]))

    def cached_count(self) -> int:
        return len(self._cache)
