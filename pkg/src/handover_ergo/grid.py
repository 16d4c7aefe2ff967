"""Discretized search volume for the handover point, and the carried box.

The boundary is the axis-aligned reachable region: shoulder width across x,
knee height to head top in y, and arm extension in z, sampled on a uniform
grid (default step 3 mm). Grid coordinates are centered per axis so a
symmetric boundary produces a mirror-symmetric grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .skeleton import Anthropometry

from .ik import HandTargets


class BoundaryError(ValueError):
    pass


@dataclass(frozen=True)
class Boundary:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    z_min: float
    z_max: float
    step: float = 0.003

    def __post_init__(self):
        vals = (self.x_min, self.x_max, self.y_min, self.y_max,
                self.z_min, self.z_max, self.step)
        if not all(math.isfinite(v) for v in vals):
            raise BoundaryError("boundary values must be finite")
        if self.step <= 0:
            raise BoundaryError(f"step must be positive, got {self.step}")
        # extents below one step are allowed and produce a single cell on that axis
        for lo, hi, axis in ((self.x_min, self.x_max, "x"),
                             (self.y_min, self.y_max, "y"),
                             (self.z_min, self.z_max, "z")):
            if hi - lo <= 0:
                raise BoundaryError(f"{axis} extent must be positive, got {hi - lo}")

    @classmethod
    def from_anthro(cls, anthro: Anthropometry, step: float = 0.003) -> "Boundary":
        half = 0.5 * anthro.shoulder_width
        return cls(x_min=-half, x_max=half,
                   y_min=anthro.knee_height, y_max=anthro.height,
                   z_min=0.0, z_max=anthro.arm_reach, step=step)

    @property
    def shape(self) -> tuple[int, int, int]:
        return tuple(int(math.floor((hi - lo) / self.step + 1e-9)) + 1
                     for lo, hi in ((self.x_min, self.x_max),
                                    (self.y_min, self.y_max),
                                    (self.z_min, self.z_max)))

    @property
    def n_cells(self) -> int:
        nx, ny, nz = self.shape
        return nx * ny * nz

    @property
    def origin(self) -> tuple[float, float, float]:
        # center the grid inside the box so symmetric bounds give a symmetric grid
        out = []
        for (lo, hi), n in zip(((self.x_min, self.x_max),
                                (self.y_min, self.y_max),
                                (self.z_min, self.z_max)), self.shape):
            out.append(lo + 0.5 * ((hi - lo) - (n - 1) * self.step))
        return tuple(out)

    def cell_point(self, cell) -> np.ndarray:
        i, j, k = cell
        ox, oy, oz = self.origin
        return np.array([ox + i * self.step, oy + j * self.step, oz + k * self.step])

    def contains_point(self, point) -> bool:
        x, y, z = (float(v) for v in point)
        return (self.x_min - 1e-12 <= x <= self.x_max + 1e-12
                and self.y_min - 1e-12 <= y <= self.y_max + 1e-12
                and self.z_min - 1e-12 <= z <= self.z_max + 1e-12)

    def contains_cell(self, cell) -> bool:
        return all(0 <= c < n for c, n in zip(cell, self.shape))

    def snap(self, point) -> tuple[int, int, int]:
        """Nearest grid cell to an arbitrary point (clamped into the grid)."""
        out = []
        for v, o, n in zip(point, self.origin, self.shape):
            idx = int(math.floor((float(v) - o) / self.step + 0.5))
            out.append(min(max(idx, 0), n - 1))
        return tuple(out)

    def center_cell(self) -> tuple[int, int, int]:
        nx, ny, nz = self.shape
        return (nx // 2, ny // 2, nz // 2)

    def flat_to_cell(self, flat: int) -> tuple[int, int, int]:
        nx, ny, nz = self.shape
        i, rest = divmod(flat, ny * nz)
        j, k = divmod(rest, nz)
        return (i, j, k)

    def cell_to_flat(self, cell) -> int:
        i, j, k = cell
        _, ny, nz = self.shape
        return (i * ny + j) * nz + k


@dataclass(frozen=True)
class BoxSpec:
    """Carried object: the optimized state is the midpoint between the two
    hand contact points, separated laterally by handle_separation."""

    handle_separation: float = 0.4

    def __post_init__(self):
        if not (math.isfinite(self.handle_separation) and self.handle_separation > 0):
            raise ValueError(f"handle_separation must be positive, got {self.handle_separation}")

    def targets_for(self, midpoint) -> HandTargets:
        x, y, z = (float(v) for v in midpoint)
        half = 0.5 * self.handle_separation
        return HandTargets(left=(x - half, y, z), right=(x + half, y, z))
