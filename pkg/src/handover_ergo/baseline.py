"""Ergonomically naive comparator: move the box to the nearest point of the
boundary, ignoring posture entirely."""

from __future__ import annotations

import math

from .grid import Boundary


def shortest_distance_target(start, boundary: Boundary) -> tuple[int, int, int]:
    """Euclidean projection of the start point onto the boundary box
    (per-axis clamp), snapped to the nearest grid cell. Starts already
    inside map to their own nearest cell."""
    x, y, z = (float(v) for v in start)
    if not all(math.isfinite(v) for v in (x, y, z)):
        raise ValueError(f"start point must be finite, got {start!r}")
    clamped = (
        min(max(x, boundary.x_min), boundary.x_max),
        min(max(y, boundary.y_min), boundary.y_max),
        min(max(z, boundary.z_min), boundary.z_max),
    )
    return boundary.snap(clamped)
