"""Exact REBA scoring from joint angles.

Banding follows the standard published REBA worksheet. Band boundaries are
half-open and lower-inclusive: an angle exactly on a boundary scores the
higher band (e.g. trunk flexion of exactly 20 deg scores 3). Besides the
final 1-15 REBA value this module reports the granular postural score,
the plain sum of Score A and Score B, which distinguishes postures that
Table C collapses onto the same value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from .skeleton import Pose

# Upper-arm abduction angle at which the worksheet's "+1 abducted" applies.
ABDUCTED_AT_DEG = 45.0

# Table A: neck (1-3) x trunk (1-5) x legs (1-4)
TABLE_A = np.array([
    [[1, 2, 3, 4], [2, 3, 4, 5], [2, 4, 5, 6], [3, 5, 6, 7], [4, 6, 7, 8]],
    [[1, 2, 3, 4], [3, 4, 5, 6], [4, 5, 6, 7], [5, 6, 7, 8], [6, 7, 8, 9]],
    [[3, 3, 5, 6], [4, 5, 6, 7], [5, 6, 7, 8], [6, 7, 8, 9], [7, 8, 9, 9]],
], dtype=int)

# Table B: upper arm (1-6) x lower arm (1-2) x wrist (1-3)
TABLE_B = np.array([
    [[1, 2, 2], [1, 2, 3]],
    [[1, 2, 3], [2, 3, 4]],
    [[3, 4, 5], [4, 5, 5]],
    [[4, 5, 5], [5, 6, 7]],
    [[6, 7, 8], [7, 8, 8]],
    [[7, 8, 8], [8, 9, 9]],
], dtype=int)

# Table C: score A (1-12) x score B (1-12)
TABLE_C = np.array([
    [1, 1, 1, 2, 3, 3, 4, 5, 6, 7, 7, 7],
    [1, 2, 2, 3, 4, 4, 5, 6, 6, 7, 7, 8],
    [2, 3, 3, 3, 4, 5, 6, 7, 7, 8, 8, 8],
    [3, 4, 4, 4, 5, 6, 7, 8, 8, 9, 9, 9],
    [4, 4, 4, 5, 6, 7, 8, 8, 9, 9, 9, 9],
    [6, 6, 6, 7, 8, 8, 9, 9, 10, 10, 10, 10],
    [7, 7, 7, 8, 9, 9, 9, 10, 10, 11, 11, 11],
    [8, 8, 8, 9, 10, 10, 10, 10, 10, 11, 11, 11],
    [9, 9, 9, 10, 10, 10, 11, 11, 11, 12, 12, 12],
    [10, 10, 10, 11, 11, 11, 11, 12, 12, 12, 12, 12],
    [11, 11, 11, 11, 12, 12, 12, 12, 12, 12, 12, 12],
    [12, 12, 12, 12, 12, 12, 12, 12, 12, 12, 12, 12],
], dtype=int)


class RebaRangeError(ValueError):
    pass


def _check_range(name: str, value: int, lo: int, hi: int) -> int:
    if not (isinstance(value, (int, np.integer)) and lo <= value <= hi):
        raise RebaRangeError(f"{name} must be an integer in [{lo}, {hi}], got {value!r}")
    return int(value)


def _check_finite(name: str, angle: float) -> float:
    if not math.isfinite(angle):
        raise RebaRangeError(f"{name} must be finite, got {angle!r}")
    return float(angle)


@dataclass(frozen=True)
class TaskAdjustments:
    """Worksheet load/coupling/activity add-ons (each 0..3, default all 0)."""

    load_score: int = 0
    coupling_score: int = 0
    activity_score: int = 0

    def __post_init__(self):
        for name in ("load_score", "coupling_score", "activity_score"):
            _check_range(name, getattr(self, name), 0, 3)


def band_trunk(flexion: float, twisted_or_side: bool) -> int:
    """Trunk score 1-5: upright 1, then by flexion/extension bands, +1 twist/side."""
    f = _check_finite("trunk flexion", flexion)
    if f == 0.0:
        score = 1
    elif -20.0 < f < 20.0:
        score = 2
    elif 20.0 <= f < 60.0 or f <= -20.0:
        score = 3
    else:
        score = 4
    if twisted_or_side:
        score += 1
    return min(score, 5)


def band_neck(flexion: float, twisted_or_side: bool) -> int:
    """Neck score 1-3: 1 for [0, 20) flexion, 2 beyond or in extension."""
    f = _check_finite("neck flexion", flexion)
    score = 1 if 0.0 <= f < 20.0 else 2
    if twisted_or_side:
        score += 1
    return min(score, 3)


def band_legs(bilateral_support: bool, knee_flexion: float) -> int:
    """Leg score 1-4: bilateral support 1 else 2, +1 knees [30, 60), +2 beyond."""
    k = _check_finite("knee flexion", knee_flexion)
    score = 1 if bilateral_support else 2
    if 30.0 <= k < 60.0:
        score += 1
    elif k >= 60.0:
        score += 2
    return min(score, 4)


def band_upper_arm(flexion: float, abducted: bool = False,
                   raised: bool = False, supported: bool = False) -> int:
    """Upper-arm score 1-6 from shoulder flexion/extension plus adjustments."""
    f = _check_finite("shoulder flexion", flexion)
    if -20.0 < f < 20.0:
        score = 1
    elif 20.0 <= f < 45.0 or f <= -20.0:
        score = 2
    elif 45.0 <= f < 90.0:
        score = 3
    else:
        score = 4
    if raised:
        score += 1
    if abducted:
        score += 1
    if supported:
        score -= 1
    return max(1, min(score, 6))


def band_lower_arm(elbow_flexion: float) -> int:
    """Lower-arm score: 1 in the [60, 100) elbow band, 2 outside it."""
    e = _check_finite("elbow flexion", elbow_flexion)
    return 1 if 60.0 <= e < 100.0 else 2


def band_wrist(flexion: float, deviated_or_twisted: bool) -> int:
    """Wrist score 1-3: 1 within 15 deg of neutral, 2 beyond, +1 deviation/twist."""
    f = _check_finite("wrist flexion", flexion)
    score = 1 if abs(f) < 15.0 else 2
    if deviated_or_twisted:
        score += 1
    return min(score, 3)


def table_a(neck: int, trunk: int, legs: int) -> int:
    return int(TABLE_A[_check_range("neck", neck, 1, 3) - 1,
                       _check_range("trunk", trunk, 1, 5) - 1,
                       _check_range("legs", legs, 1, 4) - 1])


def table_b(upper: int, lower: int, wrist: int) -> int:
    return int(TABLE_B[_check_range("upper arm", upper, 1, 6) - 1,
                       _check_range("lower arm", lower, 1, 2) - 1,
                       _check_range("wrist", wrist, 1, 3) - 1])


def table_c(score_a: int, score_b: int) -> int:
    return int(TABLE_C[_check_range("score A", score_a, 1, 12) - 1,
                       _check_range("score B", score_b, 1, 12) - 1])


@dataclass(frozen=True)
class RebaBreakdown:
    """Every intermediate of one REBA evaluation, plus the postural score."""

    trunk: int
    neck: int
    legs: int
    upper_arm_l: int
    upper_arm_r: int
    lower_arm_l: int
    lower_arm_r: int
    wrist_l: int
    wrist_r: int
    table_a: int
    table_b_l: int
    table_b_r: int
    score_a: int
    score_b: int
    table_c: int
    activity: int
    final_reba: int
    postural: int

    def as_dict(self) -> dict:
        return asdict(self)


def score_pose(pose: Pose, adjustments: TaskAdjustments = TaskAdjustments()) -> RebaBreakdown:
    """Band a full pose and run it through Tables A, B and C.

    Score B takes the worse (max) arm. Trunk counts as twisted/side-bent
    whenever either lateral trunk angle is nonzero.
    """
    trunk = band_trunk(pose.trunk_flexion, pose.trunk_twist != 0.0 or pose.trunk_side != 0.0)
    neck = band_neck(pose.neck_flexion, pose.neck_twist_or_side)
    legs = band_legs(pose.bilateral_support, pose.knee_flexion)
    ta = table_a(neck, trunk, legs)
    score_a = ta + adjustments.load_score

    up_l = band_upper_arm(pose.shoulder_flexion_l, abducted=abs(pose.shoulder_abduction_l) >= ABDUCTED_AT_DEG)
    up_r = band_upper_arm(pose.shoulder_flexion_r, abducted=abs(pose.shoulder_abduction_r) >= ABDUCTED_AT_DEG)
    lo_l = band_lower_arm(pose.elbow_flexion_l)
    lo_r = band_lower_arm(pose.elbow_flexion_r)
    wr_l = band_wrist(pose.wrist_flexion_l, pose.wrist_deviation_l)
    wr_r = band_wrist(pose.wrist_flexion_r, pose.wrist_deviation_r)
    tb_l = table_b(up_l, lo_l, wr_l)
    tb_r = table_b(up_r, lo_r, wr_r)
    score_b = max(tb_l, tb_r) + adjustments.coupling_score

    tc = table_c(score_a, score_b)
    return RebaBreakdown(
        trunk=trunk, neck=neck, legs=legs,
        upper_arm_l=up_l, upper_arm_r=up_r,
        lower_arm_l=lo_l, lower_arm_r=lo_r,
        wrist_l=wr_l, wrist_r=wr_r,
        table_a=ta, table_b_l=tb_l, table_b_r=tb_r,
        score_a=score_a, score_b=score_b,
        table_c=tc, activity=adjustments.activity_score,
        final_reba=tc + adjustments.activity_score,
        postural=score_a + score_b,
    )
