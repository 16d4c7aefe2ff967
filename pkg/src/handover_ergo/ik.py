"""Deterministic bimanual reach solver.

Given left/right hand target points in the body frame, produce a Pose that
puts both hands on the targets. Arms are solved in closed form; when the
targets exceed arms-only reach the solver recruits trunk flexion, then
lateral trunk angles (for off-center targets), then knee flexion (for
targets below hip height), searching fixed angle grids (1 deg trunk,
5 deg knee) for the smallest recruitment that brings both targets into
range.

Grip model: the carried object stays level, so each hand segment points
along the world forward axis as far as the wrist allows. The wrist flexes
in the elbow plane to compensate the forearm's tilt; whatever lateral
misalignment the flexion axis cannot absorb is reported as wrist
deviation. Laterally mirrored target pairs are solved by mirroring to a
canonical right-side problem and mirroring the pose back, so mirror
symmetry is exact to the last bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .skeleton import Anthropometry, Pose, trunk_rotation

REACH_TOL = 1e-3          # max per-hand residual for a solution to count as reachable
ELBOW_MAX_DEG = 160.0
WRIST_FLEX_MAX_DEG = 85.0
WRIST_DEVIATED_AT_DEG = 15.0
_LATERAL_EPS = 1e-9
_MIRROR = np.array([-1.0, 1.0, 1.0])
_LEVEL = np.array([0.0, 0.0, 1.0])    # carried boxes stay level: hands point forward
_GRIP_MAX_ITERS = 16

_TRUNK_FLEX_MAX = 90      # deg, 1-deg grid
_TRUNK_LAT_MAX = 45       # deg, 1-deg grid (twist or side bend)
_KNEE_MAX = 120           # deg, 5-deg grid
_KNEE_STEP = 5


@dataclass(frozen=True)
class HandTargets:
    """Hand target points (m) in the body-local frame."""

    left: tuple
    right: tuple

    def __post_init__(self):
        left = tuple(float(v) for v in self.left)
        right = tuple(float(v) for v in self.right)
        if len(left) != 3 or len(right) != 3:
            raise ValueError("hand targets must be 3D points")
        if not all(math.isfinite(v) for v in left + right):
            raise ValueError("hand targets must be finite")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    @property
    def midpoint_x(self) -> float:
        return 0.5 * (self.left[0] + self.right[0])

    def mirrored(self) -> "HandTargets":
        l, r = self.left, self.right
        return HandTargets(left=(-r[0], r[1], r[2]), right=(-l[0], l[1], l[2]))


@dataclass(frozen=True)
class ReachSolution:
    pose: Pose
    reachable: bool
    residual_l: float
    residual_r: float

    @property
    def max_residual(self) -> float:
        return max(self.residual_l, self.residual_r)

    def mirrored(self) -> "ReachSolution":
        return ReachSolution(self.pose.mirrored(), self.reachable,
                             self.residual_r, self.residual_l)


def _normalize_deg(a: float) -> float:
    while a > 180.0:
        a -= 360.0
    while a <= -180.0:
        a += 360.0
    return a


def _solve_arm_angles(t, upper: float, fore: float):
    """Angles (deg) placing a right arm's two-bone endpoint on local target t.

    The elbow angle comes from the law of cosines; of the two shoulder
    solutions the one with the lower elbow wins ("elbow points down").
    Caller guarantees |t| lies in the reachable annulus.
    """
    tx, ty, tz = float(t[0]), float(t[1]), float(t[2])
    d = math.sqrt(tx * tx + ty * ty + tz * tz)
    cos_e = (d * d - upper * upper - fore * fore) / (2.0 * upper * fore)
    e = math.acos(min(1.0, max(-1.0, cos_e)))
    wy = -(upper + fore * math.cos(e))
    wz = fore * math.sin(e)
    delta = math.atan2(-wy, wz)
    g = math.acos(min(1.0, max(-1.0, tz / d))) if d > 0.0 else 0.0
    rxy = math.hypot(tx, ty)

    best = None
    for sign_p, phi in ((-1.0, delta - g), (1.0, delta + g)):
        alpha = math.atan2(-tx * sign_p, ty * sign_p) if rxy > 1e-15 else 0.0
        elbow_y = -upper * math.cos(alpha) * math.cos(phi)
        cand = (elbow_y, abs(alpha), sign_p, phi, alpha)
        if best is None or cand[:3] < best[:3]:
            best = cand
    _, _, _, phi, alpha = best
    return _normalize_deg(math.degrees(phi)), math.degrees(alpha), math.degrees(e)


def _arm_rotation(flexion: float, abduction: float) -> np.ndarray:
    """Arm-local -> trunk-frame rotation for a right arm (degrees in)."""
    f = math.radians(flexion)
    a = math.radians(abduction)
    cf, sf = math.cos(f), math.sin(f)
    ca, sa = math.cos(a), math.sin(a)
    rx = np.array([[1.0, 0.0, 0.0], [0.0, cf, sf], [0.0, -sf, cf]])      # rot_x(-flexion)
    rz = np.array([[ca, -sa, 0.0], [sa, ca, 0.0], [0.0, 0.0, 1.0]])      # abduction toward +x
    return rz @ rx


def _arm_endpoint(flexion: float, abduction: float, elbow: float,
                  upper: float, fore: float) -> np.ndarray:
    """Two-bone wrist position in the trunk frame for a right arm (degrees in)."""
    e = math.radians(elbow)
    wy = -(upper + fore * math.cos(e))
    wz = fore * math.sin(e)
    f = math.radians(flexion)
    a = math.radians(abduction)
    p = wy * math.cos(f) + wz * math.sin(f)
    q = -wy * math.sin(f) + wz * math.cos(f)
    return np.array([-p * math.sin(a), p * math.cos(a), q])


def two_bone_ik(shoulder, target, upper: float, fore: float):
    """Analytic two-bone solve: angles placing the wrist of an (upper, fore)
    arm rooted at `shoulder` onto `target`, both in the trunk frame.

    Returns (shoulder_flexion, shoulder_abduction, elbow_flexion) in degrees,
    or None when the target lies outside the reachable annulus.
    """
    if not (upper > 0.0 and fore > 0.0):
        raise ValueError("bone lengths must be positive")
    t = np.asarray(target, dtype=float) - np.asarray(shoulder, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("target and shoulder must be finite")
    d = float(np.linalg.norm(t))
    if d < abs(upper - fore) or d > upper + fore:
        return None
    return _solve_arm_angles(t, upper, fore)


class _Regime:
    """One recruitment stage: a grid of (flexion, side, twist, knee) tuples
    with precomputed shoulder positions and a selection key encoding
    (knee, total trunk angle, twist, side) lexicographically."""

    __slots__ = ("fst", "sh_l", "sh_r", "key", "needs_lateral", "needs_low")

    def __init__(self, anthro: Anthropometry, flex, side, twist, knee,
                 needs_lateral: bool, needs_low: bool):
        f, s, t, k = np.broadcast_arrays(flex, side, twist, knee)
        f = f.ravel().astype(float)
        s = s.ravel().astype(float)
        t = t.ravel().astype(float)
        k = k.ravel().astype(float)
        self.fst = np.stack([f, s, t, k], axis=1)
        self.needs_lateral = needs_lateral
        self.needs_low = needs_low

        sf, cf = np.sin(np.radians(f)), np.cos(np.radians(f))
        ss, cs = np.sin(np.radians(s)), np.cos(np.radians(s))
        st, ct = np.sin(np.radians(t)), np.cos(np.radians(t))
        # columns 0 and 1 of trunk_rotation(f, s, t)
        col0 = np.stack([cs * ct, -cf * ss * ct + sf * st, -sf * ss * ct - cf * st], axis=1)
        col1 = np.stack([ss, cs * cf, cs * sf], axis=1)
        hip_y = anthro.knee_height + anthro.thigh * np.cos(np.radians(k))
        base = np.zeros((len(f), 3))
        base[:, 1] = hip_y
        neck_base = base + anthro.trunk * col1
        lat = 0.5 * anthro.shoulder_width * col0
        self.sh_r = neck_base + lat
        self.sh_l = neck_base - lat
        self.key = k * 1e8 + (f + s + t) * 1e4 + t * 100 + s


class ReachSolver:
    """Reusable reach solver for one body; precomputes recruitment tables."""

    def __init__(self, anthro: Anthropometry):
        self.anthro = anthro
        self.upper = anthro.upper_arm
        self.fore = anthro.forearm
        self.hand_len = anthro.hand
        self.d_max = self.upper + self.fore
        self.d_min = math.sqrt(
            self.upper ** 2 + self.fore ** 2
            + 2.0 * self.upper * self.fore * math.cos(math.radians(ELBOW_MAX_DEG))
        )
        flex = np.arange(0, _TRUNK_FLEX_MAX + 1)
        lat = np.arange(1, _TRUNK_LAT_MAX + 1)
        knee = np.arange(_KNEE_STEP, _KNEE_MAX + 1, _KNEE_STEP)
        f_t, t_f = np.meshgrid(flex, lat, indexing="ij")
        k_f, f_k = np.meshgrid(knee, flex, indexing="ij")
        k_e, f_e, t_e = np.meshgrid(knee, flex, lat, indexing="ij")
        self._regimes = [
            # arms only or sagittal trunk flexion
            _Regime(anthro, flex, 0, 0, 0, needs_lateral=False, needs_low=False),
            # trunk flexion + twist toward the targets
            _Regime(anthro, f_t, 0, t_f, 0, needs_lateral=True, needs_low=False),
            # trunk flexion + side bend toward the targets
            _Regime(anthro, f_t, t_f, 0, 0, needs_lateral=True, needs_low=False),
            # knee bend + trunk flexion for low targets
            _Regime(anthro, f_k, 0, 0, k_f, needs_lateral=False, needs_low=True),
            # knee bend + trunk flexion + twist for low lateral targets
            _Regime(anthro, f_e, 0, t_e, k_e, needs_lateral=True, needs_low=True),
        ]

    def solve(self, targets: HandTargets) -> ReachSolution:
        mx = targets.midpoint_x
        if mx < 0.0:
            return self.solve(targets.mirrored()).mirrored()

        tl = np.asarray(targets.left)
        tr = np.asarray(targets.right)
        # wrist sits about one hand length behind a level grip point
        wl = tl - self.hand_len * _LEVEL
        wr = tr - self.hand_len * _LEVEL
        lateral = mx > _LATERAL_EPS
        low = min(tl[1], tr[1]) < self.anthro.hip_height

        applicable = [r for r in self._regimes
                      if (lateral or not r.needs_lateral) and (low or not r.needs_low)]
        for regime in applicable:
            dl = np.linalg.norm(wl - regime.sh_l, axis=1)
            dr = np.linalg.norm(wr - regime.sh_r, axis=1)
            feasible = (dl >= self.d_min) & (dl <= self.d_max) \
                     & (dr >= self.d_min) & (dr <= self.d_max)
            if feasible.any():
                idx = int(np.where(feasible, regime.key, np.inf).argmin())
                return self._build(regime.fst[idx], tl, tr)

        # Nothing reaches: minimize the worse wrist's annulus shortfall.
        best = None
        for regime in applicable:
            dl = np.linalg.norm(wl - regime.sh_l, axis=1)
            dr = np.linalg.norm(wr - regime.sh_r, axis=1)
            rl = np.maximum(dl - self.d_max, 0.0) + np.maximum(self.d_min - dl, 0.0)
            rr = np.maximum(dr - self.d_max, 0.0) + np.maximum(self.d_min - dr, 0.0)
            resid = np.maximum(rl, rr)
            idx = int(np.lexsort((regime.key, resid))[0])
            cand = (float(resid[idx]), float(regime.key[idx]))
            if best is None or cand < best[0]:
                best = (cand, regime.fst[idx])
        return self._build(best[1], tl, tr)

    def _build(self, fstk, tl: np.ndarray, tr: np.ndarray) -> ReachSolution:
        f, s, t, k = (float(v) for v in fstk)
        r_trunk = trunk_rotation(f, s, t)
        hip = np.array([0.0, self.anthro.knee_height
                        + self.anthro.thigh * math.cos(math.radians(k)), 0.0])
        neck_base = hip + r_trunk @ np.array([0.0, self.anthro.trunk, 0.0])
        lat = r_trunk @ np.array([0.5 * self.anthro.shoulder_width, 0.0, 0.0])
        level_local = r_trunk.T @ _LEVEL
        loc_r = r_trunk.T @ (tr - (neck_base + lat))
        loc_l = _MIRROR * (r_trunk.T @ (tl - (neck_base - lat)))
        arm_r = self._hand(loc_r, level_local)
        arm_l = self._hand(loc_l, _MIRROR * level_local)
        pose = Pose(
            trunk_flexion=f, trunk_side=s, trunk_twist=t,
            shoulder_flexion_l=arm_l[0], shoulder_flexion_r=arm_r[0],
            shoulder_abduction_l=arm_l[1], shoulder_abduction_r=arm_r[1],
            elbow_flexion_l=arm_l[2], elbow_flexion_r=arm_r[2],
            wrist_flexion_l=arm_l[3], wrist_flexion_r=arm_r[3],
            wrist_deviation_l=arm_l[4], wrist_deviation_r=arm_r[4],
            knee_flexion=k,
        )
        res_l, res_r = arm_l[5], arm_r[5]
        reachable = max(res_l, res_r) <= REACH_TOL
        return ReachSolution(pose=pose, reachable=reachable,
                             residual_l=res_l, residual_r=res_r)

    def _hand(self, target: np.ndarray, level: np.ndarray):
        """Solve one arm (canonical right, trunk-local coordinates) so the
        hand point lands on `target` while the hand segment stays as close
        to `level` as the wrist flexion axis allows.

        Returns (flexion, abduction, elbow, wrist_flexion, deviated, residual).
        The wrist target and hand direction are iterated to a fixed point;
        when the target is outside the annulus the arm aims along the ray
        to the closest reachable wrist point.
        """
        u, f, h = self.upper, self.fore, self.hand_len
        hand_dir = level
        flex = abd = elbow = wrist = dev = 0.0
        sigma = 0.0
        prev_wt = None
        for _ in range(_GRIP_MAX_ITERS):
            wt = target - h * hand_dir
            if prev_wt is not None and float(np.linalg.norm(wt - prev_wt)) < 1e-12:
                break
            prev_wt = wt
            d = float(np.linalg.norm(wt))
            if self.d_min <= d <= self.d_max:
                aim = wt
            elif d < 1e-12:
                aim = np.array([0.0, -self.d_min, 0.0])
            else:
                aim = wt * (min(max(d, self.d_min), self.d_max) / d)
            flex, abd, elbow = _solve_arm_angles(aim, u, f)
            elbow = min(max(elbow, 0.0), ELBOW_MAX_DEG)

            r_arm = _arm_rotation(flex, abd)
            lev_loc = r_arm.T @ level
            dev = math.degrees(math.asin(min(1.0, abs(float(lev_loc[0])))))
            span = math.hypot(float(lev_loc[1]), float(lev_loc[2]))
            if span < 1e-9:
                sigma = elbow            # level grip impossible: keep wrist straight
            else:
                sigma = math.degrees(math.atan2(float(lev_loc[2]), -float(lev_loc[1])))
            wrist = _normalize_deg(sigma - elbow)
            wrist = min(max(wrist, -WRIST_FLEX_MAX_DEG), WRIST_FLEX_MAX_DEG)
            sigma = elbow + wrist
            sr = math.radians(sigma)
            hand_dir = r_arm @ np.array([0.0, -math.cos(sr), math.sin(sr)])

        achieved = _arm_endpoint(flex, abd, elbow, u, f) + h * hand_dir
        residual = float(np.linalg.norm(achieved - target))
        return flex, abd, elbow, wrist, dev >= WRIST_DEVIATED_AT_DEG, residual


@lru_cache(maxsize=8)
def get_solver(anthro: Anthropometry) -> ReachSolver:
    return ReachSolver(anthro)


def solve_reach(anthro: Anthropometry, targets: HandTargets) -> ReachSolution:
    """Deterministic staged reach solve (arms, then trunk, then knees)."""
    return get_solver(anthro).solve(targets)
