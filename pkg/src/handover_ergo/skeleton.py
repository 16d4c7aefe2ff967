"""Parametric humanoid model: anthropometry, joint-angle poses, forward kinematics.

Body-local frame: origin on the floor directly under the hip center,
x = lateral right, y = up, z = forward. All lengths in meters, angles in
degrees. 1 unit = 1 m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

# Segment lengths as fractions of standing height (classic body-segment
# ratios). hip + trunk + neck sum to 1.0 so the neutral head top sits at
# exactly `height`.
SEGMENT_RATIOS = {
    "shoulder_width": 0.259,
    "upper_arm": 0.186,
    "forearm": 0.146,
    "hand": 0.108,
    "trunk": 0.288,
    "neck": 0.182,
    "hip_height": 0.530,
    "knee_height": 0.285,
}

_MIRROR = np.array([-1.0, 1.0, 1.0])


class AnthropometryError(ValueError):
    pass


@dataclass(frozen=True)
class Anthropometry:
    """Body dimensions in meters. Fields left as None are derived from height."""

    height: float = 1.75
    shoulder_width: float | None = None
    upper_arm: float | None = None
    forearm: float | None = None
    hand: float | None = None
    trunk: float | None = None          # hip line to shoulder line
    neck: float | None = None           # shoulder line to head top
    hip_height: float | None = None
    knee_height: float | None = None

    def __post_init__(self):
        for name, ratio in SEGMENT_RATIOS.items():
            if getattr(self, name) is None:
                object.__setattr__(self, name, ratio * self.height)
        self._validate()

    def _validate(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise AnthropometryError(f"{f.name} must be a positive finite length, got {v!r}")
        if not (self.knee_height < self.hip_height < self.height):
            raise AnthropometryError(
                f"require knee_height < hip_height < height, got "
                f"{self.knee_height} / {self.hip_height} / {self.height}"
            )
        if self.upper_arm + self.forearm + self.hand >= self.height:
            raise AnthropometryError("arm chain longer than total height")

    @property
    def arm_reach(self) -> float:
        return self.upper_arm + self.forearm + self.hand

    @property
    def shoulder_height(self) -> float:
        return self.hip_height + self.trunk

    @property
    def thigh(self) -> float:
        return self.hip_height - self.knee_height


def load_anthropometry(path) -> Anthropometry:
    """Read a plain-text key-value file (`height = 1.80`, keys are field names).

    Missing keys fall back to the ratio defaults.
    """
    known = {f.name for f in fields(Anthropometry)}
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise AnthropometryError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in known:
                raise AnthropometryError(f"{path}:{lineno}: unknown anthropometry field {key!r}")
            try:
                values[key] = float(val)
            except ValueError:
                raise AnthropometryError(f"{path}:{lineno}: bad number {val!r} for {key}") from None
    return Anthropometry(**values)


class PoseError(ValueError):
    pass


@dataclass(frozen=True)
class Pose:
    """Joint angles in degrees. Neutral standing posture is all zeros.

    Sign conventions: trunk_flexion + is forward bend, trunk_side + leans
    right, trunk_twist + turns right, shoulder_flexion + raises the arm
    forward, shoulder_abduction + moves the arm away from the body.
    knee_flexion is the worse (max) of both legs.
    """

    trunk_flexion: float = 0.0
    trunk_side: float = 0.0
    trunk_twist: float = 0.0
    neck_flexion: float = 0.0
    neck_twist_or_side: bool = False
    shoulder_flexion_l: float = 0.0
    shoulder_flexion_r: float = 0.0
    shoulder_abduction_l: float = 0.0
    shoulder_abduction_r: float = 0.0
    elbow_flexion_l: float = 0.0
    elbow_flexion_r: float = 0.0
    wrist_flexion_l: float = 0.0
    wrist_flexion_r: float = 0.0
    wrist_deviation_l: bool = False
    wrist_deviation_r: bool = False
    knee_flexion: float = 0.0
    bilateral_support: bool = True

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if f.type.startswith("float") and not math.isfinite(v):
                raise PoseError(f"{f.name} must be finite, got {v!r}")
        if not 0.0 <= self.elbow_flexion_l <= 160.0 or not 0.0 <= self.elbow_flexion_r <= 160.0:
            raise PoseError("elbow flexion outside [0, 160] deg")
        if not 0.0 <= self.knee_flexion <= 150.0:
            raise PoseError("knee flexion outside [0, 150] deg")

    def mirrored(self) -> "Pose":
        """Left/right swapped pose; lateral trunk angles change sign."""
        return Pose(
            trunk_flexion=self.trunk_flexion,
            trunk_side=-self.trunk_side,
            trunk_twist=-self.trunk_twist,
            neck_flexion=self.neck_flexion,
            neck_twist_or_side=self.neck_twist_or_side,
            shoulder_flexion_l=self.shoulder_flexion_r,
            shoulder_flexion_r=self.shoulder_flexion_l,
            shoulder_abduction_l=self.shoulder_abduction_r,
            shoulder_abduction_r=self.shoulder_abduction_l,
            elbow_flexion_l=self.elbow_flexion_r,
            elbow_flexion_r=self.elbow_flexion_l,
            wrist_flexion_l=self.wrist_flexion_r,
            wrist_flexion_r=self.wrist_flexion_l,
            wrist_deviation_l=self.wrist_deviation_r,
            wrist_deviation_r=self.wrist_deviation_l,
            knee_flexion=self.knee_flexion,
            bilateral_support=self.bilateral_support,
        )


def neutral_pose() -> Pose:
    return Pose()


LANDMARK_NAMES = (
    "head_top", "neck_base",
    "shoulder_l", "shoulder_r",
    "elbow_l", "elbow_r",
    "wrist_l", "wrist_r",
    "hand_l", "hand_r",
    "hip_center", "knee_l", "knee_r",
)


@dataclass(frozen=True)
class Landmarks:
    """3D positions (m) of the posed skeleton in the body-local frame."""

    head_top: np.ndarray
    neck_base: np.ndarray
    shoulder_l: np.ndarray
    shoulder_r: np.ndarray
    elbow_l: np.ndarray
    elbow_r: np.ndarray
    wrist_l: np.ndarray
    wrist_r: np.ndarray
    hand_l: np.ndarray
    hand_r: np.ndarray
    hip_center: np.ndarray
    knee_l: np.ndarray
    knee_r: np.ndarray

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in LANDMARK_NAMES}

    def mirrored(self) -> "Landmarks":
        m = {name: getattr(self, name) * _MIRROR for name in LANDMARK_NAMES}
        for part in ("shoulder", "elbow", "wrist", "hand", "knee"):
            m[f"{part}_l"], m[f"{part}_r"] = m[f"{part}_r"], m[f"{part}_l"]
        return Landmarks(**m)


def _signed_sincos(deg: float) -> tuple[float, float]:
    # sin odd / cos even by construction, so mirrored poses are bit-exact mirrors
    r = math.radians(abs(deg))
    return math.copysign(math.sin(r), deg), math.cos(r)


def _rot_x(deg: float) -> np.ndarray:
    r = math.radians(deg)
    c, s = math.cos(r), math.sin(r)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def trunk_rotation(flexion: float, side: float, twist: float) -> np.ndarray:
    """Rotation taking trunk-local axes to body axes: flexion about x after
    side lean about z after twist about y."""
    sf, cf = _signed_sincos(flexion)
    ss, cs = _signed_sincos(side)
    st, ct = _signed_sincos(twist)
    rx = np.array([[1.0, 0.0, 0.0], [0.0, cf, -sf], [0.0, sf, cf]])
    rz = np.array([[cs, ss, 0.0], [-ss, cs, 0.0], [0.0, 0.0, 1.0]])
    ry = np.array([[ct, 0.0, st], [0.0, 1.0, 0.0], [-st, 0.0, ct]])
    return rx @ rz @ ry


def arm_chain_local(upper: float, fore: float, hand: float,
                    flexion: float, abduction: float,
                    elbow: float, wrist: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Elbow/wrist/hand offsets from the shoulder, in the trunk frame, for a
    right arm. The elbow bend axis is the body-lateral axis carried through
    the shoulder rotation, so flexing the elbow raises the forearm forward
    from a hanging arm ("elbow points down").
    """
    te = math.radians(elbow)
    tw = math.radians(elbow + wrist)
    elbow0 = np.array([0.0, -upper, 0.0])
    wrist0 = elbow0 + fore * np.array([0.0, -math.cos(te), math.sin(te)])
    hand0 = wrist0 + hand * np.array([0.0, -math.cos(tw), math.sin(tw)])

    sf, cf = _signed_sincos(flexion)
    sa, ca = _signed_sincos(abduction)
    rx = np.array([[1.0, 0.0, 0.0], [0.0, cf, sf], [0.0, -sf, cf]])      # rot_x(-flexion)
    rz = np.array([[ca, -sa, 0.0], [sa, ca, 0.0], [0.0, 0.0, 1.0]])      # abduction toward +x
    r = rz @ rx
    return r @ elbow0, r @ wrist0, r @ hand0


def forward_kinematics(anthro: Anthropometry, pose: Pose) -> Landmarks:
    """Deterministic FK of the full pose. Left-side chains are exact mirror
    images of a right-arm chain, so mirrored poses yield mirrored landmarks
    bit for bit."""
    k = math.radians(pose.knee_flexion)
    hip_y = anthro.knee_height + anthro.thigh * math.cos(k)
    hip = np.array([0.0, hip_y, 0.0])

    r_trunk = trunk_rotation(pose.trunk_flexion, pose.trunk_side, pose.trunk_twist)
    neck_base = hip + r_trunk @ np.array([0.0, anthro.trunk, 0.0])
    half = 0.5 * anthro.shoulder_width
    lat = r_trunk @ np.array([half, 0.0, 0.0])
    shoulder_r = neck_base + lat
    shoulder_l = neck_base - lat
    head_top = neck_base + r_trunk @ (_rot_x(pose.neck_flexion) @ np.array([0.0, anthro.neck, 0.0]))

    er, wr, hr = arm_chain_local(anthro.upper_arm, anthro.forearm, anthro.hand,
                                 pose.shoulder_flexion_r, pose.shoulder_abduction_r,
                                 pose.elbow_flexion_r, pose.wrist_flexion_r)
    el, wl, hl = arm_chain_local(anthro.upper_arm, anthro.forearm, anthro.hand,
                                 pose.shoulder_flexion_l, pose.shoulder_abduction_l,
                                 pose.elbow_flexion_l, pose.wrist_flexion_l)
    el, wl, hl = el * _MIRROR, wl * _MIRROR, hl * _MIRROR

    knee_dz = 0.5 * anthro.thigh * math.sin(k)
    knee_x = 0.25 * anthro.shoulder_width
    return Landmarks(
        head_top=head_top,
        neck_base=neck_base,
        shoulder_l=shoulder_l,
        shoulder_r=shoulder_r,
        elbow_l=shoulder_l + r_trunk @ el,
        elbow_r=shoulder_r + r_trunk @ er,
        wrist_l=shoulder_l + r_trunk @ wl,
        wrist_r=shoulder_r + r_trunk @ wr,
        hand_l=shoulder_l + r_trunk @ hl,
        hand_r=shoulder_r + r_trunk @ hr,
        hip_center=hip,
        knee_l=np.array([-knee_x, anthro.knee_height, knee_dz]),
        knee_r=np.array([knee_x, anthro.knee_height, knee_dz]),
    )
