"""Ergonomic optimization of bimanual robot-to-human handover positions.

A kinematically posed humanoid is scored with an exact REBA implementation
at every candidate handover point; tabular Q-learning searches the
discretized reachable volume for the best postural score, validated against
an exhaustive brute-force sweep and a shortest-distance baseline.
"""

from .skeleton import (
    Anthropometry,
    AnthropometryError,
    Landmarks,
    Pose,
    PoseError,
    forward_kinematics,
    load_anthropometry,
    neutral_pose,
)
from .reba import (
    RebaBreakdown,
    TaskAdjustments,
    band_legs,
    band_lower_arm,
    band_neck,
    band_trunk,
    band_upper_arm,
    band_wrist,
    score_pose,
    table_a,
    table_b,
    table_c,
)
from .ik import HandTargets, ReachSolution, ReachSolver, solve_reach, two_bone_ik
from .grid import Boundary, BoundaryError, BoxSpec
from .evaluator import PostureGrid
from .qlearn import (
    Hyperparams,
    QTable,
    RunRecord,
    adapt_temperature,
    apply_action,
    q_update,
    reward,
    softmax_probabilities,
    softmax_select,
    symmetry_score,
    train,
)
from .sweep import ConfigMismatchError, SweepReport, VerifyResult, sweep, verify_against
from .baseline import shortest_distance_target
from .config import ConfigError, ExperimentConfig, load_config

__version__ = "0.1.0"
