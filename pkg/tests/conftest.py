import random

import pytest

from handover_ergo.skeleton import Anthropometry, Pose


@pytest.fixture(scope="session")
def anthro() -> Anthropometry:
    return Anthropometry()


def make_random_pose(rng: random.Random) -> Pose:
    return Pose(
        trunk_flexion=rng.uniform(-30.0, 90.0),
        trunk_side=rng.uniform(-40.0, 40.0),
        trunk_twist=rng.uniform(-45.0, 45.0),
        neck_flexion=rng.uniform(-20.0, 45.0),
        neck_twist_or_side=rng.random() < 0.3,
        shoulder_flexion_l=rng.uniform(-60.0, 180.0),
        shoulder_flexion_r=rng.uniform(-60.0, 180.0),
        shoulder_abduction_l=rng.uniform(-90.0, 90.0),
        shoulder_abduction_r=rng.uniform(-90.0, 90.0),
        elbow_flexion_l=rng.uniform(0.0, 160.0),
        elbow_flexion_r=rng.uniform(0.0, 160.0),
        wrist_flexion_l=rng.uniform(-85.0, 85.0),
        wrist_flexion_r=rng.uniform(-85.0, 85.0),
        wrist_deviation_l=rng.random() < 0.3,
        wrist_deviation_r=rng.random() < 0.3,
        knee_flexion=rng.uniform(0.0, 150.0),
        bilateral_support=rng.random() < 0.8,
    )
