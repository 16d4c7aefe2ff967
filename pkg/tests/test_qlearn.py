import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from handover_ergo.evaluator import PostureGrid
from handover_ergo.grid import Boundary, BoxSpec
from handover_ergo.ik import HandTargets
from handover_ergo.qlearn import (
    TAU_MIN,
    Hyperparams,
    HyperparamError,
    QTable,
    adapt_temperature,
    apply_action,
    q_update,
    reward,
    softmax_probabilities,
    softmax_select,
    symmetry_score,
    train,
)
from handover_ergo.reba import TaskAdjustments


@pytest.fixture(scope="module")
def tiny_boundary():
    # a 5x5x5 patch in front of the chest
    return Boundary(x_min=-0.05, x_max=0.05, y_min=0.95, y_max=1.05,
                    z_min=0.30, z_max=0.40, step=0.025)


@pytest.fixture(scope="module")
def big_boundary(anthro):
    return Boundary.from_anthro(anthro, step=0.05)


def test_action_deltas_move_one_axis(anthro):
    boundary = Boundary.from_anthro(anthro, step=0.03)    # 16x42x26 cells
    assert apply_action((10, 10, 10), 0, boundary) == (11, 10, 10)
    assert apply_action((10, 10, 10), 1, boundary) == (9, 10, 10)
    assert apply_action((10, 10, 10), 2, boundary) == (10, 11, 10)
    assert apply_action((10, 10, 10), 3, boundary) == (10, 9, 10)
    assert apply_action((10, 10, 10), 4, boundary) == (10, 10, 11)
    assert apply_action((10, 10, 10), 5, boundary) == (10, 10, 9)


def test_actions_clamp_at_walls(tiny_boundary):
    assert tiny_boundary.shape == (5, 5, 5)
    assert apply_action((4, 2, 2), 0, tiny_boundary) == (4, 2, 2)
    assert apply_action((0, 2, 2), 1, tiny_boundary) == (0, 2, 2)
    assert apply_action((2, 4, 2), 2, tiny_boundary) == (2, 4, 2)
    assert apply_action((2, 2, 0), 5, tiny_boundary) == (2, 2, 0)


def test_softmax_uniform_on_equal_values():
    probs = softmax_probabilities([0.3] * 6, tau=1.0)
    assert all(p == pytest.approx(1 / 6) for p in probs)


def test_softmax_single_raised_value():
    probs = softmax_probabilities([1, 0, 0, 0, 0, 0], tau=1.0)
    assert probs[0] == pytest.approx(math.e / (math.e + 5), abs=1e-12)
    for p in probs[1:]:
        assert p == pytest.approx(1 / (math.e + 5), abs=1e-12)


def test_softmax_cold_limit_is_argmax():
    probs = softmax_probabilities([0.2, 0.9, 0.1, 0.5, 0.0, 0.3], tau=1e-9)
    assert probs[1] == pytest.approx(1.0)
    rng = random.Random(0)
    picks = {softmax_select([0.2, 0.9, 0.1, 0.5, 0.0, 0.3], 1e-9, rng) for _ in range(100)}
    assert picks == {1}


def test_softmax_rejects_non_positive_tau():
    with pytest.raises(ValueError):
        softmax_probabilities([0.0] * 6, tau=0.0)


@settings(max_examples=200)
@given(st.lists(st.floats(-50, 50), min_size=6, max_size=6),
       st.floats(0.05, 10.0))
def test_softmax_probabilities_sum_to_one(qvalues, tau):
    probs = softmax_probabilities(qvalues, tau)
    assert abs(sum(probs) - 1.0) < 1e-12
    assert all(p >= 0.0 for p in probs)


def test_symmetry_score_examples(anthro):
    half = anthro.shoulder_width / 2
    centered = HandTargets((-0.2, 1.0, 0.4), (0.2, 1.0, 0.4))
    assert symmetry_score(centered, 0.0, half) == 0.0
    offset = HandTargets((half - 0.2, 1.0, 0.4), (half + 0.2, 1.0, 0.4))
    assert symmetry_score(offset, 0.0, half) == pytest.approx(-1.0)
    values = [symmetry_score(HandTargets((dx - 0.2, 1, 0.4), (dx + 0.2, 1, 0.4)), 0.0, half)
              for dx in (0.0, 0.05, 0.1, 0.2)]
    assert values == sorted(values, reverse=True)
    assert len(set(values)) == len(values)


def test_reward_examples():
    assert reward(4, 0.0) == pytest.approx(0.0625)
    assert reward(7, 0.0) == pytest.approx(1 / 49)
    assert reward(4, 0.0) > reward(7, 0.0)
    assert reward(4, -0.5, weight=2.0) == pytest.approx(0.0625 - 1.0)
    with pytest.raises(ValueError):
        reward(1, 0.0)


def test_q_update_hand_example():
    qt = QTable()
    q_update(qt, (0, 0, 0), 2, 1.0, (0, 1, 0), alpha=0.5, gamma=0.9)
    assert qt.values((0, 0, 0))[2] == pytest.approx(0.5)


def test_q_update_degenerate_rates():
    qt = QTable()
    qt.entry((1, 1, 1))[0] = 0.7
    q_update(qt, (1, 1, 1), 0, 5.0, (1, 1, 2), alpha=1.0, gamma=0.0)
    assert qt.values((1, 1, 1))[0] == 5.0

    before = qt.values((1, 1, 1))[0]
    # alpha=0 is rejected by Hyperparams, but the kernel itself is total
    q_update(qt, (1, 1, 1), 0, -3.0, (1, 1, 2), alpha=0.0, gamma=0.9)
    assert qt.values((1, 1, 1))[0] == before


@settings(max_examples=200)
@given(st.floats(-10, 10), st.floats(0.01, 1.0), st.floats(0.0, 0.99),
       st.floats(-5, 5))
def test_q_update_fixed_point(r, alpha, gamma, next_best):
    qt = QTable()
    qt.entry((5, 5, 5))[3] = next_best
    target = r + gamma * max(qt.values((5, 5, 5)))
    qt.entry((0, 0, 0))[1] = target
    q_update(qt, (0, 0, 0), 1, r, (5, 5, 5), alpha, gamma)
    assert qt.values((0, 0, 0))[1] == pytest.approx(target, abs=1e-12)


def test_unvisited_states_are_zero():
    qt = QTable()
    assert qt.values((9, 9, 9)) == [0.0] * 6
    assert qt.max_value((9, 9, 9)) == 0.0
    assert len(qt) == 0


def test_adapt_temperature_rule():
    assert adapt_temperature(1.0, 5, 4) == pytest.approx(0.9)
    assert adapt_temperature(1.0, 4, 6) == pytest.approx(1.1)
    assert adapt_temperature(1.0, 6, 6) == 1.0
    # improvement that stays at/above the threshold does not cool
    assert adapt_temperature(1.0, 9, 7) == 1.0
    assert adapt_temperature(1.0, 9, 5) == 1.0
    assert adapt_temperature(1.0, 6, 4) == pytest.approx(0.9)


def test_adapt_temperature_bounds():
    assert adapt_temperature(TAU_MIN, 5, 2) == TAU_MIN
    assert adapt_temperature(2.0, 2, 9, tau_max=2.0) == 2.0
    t = 0.1
    for _ in range(10):
        t = adapt_temperature(t, 5, 3)
    assert t == pytest.approx(TAU_MIN)


@pytest.mark.parametrize("kwargs", [
    dict(alpha=0.0), dict(alpha=1.5), dict(gamma=1.0), dict(gamma=-0.1),
    dict(tau0=0.0), dict(tau_step=0.0),
    dict(budget_steps=None, budget_seconds=None),
    dict(budget_steps=100, budget_seconds=10.0),
    dict(budget_steps=0), dict(budget_seconds=-1.0),
    dict(restart_every=-1),
])
def test_hyperparam_validation(kwargs):
    base = dict(budget_steps=100)
    base.update(kwargs)
    with pytest.raises(HyperparamError):
        Hyperparams(**base)


class _SpyGrid(PostureGrid):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.visited = []

    def postural(self, cell):
        self.visited.append(tuple(cell))
        return super().postural(cell)


def test_train_matches_brute_force_on_tiny_grid(anthro, tiny_boundary):
    box = BoxSpec(0.4)
    adj = TaskAdjustments()
    grid = PostureGrid(anthro, tiny_boundary, box, adj)
    nx, ny, nz = tiny_boundary.shape
    true_min = min(grid.postural((i, j, k))
                   for i in range(nx) for j in range(ny) for k in range(nz))
    hyper = Hyperparams(budget_steps=10_000)
    record = train(anthro, tiny_boundary, box, hyper, seed=1, evaluator=grid)
    assert record.best_postural == true_min
    assert record.steps == 10_000
    assert grid.postural(record.best_cell) == true_min


def test_train_is_deterministic(anthro, tiny_boundary):
    hyper = Hyperparams(budget_steps=3000)
    r1 = train(anthro, tiny_boundary, BoxSpec(0.4), hyper, seed=42)
    r2 = train(anthro, tiny_boundary, BoxSpec(0.4), hyper, seed=42)
    assert r1 == r2
    r3 = train(anthro, tiny_boundary, BoxSpec(0.4), hyper, seed=43)
    assert r3.to_json_dict() != r1.to_json_dict()


def test_walk_stays_inside_boundary(anthro, tiny_boundary):
    spy = _SpyGrid(anthro, tiny_boundary, BoxSpec(0.4), TaskAdjustments())
    train(anthro, tiny_boundary, BoxSpec(0.4), Hyperparams(budget_steps=5000),
          seed=3, evaluator=spy)
    assert spy.visited
    assert all(tiny_boundary.contains_cell(c) for c in spy.visited)


def test_best_trace_is_strictly_improving(anthro, big_boundary):
    record = train(anthro, big_boundary, BoxSpec(0.4),
                   Hyperparams(budget_steps=20_000), seed=7)
    scores = [s for _, s in record.score_trace]
    assert all(a > b for a, b in zip(scores, scores[1:]))
    assert record.best_postural == scores[-1] == min(scores)
    steps = [s for s, _ in record.score_trace]
    assert steps == sorted(steps)
    assert len(record.tau_trace) == len(record.score_trace)


def test_stop_at_score_halts_early(anthro, big_boundary):
    hyper = Hyperparams(budget_steps=200_000, stop_at_score=3)
    record = train(anthro, big_boundary, BoxSpec(0.4), hyper, seed=11)
    assert record.best_postural <= 3
    assert record.steps < 200_000


def test_restart_option_stays_valid(anthro, tiny_boundary):
    hyper = Hyperparams(budget_steps=2000, restart_every=100)
    record = train(anthro, tiny_boundary, BoxSpec(0.4), hyper, seed=5)
    assert tiny_boundary.contains_cell(record.best_cell)


def test_train_rejects_bad_start(anthro, tiny_boundary):
    with pytest.raises(ValueError):
        train(anthro, tiny_boundary, BoxSpec(0.4), Hyperparams(budget_steps=10),
              seed=0, start_cell=(99, 0, 0))


def test_run_record_json_round_trip(anthro, tiny_boundary):
    record = train(anthro, tiny_boundary, BoxSpec(0.4),
                   Hyperparams(budget_steps=500), seed=9)
    from handover_ergo.qlearn import RunRecord
    clone = RunRecord.from_json_dict(record.to_json_dict())
    assert clone == record
