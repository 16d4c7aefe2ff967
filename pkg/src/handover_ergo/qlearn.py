"""Tabular Q-learning over the handover grid.

Boltzmann (softmax) action selection with a step-wise adaptive temperature,
an inverse-quadratic ergonomic reward plus a lateral-symmetry bonus, and a
budgeted continuing walk that reports the best posture score it ever saw.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field

from .skeleton import Anthropometry
from .reba import TaskAdjustments
from .ik import HandTargets
from .grid import Boundary, BoxSpec
from .evaluator import PostureGrid

N_ACTIONS = 6
# action k moves one grid cell: +x, -x, +y, -y, +z, -z
ACTION_DELTAS = ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1))

TAU_MIN = 0.05


class HyperparamError(ValueError):
    pass


@dataclass(frozen=True)
class Hyperparams:
    alpha: float = 0.1                 # learning rate
    gamma: float = 0.9                 # discount
    tau0: float = 1.0                  # initial softmax temperature
    tau_step: float = 0.1              # temperature adaptation increment
    score_threshold: int = 5           # cool only when the score improves below this
    budget_steps: int | None = None
    budget_seconds: float | None = None
    symmetry_weight: float = 1.0
    stop_at_score: int | None = None   # optional early exit once this postural score is reached
    restart_every: int = 0             # 0 = single continuing walk

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise HyperparamError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0.0 <= self.gamma < 1.0:
            raise HyperparamError(f"gamma must be in [0, 1), got {self.gamma}")
        if self.tau0 <= 0.0:
            raise HyperparamError(f"tau0 must be positive, got {self.tau0}")
        if self.tau_step <= 0.0:
            raise HyperparamError(f"tau_step must be positive, got {self.tau_step}")
        if (self.budget_steps is None) == (self.budget_seconds is None):
            raise HyperparamError("set exactly one of budget_steps / budget_seconds")
        if self.budget_steps is not None and self.budget_steps < 1:
            raise HyperparamError("budget_steps must be >= 1")
        if self.budget_seconds is not None and self.budget_seconds <= 0:
            raise HyperparamError("budget_seconds must be positive")
        if self.restart_every < 0:
            raise HyperparamError("restart_every must be >= 0")


class QTable:
    """Sparse state -> 6 action values; unvisited states are implicitly zero."""

    def __init__(self):
        self._q: dict[tuple[int, int, int], list[float]] = {}

    def values(self, state) -> list[float]:
        v = self._q.get(state)
        return v if v is not None else [0.0] * N_ACTIONS

    def entry(self, state) -> list[float]:
        v = self._q.get(state)
        if v is None:
            v = [0.0] * N_ACTIONS
            self._q[state] = v
        return v

    def max_value(self, state) -> float:
        v = self._q.get(state)
        return max(v) if v is not None else 0.0

    def __len__(self) -> int:
        return len(self._q)


def apply_action(state, action: int, boundary: Boundary):
    """Move one cell along one axis; moves that would leave the boundary
    keep the state unchanged."""
    di, dj, dk = ACTION_DELTAS[action]
    new = (state[0] + di, state[1] + dj, state[2] + dk)
    return new if boundary.contains_cell(new) else state


def softmax_probabilities(qvalues, tau: float) -> list[float]:
    """Boltzmann distribution over actions, max-shifted for stability."""
    if tau <= 0.0:
        raise ValueError(f"temperature must be positive, got {tau}")
    m = max(qvalues)
    ws = [math.exp((q - m) / tau) for q in qvalues]
    total = sum(ws)
    return [w / total for w in ws]


def softmax_select(qvalues, tau: float, rng: random.Random) -> int:
    probs = softmax_probabilities(qvalues, tau)
    r = rng.random()
    acc = 0.0
    for i, p in enumerate(probs):
        acc += p
        if r < acc:
            return i
    return len(probs) - 1


def symmetry_score(targets: HandTargets, body_center_x: float, half_width: float) -> float:
    """0 when the box midpoint is centered on the body, decreasing linearly
    with lateral offset; -1 at half a shoulder width of offset."""
    return -abs(targets.midpoint_x - body_center_x) / half_width


def reward(postural: int, symmetry: float, weight: float = 1.0) -> float:
    """Inverse-quadratic ergonomic term plus weighted symmetry bonus."""
    if postural < 2:
        raise ValueError(f"postural score is at least 2, got {postural}")
    return 1.0 / (postural * postural) + weight * symmetry


def q_update(qtable: QTable, state, action: int, r: float, next_state,
             alpha: float, gamma: float) -> None:
    entry = qtable.entry(state)
    entry[action] = (1.0 - alpha) * entry[action] + alpha * (r + gamma * qtable.max_value(next_state))


def adapt_temperature(tau: float, prev_postural: int, new_postural: int,
                      threshold: int = 5, step: float = 0.1,
                      tau_min: float = TAU_MIN, tau_max: float = 2.0) -> float:
    """Cool when the score improves past the threshold, heat when it worsens."""
    if new_postural < prev_postural and new_postural < threshold:
        return max(tau - step, tau_min)
    if new_postural > prev_postural:
        return min(tau + step, tau_max)
    return tau


@dataclass(frozen=True)
class RunRecord:
    """Outcome of one training run. score_trace holds the new-best events
    (step, postural), so best_postural is its minimum; tau_trace holds the
    temperature at those same steps."""

    seed: int
    config_hash: str
    best_postural: int
    best_cell: tuple[int, int, int]
    best_position: tuple[float, float, float]
    steps: int
    score_trace: tuple = field(default_factory=tuple)
    tau_trace: tuple = field(default_factory=tuple)

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "run_record",
            "seed": self.seed,
            "config_hash": self.config_hash,
            "best_postural": self.best_postural,
            "best_cell": list(self.best_cell),
            "best_position": list(self.best_position),
            "steps": self.steps,
            "score_trace": [list(e) for e in self.score_trace],
            "tau_trace": [list(e) for e in self.tau_trace],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "RunRecord":
        return cls(
            seed=d["seed"],
            config_hash=d["config_hash"],
            best_postural=d["best_postural"],
            best_cell=tuple(d["best_cell"]),
            best_position=tuple(d["best_position"]),
            steps=d["steps"],
            score_trace=tuple(tuple(e) for e in d["score_trace"]),
            tau_trace=tuple(tuple(e) for e in d["tau_trace"]),
        )


def train(anthro: Anthropometry, boundary: Boundary, box: BoxSpec,
          hyper: Hyperparams, seed: int,
          adjustments: TaskAdjustments = TaskAdjustments(),
          evaluator: PostureGrid | None = None,
          start_cell=None) -> RunRecord:
    """One budgeted Q-learning walk over the grid.

    Each step: softmax action -> move -> solve reach -> posture score ->
    reward -> Q update -> temperature adaptation. The walk is continuing
    (no terminal state); it stops at the step/time budget or, optionally,
    as soon as stop_at_score is reached.
    """
    if evaluator is None:
        evaluator = PostureGrid(anthro, boundary, box, adjustments)
    rng = random.Random(seed)
    qtable = QTable()
    half_width = 0.5 * anthro.shoulder_width
    tau_max = 2.0 * hyper.tau0

    state = tuple(start_cell) if start_cell is not None else boundary.center_cell()
    if not boundary.contains_cell(state):
        raise ValueError(f"start cell {state} outside the boundary grid")
    nx, ny, nz = boundary.shape

    tau = hyper.tau0
    prev_postural = evaluator.postural(state)
    best_postural = prev_postural
    best_cell = state
    score_trace = [(0, prev_postural)]
    tau_trace = [(0, tau)]

    deadline = None
    if hyper.budget_seconds is not None:
        deadline = time.perf_counter() + hyper.budget_seconds

    step_i = 0
    while True:
        if hyper.budget_steps is not None and step_i >= hyper.budget_steps:
            break
        if deadline is not None and time.perf_counter() >= deadline:
            break
        step_i += 1

        if hyper.restart_every and step_i % hyper.restart_every == 0:
            state = (rng.randrange(nx), rng.randrange(ny), rng.randrange(nz))
            prev_postural = evaluator.postural(state)

        action = softmax_select(qtable.values(state), tau, rng)
        next_state = apply_action(state, action, boundary)
        postural = evaluator.postural(next_state)
        s = symmetry_score(evaluator.targets(next_state), 0.0, half_width)
        r = reward(postural, s, hyper.symmetry_weight)
        q_update(qtable, state, action, r, next_state, hyper.alpha, hyper.gamma)
        tau = adapt_temperature(tau, prev_postural, postural,
                                threshold=hyper.score_threshold,
                                step=hyper.tau_step, tau_max=tau_max)

        if postural < best_postural:
            best_postural = postural
            best_cell = next_state
            score_trace.append((step_i, postural))
            tau_trace.append((step_i, tau))

        prev_postural = postural
        state = next_state

        if hyper.stop_at_score is not None and best_postural <= hyper.stop_at_score:
            break

    return RunRecord(
        seed=seed,
        config_hash=evaluator.config_hash,
        best_postural=best_postural,
        best_cell=best_cell,
        best_position=tuple(float(v) for v in boundary.cell_point(best_cell)),
        steps=step_i,
        score_trace=tuple(score_trace),
        tau_trace=tuple(tau_trace),
    )
