"""Experiment configuration.

Flat key-value text files with section prefixes:

    anthro.*    body dimensions in meters (missing ones derived from height),
                or anthro.file pointing at a bare anthropometry key-value file
    boundary.*  grid step
    task.*      handle separation and load/coupling/activity scores
    rl.*        Q-learning hyperparameters, budget, run count, seeds
    compare.*   start points for the optimized-vs-naive comparison

Unknown keys are rejected by name. CLI flags may override selected values.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

from .skeleton import Anthropometry, AnthropometryError, load_anthropometry
from .reba import RebaRangeError, TaskAdjustments
from .grid import Boundary, BoundaryError, BoxSpec
from .qlearn import HyperparamError, Hyperparams


class ConfigError(ValueError):
    pass


_ANTHRO_KEYS = {f.name for f in fields(Anthropometry)}

_SCHEMA = {
    "anthro.file": str,
    **{f"anthro.{k}": float for k in _ANTHRO_KEYS},
    "boundary.step": float,
    "task.handle_separation": float,
    "task.load_score": int,
    "task.coupling_score": int,
    "task.activity_score": int,
    "rl.alpha": float,
    "rl.gamma": float,
    "rl.tau0": float,
    "rl.tau_step": float,
    "rl.score_threshold": int,
    "rl.budget_steps": int,
    "rl.budget_seconds": float,
    "rl.symmetry_weight": float,
    "rl.stop_at_score": int,
    "rl.restart_every": int,
    "rl.runs": int,
    "rl.seed_base": int,
    "rl.start_cell": str,
    "compare.start_points": str,
}


@dataclass(frozen=True)
class ExperimentConfig:
    anthro: Anthropometry
    boundary: Boundary
    box: BoxSpec
    hyper: Hyperparams
    adjustments: TaskAdjustments
    runs: int = 10
    seed_base: int = 0
    start_cell: tuple[int, int, int] | None = None
    compare_starts: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.runs < 1:
            raise ConfigError(f"rl.runs must be >= 1, got {self.runs}")

    @property
    def seeds(self) -> list[int]:
        return list(range(self.seed_base, self.seed_base + self.runs))


def _parse_points(raw: str):
    points = []
    for i, chunk in enumerate(raw.split(";")):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = [p for p in chunk.replace(",", " ").split() if p]
        if len(parts) != 3:
            raise ConfigError(f"compare.start_points entry {i + 1} is not a 3D point: {chunk!r}")
        try:
            points.append(tuple(float(p) for p in parts))
        except ValueError:
            raise ConfigError(f"compare.start_points entry {i + 1} has a bad number: {chunk!r}") from None
    return tuple(points)


def _read_pairs(path) -> dict:
    pairs = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in _SCHEMA:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            if key in pairs:
                raise ConfigError(f"{path}:{lineno}: duplicate config key {key!r}")
            caster = _SCHEMA[key]
            try:
                pairs[key] = caster(val)
            except ValueError:
                raise ConfigError(
                    f"{path}:{lineno}: bad value {val!r} for {key} (expected {caster.__name__})"
                ) from None
    return pairs


def load_config(path, overrides: dict | None = None) -> ExperimentConfig:
    """Parse a config file and apply CLI overrides (same key names)."""
    pairs = _read_pairs(path)
    if overrides:
        for key, val in overrides.items():
            if val is None:
                continue
            if key not in _SCHEMA:
                raise ConfigError(f"unknown override {key!r}")
            pairs[key] = _SCHEMA[key](val)
    # budget override: the most recently supplied kind wins
    if overrides:
        if overrides.get("rl.budget_steps") is not None:
            pairs.pop("rl.budget_seconds", None)
            pairs["rl.budget_steps"] = int(overrides["rl.budget_steps"])
        elif overrides.get("rl.budget_seconds") is not None:
            pairs.pop("rl.budget_steps", None)
            pairs["rl.budget_seconds"] = float(overrides["rl.budget_seconds"])
    return build_config(pairs)


def build_config(pairs: dict) -> ExperimentConfig:
    try:
        if "anthro.file" in pairs:
            base = load_anthropometry(pairs["anthro.file"])
            kwargs = {k: getattr(base, k) for k in _ANTHRO_KEYS}
        else:
            kwargs = {}
        for key in _ANTHRO_KEYS:
            if f"anthro.{key}" in pairs:
                kwargs[key] = pairs[f"anthro.{key}"]
        anthro = Anthropometry(**kwargs)

        boundary = Boundary.from_anthro(anthro, step=pairs.get("boundary.step", 0.003))
        box = BoxSpec(handle_separation=pairs.get("task.handle_separation", 0.4))
        adjustments = TaskAdjustments(
            load_score=pairs.get("task.load_score", 0),
            coupling_score=pairs.get("task.coupling_score", 0),
            activity_score=pairs.get("task.activity_score", 0),
        )
        budget_steps = pairs.get("rl.budget_steps")
        budget_seconds = pairs.get("rl.budget_seconds")
        if budget_steps is None and budget_seconds is None:
            budget_seconds = 120.0
        hyper = Hyperparams(
            alpha=pairs.get("rl.alpha", 0.1),
            gamma=pairs.get("rl.gamma", 0.9),
            tau0=pairs.get("rl.tau0", 1.0),
            tau_step=pairs.get("rl.tau_step", 0.1),
            score_threshold=pairs.get("rl.score_threshold", 5),
            budget_steps=budget_steps,
            budget_seconds=budget_seconds,
            symmetry_weight=pairs.get("rl.symmetry_weight", 1.0),
            stop_at_score=pairs.get("rl.stop_at_score"),
            restart_every=pairs.get("rl.restart_every", 0),
        )
    except (AnthropometryError, BoundaryError, RebaRangeError, HyperparamError, ValueError) as e:
        raise ConfigError(str(e)) from e

    start_cell = None
    raw_start = pairs.get("rl.start_cell", "center")
    if raw_start != "center":
        parts = [p for p in raw_start.replace(",", " ").split() if p]
        if len(parts) != 3:
            raise ConfigError(f"rl.start_cell must be 'center' or 'i,j,k', got {raw_start!r}")
        try:
            start_cell = tuple(int(p) for p in parts)
        except ValueError:
            raise ConfigError(f"rl.start_cell has non-integer indices: {raw_start!r}") from None

    return ExperimentConfig(
        anthro=anthro,
        boundary=boundary,
        box=box,
        hyper=hyper,
        adjustments=adjustments,
        runs=pairs.get("rl.runs", 10),
        seed_base=pairs.get("rl.seed_base", 0),
        start_cell=start_cell,
        compare_starts=_parse_points(pairs.get("compare.start_points", "")),
    )
