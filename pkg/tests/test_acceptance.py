"""Acceptance suite: every exit criterion at its stated tolerance.

Each test prints one `ACCEPTANCE <id> ... PASS/FAIL` line. The desk-scale
exhaustive sweep (2 cm grid, ~57k cells) is computed once and shared by
the oracle-equivalence, start-independence and distribution criteria.

Two checks are expected to fail and are left failing deliberately:
  - criterion 1's third clause asserts table_c(8,6) == table_c(8,10), but
    the published Table C has 10 at (8,6) and 11 at (8,10); the plateau at
    A=8 spans B=6..9 only. Faking the table would break its other pins.
  - criterion 5 expects an argmin fraction < 1% and a modal fraction > 25%;
    with this rig the optimum basin is the genuine "carry close to the body
    at elbow height" region (~3% of cells) and the mode holds ~21%.
"""

import math
import random
from types import SimpleNamespace

import numpy as np
import pytest

from handover_ergo.baseline import shortest_distance_target
from handover_ergo.cli import main as cli_main
from handover_ergo.evaluator import PostureGrid
from handover_ergo.grid import Boundary, BoxSpec
from handover_ergo.ik import get_solver
from handover_ergo.qlearn import (
    Hyperparams,
    QTable,
    q_update,
    softmax_probabilities,
    softmax_select,
    train,
)
from handover_ergo.reba import TABLE_A, TABLE_B, TABLE_C, TaskAdjustments, table_c, score_pose
from handover_ergo.skeleton import Anthropometry, forward_kinematics
from handover_ergo.sweep import sweep, verify_against

OUT_OF_REACH_STARTS = [
    (0.028, 1.122, 1.354),
    (0.263, 1.122, 1.354),
    (-0.423, 1.122, 1.354),
    (0.028, 0.472, 0.6),
    (0.028, 2.292, 1.354),
]


def _report(name: str, ok: bool) -> bool:
    print(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}")
    return ok


@pytest.fixture(scope="module")
def desk(anthro):
    boundary = Boundary.from_anthro(anthro, step=0.02)
    box = BoxSpec(0.4)
    adj = TaskAdjustments()
    grid = PostureGrid(anthro, boundary, box, adj)
    report = sweep(anthro, boundary, box, adj, evaluator=grid)
    print(f"\n[desk sweep] {report.total_cells} cells in {report.elapsed:.1f}s, "
          f"min {report.global_min} x{len(report.argmin_cells)}, "
          f"histogram {report.histogram}")
    return SimpleNamespace(anthro=anthro, boundary=boundary, box=box, adj=adj,
                           grid=grid, report=report)


def test_criterion_1_golden_pair_and_plateau():
    pair_ok = table_c(2, 5) == 4 and table_c(3, 5) == 4
    plateau_ok = table_c(8, 6) == table_c(8, 10)
    ok = _report("1 (REBA golden pair + plateau)", pair_ok and plateau_ok)
    assert ok, (
        f"table_c(2,5)={table_c(2, 5)}, table_c(3,5)={table_c(3, 5)}, "
        f"table_c(8,6)={table_c(8, 6)}, table_c(8,10)={table_c(8, 10)}"
    )


def test_criterion_2_table_monotonicity():
    ok = True
    for axis in range(3):
        ok &= bool(np.all(np.diff(TABLE_A, axis=axis) >= 0))
        ok &= bool(np.all(np.diff(TABLE_B, axis=axis) >= 0))
    ok &= bool(np.all(np.diff(TABLE_C, axis=0) >= 0))
    ok &= bool(np.all(np.diff(TABLE_C, axis=1) >= 0))
    assert _report("2 (table monotonicity, all 144 C entries + A/B)", ok)


def test_criterion_3_oracle_equivalence(desk):
    hyper = Hyperparams(budget_seconds=120.0, stop_at_score=desk.report.global_min)
    successes = 0
    for seed in range(10):
        # start at the worst corner of the grid; the default center start
        # already sits inside the optimum basin and would prove nothing
        record = train(desk.anthro, desk.boundary, desk.box, hyper, seed,
                       adjustments=desk.adj, evaluator=desk.grid,
                       start_cell=(0, 0, 0))
        result = verify_against(desk.report, record)
        successes += result.passed
        print(f"  seed {seed}: best {record.best_postural} in {record.steps} steps "
              f"-> {'ok' if result.passed else 'MISS'}")
    ok = _report(f"3 (oracle equivalence, {successes}/10 runs reach the minimum)",
                 successes >= 8)
    assert ok


def test_criterion_4_start_independence(desk):
    opt_cell, _ = min(desk.report.argmin_cells, key=lambda cp: (abs(cp[1][0]), cp[0]))
    opt_postural, _ = desk.grid.scores(tuple(opt_cell))
    rows = []
    for start in OUT_OF_REACH_STARTS:
        base_cell = shortest_distance_target(start, desk.boundary)
        base_postural, _ = desk.grid.scores(base_cell)
        rows.append((start, opt_postural, base_postural))
        print(f"  start {start}: optimized {opt_postural}, baseline {base_postural}")
    constant = len({r[1] for r in rows}) == 1
    dominated = all(r[1] <= r[2] for r in rows)
    strict = any(r[1] < r[2] for r in rows)
    ok = _report("4 (start independence + baseline dominance)",
                 constant and dominated and strict)
    assert ok, rows


def test_criterion_5_distribution_shape(desk):
    rep = desk.report
    argmin_fraction = len(rep.argmin_cells) / rep.total_cells
    modal_fraction = rep.fractions[rep.modal_score]
    ok = _report(
        f"5 (distribution shape: argmin {argmin_fraction:.2%} < 1%, "
        f"modal {modal_fraction:.2%} > 25%)",
        argmin_fraction < 0.01 and modal_fraction > 0.25,
    )
    assert ok, (argmin_fraction, modal_fraction)


def test_criterion_6_rl_kernel_exactness():
    rng = random.Random(123)
    kernel_ok = True
    for _ in range(100):
        q0 = rng.uniform(-10, 10)
        nxt = [rng.uniform(-10, 10) for _ in range(6)]
        r = rng.uniform(-5, 5)
        alpha = rng.uniform(0.01, 1.0)
        gamma = rng.uniform(0.0, 0.99)
        qt = QTable()
        qt.entry((0, 0, 0))[2] = q0
        for a, v in enumerate(nxt):
            qt.entry((1, 0, 0))[a] = v
        q_update(qt, (0, 0, 0), 2, r, (1, 0, 0), alpha, gamma)
        expected = (1.0 - alpha) * q0 + alpha * (r + gamma * max(nxt))
        kernel_ok &= abs(qt.values((0, 0, 0))[2] - expected) <= 1e-12

    softmax_ok = True
    for _ in range(100):
        qs = [rng.uniform(-5, 5) for _ in range(6)]
        tau = rng.uniform(0.05, 10.0)
        probs = softmax_probabilities(qs, tau)
        direct = [math.exp(q / tau) for q in qs]
        z = sum(direct)
        direct = [d / z for d in direct]
        softmax_ok &= abs(sum(probs) - 1.0) <= 1e-12
        softmax_ok &= all(abs(p - d) <= 1e-12 for p, d in zip(probs, direct))

    draw_rng = random.Random(0)
    counts = [0] * 6
    n = 60_000
    for _ in range(n):
        counts[softmax_select([0.0] * 6, 1.0, draw_rng)] += 1
    freq_ok = all(abs(c / n - 1 / 6) <= 0.01 for c in counts)

    ok = _report("6 (RL kernel exactness + uniform selection frequencies)",
                 kernel_ok and softmax_ok and freq_ok)
    assert ok, (kernel_ok, softmax_ok, [c / n for c in counts])


def test_criterion_7_kinematic_soundness(anthro):
    rng = random.Random(99)
    solver = get_solver(anthro)
    reachable_checked = 0
    ok = True
    for _ in range(2000):
        if reachable_checked >= 1000:
            break
        mid = (rng.uniform(-0.22, 0.22), rng.uniform(0.55, 1.70), rng.uniform(0.05, 0.75))
        targets = BoxSpec(0.4).targets_for(mid)
        sol = solver.solve(targets)
        if not sol.reachable:
            continue
        reachable_checked += 1
        lm = forward_kinematics(anthro, sol.pose)
        ok &= float(np.linalg.norm(lm.hand_l - np.array(targets.left))) <= 1e-3
        ok &= float(np.linalg.norm(lm.hand_r - np.array(targets.right))) <= 1e-3
        for side in "lr":
            sh, el = getattr(lm, f"shoulder_{side}"), getattr(lm, f"elbow_{side}")
            wr = getattr(lm, f"wrist_{side}")
            ok &= abs(float(np.linalg.norm(el - sh)) - anthro.upper_arm) <= 1e-9
            ok &= abs(float(np.linalg.norm(wr - el)) - anthro.forearm) <= 1e-9
        mirrored = solver.solve(targets.mirrored())
        ok &= score_pose(mirrored.pose).postural == score_pose(sol.pose).postural
    ok &= reachable_checked >= 1000
    assert _report(f"7 (kinematic soundness over {reachable_checked} reachable targets)", ok)


def test_desk_sweep_matches_golden_distribution(desk):
    """Regression pin: the desk-scale distribution is implementation-defined,
    so the first verified run is frozen as golden data."""
    import json
    from pathlib import Path

    golden = json.loads((Path(__file__).parent / "data" / "desk_sweep_golden.json").read_text())
    rep = desk.report
    assert rep.config_hash == golden["config_hash"]
    assert rep.total_cells == golden["total_cells"]
    assert rep.global_min == golden["global_min"]
    assert len(rep.argmin_cells) == golden["argmin_count"]
    assert {str(k): v for k, v in rep.histogram.items()} == golden["histogram"]


def test_criterion_8_determinism(tmp_path):
    cfg = tmp_path / "det.cfg"
    cfg.write_text(
        "boundary.step = 0.06\n"
        "rl.budget_steps = 4000\n"
        "rl.runs = 3\n"
        "compare.start_points = 0.028,1.122,1.354\n"
    )
    out1, out2 = tmp_path / "a", tmp_path / "b"
    rc1 = cli_main(["train", "--config", str(cfg), "--out", str(out1), "--workers", "1"])
    rc2 = cli_main(["train", "--config", str(cfg), "--out", str(out2), "--workers", "1"])
    files_ok = rc1 == rc2 == 0
    for name in ("run_seed0.json", "run_seed1.json", "run_seed2.json",
                 "train_summary.csv", "best_position.csv"):
        files_ok &= (out1 / name).read_bytes() == (out2 / name).read_bytes()

    anthro = Anthropometry()
    boundary = Boundary.from_anthro(anthro, step=0.05)
    r1 = sweep(anthro, boundary, BoxSpec(0.4), TaskAdjustments(), workers=1)
    rn = sweep(anthro, boundary, BoxSpec(0.4), TaskAdjustments(), workers=4)
    sweep_ok = r1.histogram == rn.histogram and r1.argmin_cells == rn.argmin_cells

    assert _report("8 (byte-identical artifacts + worker-count independence)",
                   files_ok and sweep_ok)
