"""Acceptance suite: one test per release criterion, at pinned tolerances.

Each test prints a single `criterion NN: PASS/FAIL` line (visible with
pytest -s, and in the failure report otherwise) and asserts the verdict.
"""

import json
import time

import numpy as np

from bearingkit import (
    BearingConstraintSet,
    expm_oracle,
    load_fixture,
    predict_limit,
    simulate,
    span_basis,
    subspaces_equal,
)
from bearingkit.cli import main as cli_main
from bearingkit.conjecture import random_capped_formation, random_formation
from bearingkit.formation import Formation
from bearingkit.simulation import SimulationConfig

from conftest import finite_difference_jacobian


def report(num: int, ok: bool, detail: str) -> None:
    print(f"criterion {num:02d}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num:02d}: {detail}"


def test_criterion_01_fixture_classification_table(tmp_path, capsys):
    expected = {
        "fig2a": (True, True),
        "fig2b": (False, True),
        "fig3a": (True, False),
        "fig3b": (False, False),
    }
    start = time.perf_counter()
    got = {}
    for name in expected:
        code = cli_main(["analyze", name, "--out", str(tmp_path)])
        assert code == 0
        data = json.loads((tmp_path / f"{name}_analysis.json").read_text())
        got[name] = (data["is_rigid"], data["is_persistent"])
    elapsed = time.perf_counter() - start
    capsys.readouterr()  # drop the CLI tables from the criterion line
    ok = got == expected and elapsed < 1.0
    report(1, ok, f"classification {got}, elapsed {elapsed:.3f}s (< 1 s)")


def test_criterion_02_ranks_and_fig3a_null_basis(tmp_path, capsys):
    rank_2a = json_rank(tmp_path, "fig2a")
    rank_3a = json_rank(tmp_path, "fig3a")

    code = cli_main(["export-matrices", "fig3a", "--out", str(tmp_path)])
    assert code == 0
    capsys.readouterr()
    emitted = np.array(
        json.loads((tmp_path / "fig3a_matrices.json").read_text())["null_LB"]
    )
    reference = span_basis(np.array([
        [1, 0, 1, 0, 1, 0, 1, 0],
        [0, 1, 0, 1, 0, 1, 0, 1],
        [-1, 1, 1, 1, 1, -1, -1, -1],
        [0, 2, -1, 1, -2, 0, 0, 0],
    ], dtype=float).T)
    spans = emitted.shape[1] == 4 and subspaces_equal(emitted, reference, tol=1e-8)
    ok = rank_2a == 5 and rank_3a == 5 and spans
    report(2, ok, f"rank(R)={rank_2a}/{rank_3a} (= 2n-3 = 5), "
                  f"nullity(L)={emitted.shape[1]} basis spans reference: {spans}")


def json_rank(tmp_path, name):
    code = cli_main(["analyze", name, "--out", str(tmp_path)])
    assert code == 0
    return json.loads((tmp_path / f"{name}_analysis.json").read_text())["rank_rigidity"]


def test_criterion_03_null_chain_residuals_on_200_formations():
    start = time.perf_counter()
    worst = 0.0
    for trial in range(200):
        rng = np.random.default_rng([3001, trial])
        n = int(rng.integers(3, 11))
        d = int(rng.integers(2, 4))
        f = random_formation(rng, n, d)
        R = f.bearing_rigidity_matrix
        L = BearingConstraintSet.from_formation(f).bearing_laplacian
        translations = np.kron(np.ones(n), np.eye(d)).T
        from bearingkit import nullspace_basis

        null_R = nullspace_basis(R)
        residual = max(
            float(np.linalg.norm(R @ translations, axis=0).max()),
            float(np.linalg.norm(R @ f.p)),
            float(np.linalg.norm(L @ null_R, axis=0).max()) if null_R.size else 0.0,
        )
        worst = max(worst, residual)
    elapsed = time.perf_counter() - start
    ok = worst < 1e-9 and elapsed < 30.0
    report(3, ok, f"worst chain residual {worst:.3e} (< 1e-9) over 200 formations, "
                  f"elapsed {elapsed:.1f}s (< 30 s)")


def test_criterion_04_rigidity_matrix_matches_jacobian():
    worst = 0.0
    for trial in range(20):
        rng = np.random.default_rng([3002, trial])
        n = int(rng.integers(3, 9))
        d = int(rng.integers(2, 4))
        f = random_formation(rng, n, d)
        J = finite_difference_jacobian(f, step=1e-6)
        worst = max(worst, float(np.abs(f.bearing_rigidity_matrix - J).max()))
    ok = worst < 1e-6
    report(4, ok, f"worst entrywise gap to central differences {worst:.3e} (< 1e-6) "
                  "over 20 formations")


def test_criterion_05_undirected_guarantees():
    worst_asym, worst_eig, rank_mismatches = 0.0, 0.0, 0
    from bearingkit import numeric_rank

    for trial in range(100):
        rng = np.random.default_rng([3003, trial])
        n = int(rng.integers(3, 9))
        d = int(rng.integers(2, 4))
        f = random_formation(rng, n, d, graph_model="erdos-renyi-undirected")
        L = BearingConstraintSet.from_formation(f).bearing_laplacian
        worst_asym = max(worst_asym, float(np.abs(L - L.T).max()))
        worst_eig = min(worst_eig, float(np.linalg.eigvalsh(L).min()))
        if numeric_rank(L) != numeric_rank(f.bearing_rigidity_matrix):
            rank_mismatches += 1
    ok = worst_asym < 1e-15 and worst_eig >= -1e-10 and rank_mismatches == 0
    report(5, ok, f"max asymmetry {worst_asym:.2e} (< 1e-15), min eigenvalue "
                  f"{worst_eig:.2e} (>= -1e-10), rank mismatches {rank_mismatches}/100")


def test_criterion_06_capped_generator_always_persistent():
    from bearingkit import is_bearing_persistent

    failures = 0
    for trial in range(200):
        rng = np.random.default_rng([3004, trial])
        n = int(rng.integers(3, 11))
        f = random_capped_formation(rng, n, d=2)
        if not is_bearing_persistent(f):
            failures += 1
    ok = failures == 0
    report(6, ok, f"{200 - failures}/200 capped 2-D formations classified persistent")


def test_criterion_07_persistent_square_reaches_target(tmp_path, capsys):
    code = cli_main(["simulate", "fig2a", "--seed", "1", "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 0
    data = json.loads((tmp_path / "fig2a_trajectory.json").read_text())
    control = data["control_norm"][-1]
    berr = data["bearing_error"][-1]
    at_horizon = data["times"][-1] == 50.0
    equivalent = "equivalent=True" in out
    ok = at_horizon and control < 1e-8 and berr < 1e-6 and equivalent
    report(7, ok, f"t=50: control norm {control:.3e} (< 1e-8), bearing error "
                  f"{berr:.3e} (< 1e-6), equivalent={equivalent}")


def test_criterion_08_non_persistent_square_stalls_off_target(tmp_path, capsys):
    code = cli_main(["simulate", "fig3a", "--seed", "1", "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 0
    data = json.loads((tmp_path / "fig3a_trajectory.json").read_text())
    control = data["control_norm"][-1]
    berr = data["bearing_error"][-1]
    not_equivalent = "equivalent=False" in out
    ok = data["times"][-1] == 50.0 and control < 1e-8 and berr > 0.05 and not_equivalent
    report(8, ok, f"t=50: control norm {control:.3e} (< 1e-8) while bearing error "
                  f"{berr:.4f} stays > 0.05, equivalent=False: {not_equivalent}")


def test_criterion_09_rk4_matches_oracle_on_all_fixtures():
    worst, worst_name = 0.0, ""
    for name in ("fig1a", "fig1b", "fig2a", "fig2b", "fig3a", "fig3b"):
        s = load_fixture(name)
        c = s.constraint_set()
        p0, _ = s.initial_positions(seed=1)
        traj = simulate(c, p0, SimulationConfig(dt=0.01, t_max=10.0, integrator="rk4"))
        gap = float(np.abs(traj.final_positions - expm_oracle(c, p0, 10.0)).max())
        if gap > worst:
            worst, worst_name = gap, name
    ok = worst < 1e-6
    report(9, ok, f"worst rk4-vs-exponential gap at t=10: {worst:.3e} "
                  f"({worst_name}; < 1e-6)")


def test_criterion_10_limit_prediction_matches_long_run():
    s = load_fixture("fig2a")
    c = s.constraint_set()
    p0, _ = s.initial_positions(seed=1)
    prediction = predict_limit(c, p0)
    traj = simulate(c, p0, SimulationConfig(t_max=50.0))
    gap = float(np.linalg.norm(traj.final_positions - prediction.p_inf))
    ok = prediction.valid and gap < 1e-4
    report(10, ok, f"|p(50) - predicted limit| = {gap:.3e} (< 1e-4), "
                   f"prediction valid: {prediction.valid}")


def test_criterion_11_conjecture_batch_is_reported_not_asserted(tmp_path, capsys):
    start = time.perf_counter()
    code = cli_main(["conjecture", "--trials", "1000", "--seed", "42",
                     "--out", str(tmp_path)])
    elapsed = time.perf_counter() - start
    capsys.readouterr()
    data = json.loads((tmp_path / "conjecture_report.json").read_text())
    minimum = data["aggregate_min_real_part"]
    expected_code = 3 if minimum < -1e-8 else 0
    dumped = all(
        (tmp_path / f"conjecture_violation_trial_{i}.json").is_file()
        for i in data["violations"]
    )
    # the experiment's outcome is reported either way; only the exit-code
    # contract and the replay artifacts are asserted
    ok = elapsed < 300.0 and code == expected_code and dumped and len(data["trials"]) == 1000
    report(11, ok, f"1000 trials in {elapsed:.1f}s (< 300 s), aggregate min real "
                   f"part {minimum:.6e}, exit code {code} (expected {expected_code}), "
                   f"{len(data['violations'])} violation candidate(s) dumped for replay")
