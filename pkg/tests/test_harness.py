import csv
import math

import numpy as np
import pytest

from zenopt import (
    CapacityError,
    DEPHASE,
    InputError,
    LayerParams,
    Multipliers,
    OptimizerConfig,
    QAOA,
    ZENO,
    cargo_instance,
    enumerate_assignments,
    lagrange_sweep,
    ordering_study,
    run_assignment,
    run_family_sweep,
    sampled_metrics,
    state_visit_histogram,
    zeno_demo_rows,
)
from zenopt.cli import main
from zenopt.harness import FAMILY_CSV_COLUMNS
from zenopt.problem import save_problem


def tiny():
    # 1 cargo of weight 1, 1 position: 1 variable, 3 constraints, 27 rows
    return cargo_instance([1], 1, 1)


def cargo():
    return cargo_instance([1, 2, 3], 2, 3)


def test_enumerate_assignments_single():
    assert enumerate_assignments(1) == [(QAOA,), (DEPHASE,), (ZENO,)]


def test_enumerate_assignments_six():
    rows = enumerate_assignments(6)
    assert len(rows) == 729
    assert rows[0] == (QAOA,) * 6
    assert rows[-1] == (ZENO,) * 6
    rank = {QAOA: 0, DEPHASE: 1, ZENO: 2}
    keys = [[rank[k] for k in row] for row in rows]
    assert keys == sorted(keys)


def test_enumerate_assignments_capacity():
    with pytest.raises(CapacityError):
        enumerate_assignments(9)


def test_family_sweep_small_problem():
    problem = tiny()
    mult = Multipliers.uniform(3, 3.0)
    config = OptimizerConfig(max_iters=8, seed=100)
    rows = run_family_sweep(problem, mult, config)
    assert len(rows) == 27
    for row in rows:
        if not row.error:
            assert 0.0 <= row.p_feasible <= 1.0 + 1e-9
            assert 0.0 <= row.survival_prob <= 1.0 + 1e-9
            assert row.stats is not None


def test_family_sweep_rows_reproduce_bit_exactly():
    problem = tiny()
    mult = Multipliers.uniform(3, 3.0)
    config = OptimizerConfig(max_iters=8, seed=100)
    rows = run_family_sweep(problem, mult, config)
    assignments = enumerate_assignments(3)
    for index in (0, 5, 13, 26):
        from dataclasses import replace

        rerun = run_assignment(
            problem, assignments[index], mult, replace(config, seed=config.seed + index)
        )
        assert rerun.expected_cost == rows[index].expected_cost
        assert rerun.p_feasible == rows[index].p_feasible
        assert rerun.stats == rows[index].stats


def test_family_sweep_parallel_matches_serial():
    problem = tiny()
    mult = Multipliers.uniform(3, 3.0)
    config = OptimizerConfig(max_iters=5, seed=7)
    serial = run_family_sweep(problem, mult, config)
    parallel = run_family_sweep(problem, mult, config, workers=2)
    for a, b in zip(serial, parallel):
        assert a.assignment == b.assignment
        assert a.expected_cost == b.expected_cost or (
            math.isnan(a.expected_cost) and math.isnan(b.expected_cost)
        )


def test_lagrange_sweep_shapes_and_validation():
    problem = tiny()
    config = OptimizerConfig(max_iters=5, seed=0)
    rows = lagrange_sweep(problem, (QAOA,) * 3, [2.0], config)
    assert len(rows) == 1 and rows[0][0] == 2.0
    with pytest.raises(InputError):
        lagrange_sweep(problem, (QAOA,) * 3, [9.0, 5.0], config)
    with pytest.raises(InputError):
        lagrange_sweep(problem, (QAOA,) * 3, [-1.0, 2.0], config)


def test_histogram_uniform_at_zero_angles():
    problem = cargo()
    mult = Multipliers.uniform(6, 13)
    result = state_visit_histogram(
        problem, (QAOA,) * 6, mult, LayerParams((0.0,), (0.0,))
    )
    assert result.support_size == 64
    values = np.array(list(result.probabilities.values()))
    assert np.allclose(values, 1 / 64)
    assert abs(values.sum() - 1.0) < 1e-9


def test_histogram_zeno_support():
    problem = cargo()
    mult = Multipliers.uniform(6, 13)
    result = state_visit_histogram(
        problem, (ZENO,) + (QAOA,) * 5, mult, LayerParams((0.0,), (0.0,))
    )
    assert result.support_size == 12
    assert abs(sum(result.probabilities.values()) - 1.0) < 1e-9


def test_ordering_study_rows_and_validation():
    problem = cargo()
    mult = Multipliers.uniform(6, 13)
    config = OptimizerConfig(max_iters=5, seed=0)
    assignment = (DEPHASE, ZENO, DEPHASE, ZENO, QAOA, QAOA)
    rows = ordering_study(problem, assignment, mult, config)
    assert set(rows) == {"natural", "zeno_first", "dephase_first"}
    with pytest.raises(InputError):
        ordering_study(problem, (QAOA,) * 6, mult, config)


def test_zeno_demo_rows():
    rows = zeno_demo_rows([1, 10, 200])
    assert [r["n"] for r in rows] == [1, 10, 200]
    assert abs(rows[1]["survival_empirical"] - np.cos(np.pi / 20) ** 20) < 1e-10
    with pytest.raises(InputError):
        zeno_demo_rows([])


def test_sampled_metrics_tracks_exact():
    problem = cargo()
    mult = Multipliers.uniform(6, 13)
    params = LayerParams((0.1,), (0.2,))
    from zenopt import evaluate_params

    exact = evaluate_params(problem, (QAOA,) * 6, mult, params)
    noisy = sampled_metrics(problem, (QAOA,) * 6, mult, params, shots=200000, seed=5)
    assert abs(noisy.p_feasible - exact.p_feasible) < 0.01
    assert abs(noisy.expected_cost - exact.expected_cost) < 5.0


@pytest.fixture
def cargo_json(tmp_path):
    path = tmp_path / "cargo.json"
    save_problem(cargo(), str(path))
    return str(path)


def test_cli_solve_writes_trace(cargo_json, tmp_path, capsys):
    out = tmp_path / "trace.csv"
    rc = main(
        [
            "solve", "--problem", cargo_json,
            "--assign", "ZENO,QAOA,QAOA,QAOA,QAOA,QAOA",
            "--lambda", "13", "--iters", "10", "--seed", "3", "--out", str(out),
        ]
    )
    assert rc == 0
    rows = list(csv.DictReader(open(out)))
    assert 1 <= len(rows) <= 10
    assert set(rows[0]) == {
        "iter", "gamma_0", "beta_0", "expected_cost", "p_feasible", "p_optimal", "survival_prob"
    }
    assert "best gamma" in capsys.readouterr().out


def test_cli_family_sweep_csv_columns(tmp_path, capsys):
    path = tmp_path / "tiny.json"
    save_problem(tiny(), str(path))
    out = tmp_path / "family.csv"
    rc = main(
        ["sweep-family", "--problem", str(path), "--iters", "4", "--out", str(out)]
    )
    assert rc == 0
    with open(out) as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    assert header == FAMILY_CSV_COLUMNS
    assert len(rows) == 27


def test_cli_lagrange_and_ordering(cargo_json, tmp_path):
    lag = tmp_path / "lag.csv"
    rc = main(
        [
            "sweep-lagrange", "--problem", cargo_json,
            "--assign", "QAOA,QAOA,QAOA,QAOA,QAOA,QAOA",
            "--lambdas", "1,5", "--iters", "4", "--out", str(lag),
        ]
    )
    assert rc == 0
    assert len(list(csv.DictReader(open(lag)))) == 2

    order = tmp_path / "ord.csv"
    rc = main(
        [
            "ordering", "--problem", cargo_json,
            "--assign", "DEPHASE,ZENO,DEPHASE,ZENO,QAOA,QAOA",
            "--iters", "4", "--out", str(order),
        ]
    )
    assert rc == 0
    assert len(list(csv.DictReader(open(order)))) == 3


def test_cli_histogram_zeno_demo_sa(cargo_json, tmp_path):
    hist = tmp_path / "hist.csv"
    rc = main(
        [
            "histogram", "--problem", cargo_json,
            "--assign", "ZENO,QAOA,QAOA,QAOA,QAOA,QAOA",
            "--gamma", "0", "--beta", "0", "--out", str(hist),
        ]
    )
    assert rc == 0
    assert len(list(csv.DictReader(open(hist)))) == 64

    zeno = tmp_path / "zeno.csv"
    assert main(["zeno-demo", "--n-list", "1,2,4", "--out", str(zeno)]) == 0
    assert len(list(csv.DictReader(open(zeno)))) == 3

    sa = tmp_path / "sa.csv"
    rc = main(
        ["baseline-sa", "--problem", cargo_json, "--steps", "50", "--seed", "1", "--out", str(sa)]
    )
    assert rc == 0
    rows = list(csv.DictReader(open(sa)))
    assert len(rows) == 50
    assert set(rows[0]) == {"step", "state", "cost", "accepted"}


def test_cli_exit_codes(tmp_path):
    assert main(["solve", "--problem", "missing.json", "--assign", "QAOA"]) == 2

    # a 9-constraint problem exceeds the family cap -> capacity error
    from zenopt import ConstrainedBinaryProblem, Constraint

    big = ConstrainedBinaryProblem(
        2, (1, 1), tuple(Constraint((1, 1), 1, f"c{i}") for i in range(9))
    )
    path = tmp_path / "big.json"
    save_problem(big, str(path))
    rc = main(["sweep-family", "--problem", str(path), "--out", str(tmp_path / "x.csv")])
    assert rc == 3

    # malformed assignment is an input error
    path2 = tmp_path / "tiny.json"
    save_problem(tiny(), str(path2))
    rc = main(
        ["solve", "--problem", str(path2), "--assign", "QAOA,BOGUS,QAOA"]
    )
    assert rc == 2
