"""Batch experiment engine: the 3^n assignment-family sweep, Lagrange
sensitivity curves, block-ordering comparison, state-visit histograms, and
CSV emission for all of them.

Row metrics are evaluated in oracle mode (exact amplitudes through cheap
functional twins); complexity statistics always come from the gate-mode
build of the same circuit.  Rows are independent and seeded as base seed +
row index, so any single row reproduces bit-exactly on its own.
"""

from __future__ import annotations

import csv
import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .arithmetic import GATE_MODE, ORACLE_MODE
from .builder import (
    NATURAL,
    ORDERINGS,
    CircuitStats,
    LayerParams,
    build_circuit,
    circuit_stats,
    compiled_model,
    prepare_initial_state,
    run_circuit,
)
from .errors import CapacityError, InputError, ZenoptError
from .optimizer import (
    EvalResult,
    OptimizationTrace,
    OptimizerConfig,
    evaluate_params,
    optimize,
)
from .problem import (
    REP_KINDS,
    ConstrainedBinaryProblem,
    Multipliers,
    brute_force_solve,
)
from .statevector import marginal_probabilities, sample
from .zeno import survival_analytic, survival_empirical, zeno_limit_error

MAX_FAMILY_CONSTRAINTS = 8

FAMILY_CSV_COLUMNS = [
    "assignment", "non_local", "qubits", "clbits", "depth", "width", "size",
    "params", "factors", "expected_cost", "p_feasible", "p_optimal",
    "survival", "wall_time_s", "error",
]


@dataclass(frozen=True)
class SweepResult:
    assignment: tuple[str, ...]
    stats: CircuitStats | None
    expected_cost: float
    p_feasible: float
    p_optimal: float
    survival_prob: float
    wall_time: float
    error: str = ""


def enumerate_assignments(n_constraints: int) -> list[tuple[str, ...]]:
    """All 3^n representation assignments in lexicographic order
    (QAOA < DEPHASE < ZENO per constraint)."""
    if n_constraints > MAX_FAMILY_CONSTRAINTS:
        raise CapacityError(
            f"family enumeration capped at {MAX_FAMILY_CONSTRAINTS} constraints"
        )
    return list(itertools.product(REP_KINDS, repeat=n_constraints))


def run_assignment(
    problem: ConstrainedBinaryProblem,
    assignment,
    mult: Multipliers,
    config: OptimizerConfig,
    ordering: str = NATURAL,
) -> SweepResult:
    """Optimize one assignment and collect its stats row."""
    assignment = tuple(assignment)
    start = time.perf_counter()
    stats = None
    try:
        gate_circuit = build_circuit(
            problem, assignment, mult, config.init_params, ordering, GATE_MODE
        )
        stats = circuit_stats(gate_circuit)
        trace = optimize(problem, assignment, mult, config, ordering, ORACLE_MODE)
        return SweepResult(
            assignment,
            stats,
            trace.final.expected_cost,
            trace.final.p_feasible,
            trace.final.p_optimal,
            trace.final.survival_prob,
            time.perf_counter() - start,
        )
    except ZenoptError as exc:
        return SweepResult(
            assignment,
            stats,
            math.nan,
            math.nan,
            math.nan,
            math.nan,
            time.perf_counter() - start,
            error=f"{type(exc).__name__}: {exc}",
        )


def _family_row(args) -> SweepResult:
    problem, assignment, mult, config, ordering = args
    return run_assignment(problem, assignment, mult, config, ordering)


def run_family_sweep(
    problem: ConstrainedBinaryProblem,
    mult: Multipliers,
    config: OptimizerConfig | None = None,
    ordering: str = NATURAL,
    workers: int | None = None,
) -> list[SweepResult]:
    """One optimized row per assignment; per-row failures land in the row.

    Row i uses seed config.seed + i.  With workers > 1 the rows run in a
    process pool; results are gathered in assignment (index) order and are
    identical to a serial run.
    """
    if problem.n_constraints > MAX_FAMILY_CONSTRAINTS:
        raise CapacityError(
            f"family sweep capped at {MAX_FAMILY_CONSTRAINTS} constraints"
        )
    if config is None:
        config = OptimizerConfig(max_iters=40)
    jobs = [
        (problem, assignment, mult, replace(config, seed=config.seed + i), ordering)
        for i, assignment in enumerate(enumerate_assignments(problem.n_constraints))
    ]
    if workers is not None and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_family_row, jobs, chunksize=8))
    return [_family_row(job) for job in jobs]


def lagrange_sweep(
    problem: ConstrainedBinaryProblem,
    assignment,
    lambdas,
    config: OptimizerConfig | None = None,
    ordering: str = NATURAL,
) -> list[tuple[float, EvalResult]]:
    """Optimized run metrics per Lagrange multiplier value."""
    lambdas = [float(v) for v in lambdas]
    if not lambdas or any(v <= 0 for v in lambdas):
        raise InputError("lambda values must be positive")
    if any(b <= a for a, b in zip(lambdas, lambdas[1:])):
        raise InputError("lambda values must be strictly ascending")
    if config is None:
        config = OptimizerConfig(max_iters=40)
    rows = []
    for lam in lambdas:
        mult = Multipliers.uniform(problem.n_constraints, lam)
        trace = optimize(problem, tuple(assignment), mult, config, ordering, ORACLE_MODE)
        rows.append((lam, trace.final))
    return rows


@dataclass(frozen=True)
class HistogramResult:
    probabilities: dict[str, float]
    support_size: int


def state_visit_histogram(
    problem: ConstrainedBinaryProblem,
    assignment,
    mult: Multipliers,
    params: LayerParams,
    ordering: str = NATURAL,
    mode: str = ORACLE_MODE,
    support_eps: float = 1e-12,
) -> HistogramResult:
    """Decision-qubit marginal of the final state, keyed by basis string."""
    assignment = tuple(assignment)
    circuit = build_circuit(problem, assignment, mult, params, ordering, mode)
    state = prepare_initial_state(problem, assignment, circuit.layout, mode)
    state = run_circuit(circuit, state)
    probs = marginal_probabilities(state, range(problem.n_vars))
    n = problem.n_vars
    table = {format(i, f"0{n}b"): float(p) for i, p in enumerate(probs)}
    return HistogramResult(table, int(np.sum(probs > support_eps)))


def ordering_study(
    problem: ConstrainedBinaryProblem,
    assignment,
    mult: Multipliers,
    config: OptimizerConfig | None = None,
    reoptimize: bool = False,
) -> dict[str, EvalResult]:
    """Metrics of the same assignment under each block ordering.

    By default every ordering is evaluated at the identical configured
    parameters, which isolates the effect of reordering the constraint
    blocks; with reoptimize=True each ordering gets its own full search.
    """
    assignment = tuple(assignment)
    kinds = set(assignment)
    if "DEPHASE" not in kinds or "ZENO" not in kinds:
        raise InputError("ordering study needs at least one DEPHASE and one ZENO constraint")
    if config is None:
        config = OptimizerConfig(max_iters=40)
    rows: dict[str, EvalResult] = {}
    for ordering in ORDERINGS:
        if reoptimize:
            rows[ordering] = optimize(
                problem, assignment, mult, config, ordering, ORACLE_MODE
            ).final
        else:
            rows[ordering] = evaluate_params(
                problem, assignment, mult, config.init_params, ordering, ORACLE_MODE
            )
    return rows


def zeno_demo_rows(n_list, t: float = math.pi / 2) -> list[dict[str, float]]:
    """Two-level survival study: X Hamiltonian, projection onto |0><0|."""
    if not n_list or any(n < 1 for n in n_list):
        raise InputError("n_list must contain positive measurement counts")
    pauli_x = np.array([[0, 1], [1, 0]], dtype=complex)
    proj0 = np.diag([1.0, 0.0]).astype(complex)
    psi0 = np.array([1.0, 0.0], dtype=complex)
    rows = []
    for n in n_list:
        rows.append(
            {
                "n": int(n),
                "survival_empirical": survival_empirical(pauli_x, proj0, psi0, t, n),
                "survival_analytic": survival_analytic(pauli_x, psi0, t, n),
                "limit_error": zeno_limit_error(pauli_x, proj0, psi0, t, n),
            }
        )
    return rows


def sampled_metrics(
    problem: ConstrainedBinaryProblem,
    assignment,
    mult: Multipliers,
    params: LayerParams,
    shots: int,
    seed: int,
    ordering: str = NATURAL,
    mode: str = ORACLE_MODE,
) -> EvalResult:
    """Shot-based estimates of the run metrics for realism studies."""
    assignment = tuple(assignment)
    circuit = build_circuit(problem, assignment, mult, params, ordering, mode)
    state = prepare_initial_state(problem, assignment, circuit.layout, mode)
    state = run_circuit(circuit, state)
    counts = sample(state, shots, seed)
    model = compiled_model(problem, assignment, mult)
    mask = (1 << model.qubo.n_bits) - 1
    dec_mask = (1 << problem.n_vars) - 1
    oracle = brute_force_solve(problem)
    cost = feas = opt = 0.0
    for string, count in counts.items():
        index = int(string, 2)
        weight = count / shots
        cost += weight * float(model.cost_table[index & mask])
        if (index & dec_mask) in oracle.feasible_indices:
            feas += weight
        if (index & dec_mask) in oracle.optimal_indices:
            opt += weight
    return EvalResult(cost, feas, opt, state.survival_prob)


def write_family_csv(rows: list[SweepResult], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(FAMILY_CSV_COLUMNS)
        for row in rows:
            stats = row.stats
            writer.writerow(
                [
                    ",".join(row.assignment),
                    stats.non_local_gates if stats else "",
                    stats.n_qubits if stats else "",
                    stats.n_clbits if stats else "",
                    stats.depth if stats else "",
                    stats.width if stats else "",
                    stats.size if stats else "",
                    stats.n_parameters if stats else "",
                    stats.n_unitary_factors if stats else "",
                    row.expected_cost,
                    row.p_feasible,
                    row.p_optimal,
                    row.survival_prob,
                    row.wall_time,
                    row.error,
                ]
            )


def write_trace_csv(trace: OptimizationTrace, path: str) -> None:
    if not trace.records:
        raise InputError("empty trace")
    p = len(trace.records[0].gamma)
    header = (
        ["iter"]
        + [f"gamma_{i}" for i in range(p)]
        + [f"beta_{i}" for i in range(p)]
        + ["expected_cost", "p_feasible", "p_optimal", "survival_prob"]
    )
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for rec in trace.records:
            writer.writerow(
                [rec.iteration, *rec.gamma, *rec.beta, rec.expected_cost,
                 rec.p_feasible, rec.p_optimal, rec.survival_prob]
            )


def write_lagrange_csv(rows: list[tuple[float, EvalResult]], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda", "expected_cost", "p_feasible", "p_optimal", "survival"])
        for lam, res in rows:
            writer.writerow([lam, *res])


def write_ordering_csv(rows: dict[str, EvalResult], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ordering", "expected_cost", "p_feasible", "p_optimal", "survival"])
        for ordering, res in rows.items():
            writer.writerow([ordering, *res])


def write_histogram_csv(result: HistogramResult, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["state", "probability"])
        for state, prob in sorted(result.probabilities.items()):
            writer.writerow([state, prob])


def write_zeno_csv(rows: list[dict[str, float]], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "survival_empirical", "survival_analytic", "limit_error"])
        for row in rows:
            writer.writerow(
                [row["n"], row["survival_empirical"], row["survival_analytic"], row["limit_error"]]
            )


def write_sa_csv(trace, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "state", "cost", "accepted"])
        for rec in trace:
            writer.writerow([rec.step, rec.state, rec.cost, int(rec.accepted)])
