"""Classical outer loop: evaluate circuit output against the compiled cost
and search the (gamma, beta) angles with a derivative-free method.

Evaluations are exact (statevector amplitudes, no shot noise), so the same
seed and config always reproduce the same trace bit for bit.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .arithmetic import GATE_MODE
from .builder import (
    NATURAL,
    LayerParams,
    build_circuit,
    compiled_model,
    prepare_initial_state,
    run_circuit,
)
from .errors import InputError
from .problem import ConstrainedBinaryProblem, Multipliers, brute_force_solve
from .statevector import marginal_probabilities

NELDER_MEAD = "nelder_mead"
COORDINATE = "coordinate"
SEARCH_METHODS = (NELDER_MEAD, COORDINATE)


class EvalResult(NamedTuple):
    expected_cost: float
    p_feasible: float
    p_optimal: float
    survival_prob: float


@dataclass(frozen=True)
class OptimizerConfig:
    max_iters: int = 60
    exit_threshold: float = 1e-9
    search: str = NELDER_MEAD
    seed: int = 0
    init_params: LayerParams = LayerParams.initial()

    def __post_init__(self):
        if self.max_iters < 1:
            raise InputError("max_iters must be >= 1")
        if self.exit_threshold <= 0:
            raise InputError("exit_threshold must be > 0")
        if self.search not in SEARCH_METHODS:
            raise InputError(f"search must be one of {SEARCH_METHODS}")


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    gamma: tuple[float, ...]
    beta: tuple[float, ...]
    expected_cost: float
    p_feasible: float
    p_optimal: float
    survival_prob: float


@dataclass
class OptimizationTrace:
    records: list[TraceRecord]
    best_params: LayerParams
    final: EvalResult
    wall_time: float

    @property
    def best_cost(self) -> float:
        return self.final.expected_cost


class _Evaluator:
    """Caches the compiled cost table, oracle sets, and prepared initial
    state: across evaluations only the circuit angles change."""

    def __init__(self, problem, assignment, mult, ordering, mode, q_measurements):
        self.problem = problem
        self.assignment = tuple(assignment)
        self.mult = mult
        self.ordering = ordering
        self.mode = mode
        self.q_measurements = q_measurements
        model = compiled_model(problem, self.assignment, mult)
        self.qubo = model.qubo
        self.cost_table = model.cost_table
        oracle = brute_force_solve(problem)
        self.feasible = np.fromiter(oracle.feasible_indices, dtype=np.int64)
        self.optimal = np.fromiter(oracle.optimal_indices, dtype=np.int64)
        self.initial_state = prepare_initial_state(problem, self.assignment, model.layout, mode)

    def params(self, theta: np.ndarray) -> LayerParams:
        p = len(theta) // 2
        return LayerParams(tuple(theta[:p]), tuple(theta[p:]), self.q_measurements)

    def __call__(self, theta: np.ndarray) -> EvalResult:
        params = self.params(theta)
        circuit = build_circuit(
            self.problem, self.assignment, self.mult, params, self.ordering, self.mode
        )
        state = run_circuit(circuit, self.initial_state)
        model_probs = marginal_probabilities(state, range(self.qubo.n_bits))
        decision_probs = marginal_probabilities(state, range(self.problem.n_vars))
        return EvalResult(
            expected_cost=float(model_probs @ self.cost_table),
            p_feasible=float(decision_probs[self.feasible].sum()),
            p_optimal=float(decision_probs[self.optimal].sum()),
            survival_prob=state.survival_prob,
        )


def evaluate_params(
    problem: ConstrainedBinaryProblem,
    assignment,
    mult: Multipliers,
    params: LayerParams,
    ordering: str = NATURAL,
    mode: str = GATE_MODE,
) -> EvalResult:
    """Exact expectation of the compiled cost plus oracle-checked metrics.

    p_feasible / p_optimal are always measured against the brute-force
    feasible and optimal sets of the original problem, never the QUBO.
    """
    evaluator = _Evaluator(problem, assignment, mult, ordering, mode, params.q_measurements)
    theta = np.array(params.gamma + params.beta)
    return evaluator(theta)


def _record(i: int, ev: _Evaluator, theta: np.ndarray, res: EvalResult) -> TraceRecord:
    p = ev.params(theta)
    return TraceRecord(i, p.gamma, p.beta, *res)


def _initial_steps(rng: np.random.Generator, d: int) -> np.ndarray:
    """Per-coordinate simplex spread: tight for the phase angles (the compiled
    cost carries large coefficients, so useful gammas are small), wide for
    the mixer angles."""
    p = d // 2
    steps = np.empty(d)
    steps[:p] = rng.uniform(0.03, 0.08, size=p)
    steps[p:] = rng.uniform(0.25, 0.45, size=d - p)
    return steps


def _search_nelder_mead(ev, theta0, config, trace_out) -> tuple[np.ndarray, EvalResult]:
    """Simplex search; one trace record per accepted iterate."""
    rng = np.random.default_rng(config.seed)
    d = len(theta0)
    vertices = [np.asarray(theta0, dtype=float)]
    steps = _initial_steps(rng, d)
    for i in range(d):
        v = vertices[0].copy()
        v[i] += steps[i]
        vertices.append(v)

    evals: list[tuple[np.ndarray, EvalResult]] = []
    iteration = 0

    def note(theta, res):
        nonlocal iteration
        iteration += 1
        trace_out.append(_record(iteration, ev, theta, res))

    def converged() -> bool:
        if len(trace_out) < 3:
            return False
        c0, c1, c2 = (r.expected_cost for r in trace_out[-3:])
        return abs(c2 - c1) < config.exit_threshold and abs(c1 - c0) < config.exit_threshold

    # The first iterations evaluate the initial simplex, starting from the
    # configured initial point.
    for v in vertices:
        if iteration >= config.max_iters:
            break
        res = ev(v)
        evals.append((v, res))
        note(v, res)

    while iteration < config.max_iters and not converged():
        evals.sort(key=lambda t: t[1].expected_cost)
        best, worst = evals[0], evals[-1]
        second_worst = evals[-2]
        centroid = np.mean([v for v, _ in evals[:-1]], axis=0)
        reflected = centroid + (centroid - worst[0])
        fr = ev(reflected)
        if fr.expected_cost < best[1].expected_cost:
            expanded = centroid + 2.0 * (centroid - worst[0])
            fe = ev(expanded)
            new = (expanded, fe) if fe.expected_cost < fr.expected_cost else (reflected, fr)
        elif fr.expected_cost < second_worst[1].expected_cost:
            new = (reflected, fr)
        else:
            contracted = centroid + 0.5 * (worst[0] - centroid)
            fc = ev(contracted)
            if fc.expected_cost < worst[1].expected_cost:
                new = (contracted, fc)
            else:
                # Shrink toward the best vertex.
                evals = [best] + [
                    (sv, ev(sv))
                    for sv in (best[0] + 0.5 * (v - best[0]) for v, _ in evals[1:])
                ]
                accepted = min(evals[1:], key=lambda t: t[1].expected_cost)
                note(*accepted)
                continue
        evals[-1] = new
        note(*new)
    best = min(evals, key=lambda t: t[1].expected_cost)
    return best


def _search_coordinate(ev, theta0, config, trace_out) -> tuple[np.ndarray, EvalResult]:
    """Cyclic coordinate descent over a shrinking symmetric grid."""
    rng = np.random.default_rng(config.seed)
    theta = np.asarray(theta0, dtype=float)
    step = float(rng.uniform(0.15, 0.35))
    best = ev(theta)
    iteration = 1
    trace_out.append(_record(iteration, ev, theta, best))
    improved_in_cycle = False
    coord = 0
    while iteration < config.max_iters:
        candidates = [theta[coord] + k * step for k in (-2, -1, 1, 2)]
        cur_best = best
        cur_theta = theta
        for value in candidates:
            trial = theta.copy()
            trial[coord] = value
            res = ev(trial)
            if res.expected_cost < cur_best.expected_cost:
                cur_best, cur_theta = res, trial
        if cur_best.expected_cost < best.expected_cost:
            improved_in_cycle = True
        theta, best = cur_theta, cur_best
        iteration += 1
        trace_out.append(_record(iteration, ev, theta, best))
        coord = (coord + 1) % len(theta)
        if coord == 0:
            if not improved_in_cycle:
                step /= 2.0
            improved_in_cycle = False
        if len(trace_out) >= 3:
            c0, c1, c2 = (r.expected_cost for r in trace_out[-3:])
            if abs(c2 - c1) < config.exit_threshold and abs(c1 - c0) < config.exit_threshold:
                break
    return theta, best


def optimize(
    problem: ConstrainedBinaryProblem,
    assignment,
    mult: Multipliers,
    config: OptimizerConfig,
    ordering: str = NATURAL,
    mode: str = GATE_MODE,
) -> OptimizationTrace:
    """Derivative-free minimization of the expected compiled cost.

    Appends one best-seen record per iteration and stops when the best cost
    changed by less than exit_threshold over two consecutive iterations, or
    at max_iters.
    """
    start = time.perf_counter()
    ev = _Evaluator(
        problem, assignment, mult, ordering, mode, config.init_params.q_measurements
    )
    theta0 = np.array(config.init_params.gamma + config.init_params.beta)
    records: list[TraceRecord] = []
    if config.search == NELDER_MEAD:
        best_theta, best_res = _search_nelder_mead(ev, theta0, config, records)
    else:
        best_theta, best_res = _search_coordinate(ev, theta0, config, records)
    records = records[: config.max_iters]
    return OptimizationTrace(
        records=records,
        best_params=ev.params(best_theta),
        final=best_res,
        wall_time=time.perf_counter() - start,
    )
