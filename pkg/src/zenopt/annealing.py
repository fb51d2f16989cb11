"""Classical simulated-annealing benchmark on the fully penalized QUBO.

The walk minimizes the same Lagrange cost the quantum pipelines compile
(all constraints QAOA-penalized, slack bits included), visiting exactly one
state per step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .problem import (
    QAOA,
    ConstrainedBinaryProblem,
    Multipliers,
    compile_qubo,
)


@dataclass(frozen=True)
class AnnealSchedule:
    t_start: float = 10.0
    t_end: float = 0.05
    steps: int = 5000
    seed: int = 0
    flips_per_step: int = 1

    def __post_init__(self):
        if not self.t_start >= self.t_end > 0:
            raise InputError("need t_start >= t_end > 0")
        if self.steps < 1:
            raise InputError("steps must be >= 1")
        if self.flips_per_step < 1:
            raise InputError("flips_per_step must be >= 1")


@dataclass(frozen=True)
class VisitRecord:
    step: int
    state: str
    cost: float
    accepted: bool


@dataclass
class AnnealResult:
    best_state: str
    best_cost: float
    visit_trace: list[VisitRecord]


def anneal(problem: ConstrainedBinaryProblem, mult: Multipliers, schedule: AnnealSchedule) -> AnnealResult:
    """Metropolis single-bit-flip walk under a geometric temperature ramp."""
    qubo = compile_qubo(problem, (QAOA,) * problem.n_constraints, mult)
    n = qubo.n_bits
    rng = np.random.default_rng(schedule.seed)
    bits = rng.integers(0, 2, size=n).astype(np.float64)

    def cost_of(b: np.ndarray) -> float:
        return float(b @ qubo.Q @ b + qubo.B @ b + qubo.const_term)

    def state_str(b: np.ndarray) -> str:
        return "".join(str(int(v)) for v in b[::-1])  # bit 0 rightmost

    cost = cost_of(bits)
    best_bits, best_cost = bits.copy(), cost
    trace: list[VisitRecord] = []
    for step in range(schedule.steps):
        if schedule.steps > 1:
            frac = step / (schedule.steps - 1)
        else:
            frac = 0.0
        temperature = schedule.t_start * (schedule.t_end / schedule.t_start) ** frac
        accepted = False
        for _ in range(schedule.flips_per_step):
            flip = int(rng.integers(0, n))
            candidate = bits.copy()
            candidate[flip] = 1.0 - candidate[flip]
            cand_cost = cost_of(candidate)
            delta = cand_cost - cost
            if delta <= 0 or rng.random() < np.exp(-delta / temperature):
                bits, cost = candidate, cand_cost
                accepted = True
                if cost < best_cost:
                    best_bits, best_cost = bits.copy(), cost
        trace.append(VisitRecord(step, state_str(bits), cost, accepted))
    return AnnealResult(state_str(best_bits), best_cost, trace)
