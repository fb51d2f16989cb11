"""Constrained binary problems, QUBO/Ising compilation, brute-force oracle.

Problems are maximization of a linear objective subject to linear <= bound
constraints over binary variables.  Compilation negates the objective once
so everything downstream minimizes.  Bit order in basis strings: variable 0
rightmost.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import CapacityError, ContractError, InputError

QAOA = "QAOA"
DEPHASE = "DEPHASE"
ZENO = "ZENO"
REP_KINDS = (QAOA, DEPHASE, ZENO)

BRUTE_FORCE_MAX_VARS = 24


@dataclass(frozen=True)
class Constraint:
    """Linear inequality sum_i coeffs[i] * x_i <= bound."""

    coeffs: tuple[int, ...]
    bound: int
    label: str = ""


@dataclass(frozen=True)
class ConstrainedBinaryProblem:
    """Maximize objective . x subject to a list of <= constraints."""

    n_vars: int
    objective: tuple[int, ...]
    constraints: tuple[Constraint, ...]
    var_labels: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.objective) != self.n_vars:
            raise InputError("objective length must equal n_vars")
        for con in self.constraints:
            if len(con.coeffs) != self.n_vars:
                raise InputError(f"constraint {con.label!r} has wrong coefficient count")
            if con.bound < 0:
                raise InputError(f"constraint {con.label!r} has negative bound")
        if self.var_labels and len(self.var_labels) != self.n_vars:
            raise InputError("var_labels length must equal n_vars")

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)


@dataclass(frozen=True)
class Multipliers:
    """Per-constraint Lagrange weights plus the dephasing strength."""

    lambdas: tuple[float, ...]
    alpha: float

    def __post_init__(self):
        if any(lam < 0 for lam in self.lambdas) or self.alpha < 0:
            raise InputError("multipliers must be non-negative")

    @staticmethod
    def uniform(n_constraints: int, lam: float, alpha: float | None = None) -> "Multipliers":
        return Multipliers((float(lam),) * n_constraints, float(lam if alpha is None else alpha))


def default_multipliers(problem: ConstrainedBinaryProblem) -> Multipliers:
    """Single scalar for every constraint, large enough for penalty dominance."""
    lam = float(sum(abs(c) for c in problem.objective) + 1)
    return Multipliers.uniform(problem.n_constraints, lam)


def cargo_instance(weights: list[int], n_positions: int, max_weight: int) -> ConstrainedBinaryProblem:
    """Cargo-loading instance: items with weights placed on positions.

    Variable x_{i,j} (cargo i at position j) has index j * len(weights) + i.
    Constraints, in order: one total-weight bound, one per-position occupancy
    bound, one per-cargo placement bound.
    """
    if not weights:
        raise InputError("weights must be non-empty")
    if max_weight < 0:
        raise InputError("max_weight must be >= 0")
    n_cargo = len(weights)
    n_vars = n_cargo * n_positions
    objective = tuple(weights[i] for _ in range(n_positions) for i in range(n_cargo))
    labels = tuple(f"x_c{i}_p{j}" for j in range(n_positions) for i in range(n_cargo))
    constraints = [Constraint(objective, max_weight, "weight")]
    for j in range(n_positions):
        coeffs = tuple(1 if v // n_cargo == j else 0 for v in range(n_vars))
        constraints.append(Constraint(coeffs, 1, f"position_{j}"))
    for i in range(n_cargo):
        coeffs = tuple(1 if v % n_cargo == i else 0 for v in range(n_vars))
        constraints.append(Constraint(coeffs, 1, f"cargo_{i}"))
    return ConstrainedBinaryProblem(n_vars, objective, tuple(constraints), labels)


def slack_width(bound: int) -> int:
    """Number of slack bits for an inequality with the given bound."""
    return math.ceil(math.log2(bound + 1)) if bound > 0 else 0


@dataclass
class Qubo:
    """Minimization cost x^T Q x + B . x + const over decision + slack bits."""

    n_bits: int
    Q: np.ndarray
    B: np.ndarray
    const_term: float
    slack_map: dict[int, tuple[int, ...]]

    def value(self, bits: np.ndarray) -> np.ndarray:
        """Cost of each row of a (N, n_bits) 0/1 matrix."""
        qx = bits @ self.Q
        return np.einsum("ij,ij->i", qx, bits) + bits @ self.B + self.const_term


def bits_of(indices: np.ndarray, n_bits: int) -> np.ndarray:
    """(N, n_bits) 0/1 matrix for basis indices, bit 0 in column 0."""
    idx = np.asarray(indices, dtype=np.int64).reshape(-1, 1)
    return ((idx >> np.arange(n_bits, dtype=np.int64)) & 1).astype(np.float64)


def qubo_values(qubo: Qubo, indices: np.ndarray) -> np.ndarray:
    """QUBO cost of each basis index over the qubo's bit layout."""
    return qubo.value(bits_of(indices, qubo.n_bits))


def compile_qubo(problem: ConstrainedBinaryProblem, assignment, mult: Multipliers) -> Qubo:
    """Negated objective plus squared penalties for QAOA-assigned constraints.

    Each QAOA constraint with bound b gets slack bits encoding
    delta = sum_k 2^k C_k so that lambda * (a . x + delta - b)^2 penalizes any
    violation; DEPHASE/ZENO constraints contribute nothing here.
    """
    assignment = tuple(assignment)
    if len(assignment) != problem.n_constraints:
        raise InputError("assignment length must equal the number of constraints")
    if len(mult.lambdas) != problem.n_constraints:
        raise InputError("multiplier count must equal the number of constraints")
    slack_map: dict[int, tuple[int, ...]] = {}
    next_bit = problem.n_vars
    for ci, (con, kind) in enumerate(zip(problem.constraints, assignment)):
        if kind != QAOA:
            continue
        width = slack_width(con.bound)
        slack_map[ci] = tuple(range(next_bit, next_bit + width))
        next_bit += width
    n_bits = next_bit

    Q = np.zeros((n_bits, n_bits))
    B = np.zeros(n_bits)
    const = 0.0
    B[: problem.n_vars] = [-c for c in problem.objective]
    for ci, (con, kind) in enumerate(zip(problem.constraints, assignment)):
        if kind != QAOA:
            continue
        lam = mult.lambdas[ci]
        coeffs = np.zeros(n_bits)
        coeffs[: problem.n_vars] = con.coeffs
        for k, bit in enumerate(slack_map[ci]):
            coeffs[bit] = 2**k
        Q += lam * np.outer(coeffs, coeffs)
        B += -2.0 * lam * con.bound * coeffs
        const += lam * con.bound**2
    return Qubo(n_bits, Q, B, const, slack_map)


@dataclass(frozen=True)
class IsingCoeffs:
    """Diagonal Hamiltonian over spin variables z_i = 2 x_i - 1."""

    zz: dict[tuple[int, int], float] = field(default_factory=dict)
    z: dict[int, float] = field(default_factory=dict)
    identity: float = 0.0

    def value(self, indices: np.ndarray, n_bits: int) -> np.ndarray:
        idx = np.asarray(indices, dtype=np.int64)
        out = np.full(idx.shape, self.identity)
        for (i, j), coeff in self.zz.items():
            si = 2.0 * ((idx >> i) & 1) - 1.0
            sj = 2.0 * ((idx >> j) & 1) - 1.0
            out += coeff * si * sj
        for i, coeff in self.z.items():
            out += coeff * (2.0 * ((idx >> i) & 1) - 1.0)
        return out


def qubo_to_ising(qubo: Qubo) -> IsingCoeffs:
    """Exact change of variables x_i = (1 + z_i) / 2 on the QUBO cost."""
    Q, B = qubo.Q, qubo.B
    if not np.allclose(Q, Q.T, atol=1e-12):
        raise ContractError("QUBO matrix must be symmetric")
    n = qubo.n_bits
    zz: dict[tuple[int, int], float] = {}
    z: dict[int, float] = {}
    identity = qubo.const_term + float(np.sum(np.diag(Q)) / 2.0 + np.sum(B) / 2.0)
    for i in range(n):
        for j in range(i + 1, n):
            coeff = (Q[i, j] + Q[j, i]) / 4.0
            if coeff != 0.0:
                zz[(i, j)] = coeff
            identity += (Q[i, j] + Q[j, i]) / 4.0
    for i in range(n):
        coeff = (float(np.sum(Q[i, :])) + B[i]) / 2.0
        if coeff != 0.0:
            z[i] = coeff
    return IsingCoeffs(zz, z, identity)


@dataclass(frozen=True)
class BruteForceResult:
    opt_value: int
    optimal_indices: frozenset[int]
    feasible_indices: frozenset[int]
    n_vars: int

    @property
    def optimal_set(self) -> frozenset[str]:
        return frozenset(format(i, f"0{self.n_vars}b") for i in self.optimal_indices)

    @property
    def feasible_set(self) -> frozenset[str]:
        return frozenset(format(i, f"0{self.n_vars}b") for i in self.feasible_indices)


@lru_cache(maxsize=64)
def brute_force_solve(problem: ConstrainedBinaryProblem) -> BruteForceResult:
    """Exact enumeration of all 2^n assignments, the ground-truth oracle."""
    n = problem.n_vars
    if n > BRUTE_FORCE_MAX_VARS:
        raise CapacityError(f"brute force capped at {BRUTE_FORCE_MAX_VARS} vars, got {n}")
    idx = np.arange(1 << n, dtype=np.int64)
    bits = (idx.reshape(-1, 1) >> np.arange(n, dtype=np.int64)) & 1
    feasible = np.ones(len(idx), dtype=bool)
    for con in problem.constraints:
        feasible &= bits @ np.asarray(con.coeffs, dtype=np.int64) <= con.bound
    values = bits @ np.asarray(problem.objective, dtype=np.int64)
    feas_idx = idx[feasible]
    opt_value = int(values[feasible].max())
    opt_idx = feas_idx[values[feasible] == opt_value]
    return BruteForceResult(opt_value, frozenset(map(int, opt_idx)), frozenset(map(int, feas_idx)), n)


def constraint_feasible_indices(problem: ConstrainedBinaryProblem, which: list[int]) -> frozenset[int]:
    """Decision states satisfying the selected constraints (ignoring the rest)."""
    n = problem.n_vars
    if n > BRUTE_FORCE_MAX_VARS:
        raise CapacityError(f"enumeration capped at {BRUTE_FORCE_MAX_VARS} vars")
    idx = np.arange(1 << n, dtype=np.int64)
    bits = (idx.reshape(-1, 1) >> np.arange(n, dtype=np.int64)) & 1
    keep = np.ones(len(idx), dtype=bool)
    for ci in which:
        con = problem.constraints[ci]
        keep &= bits @ np.asarray(con.coeffs, dtype=np.int64) <= con.bound
    return frozenset(map(int, idx[keep]))


def problem_to_json(problem: ConstrainedBinaryProblem) -> str:
    doc = {
        "objective": list(problem.objective),
        "constraints": [
            {"coeffs": list(c.coeffs), "bound": c.bound, "label": c.label}
            for c in problem.constraints
        ],
        "labels": list(problem.var_labels),
    }
    return json.dumps(doc, indent=2)


def problem_from_json(text: str) -> ConstrainedBinaryProblem:
    try:
        doc = json.loads(text)
        objective = tuple(int(c) for c in doc["objective"])
        constraints = tuple(
            Constraint(tuple(int(a) for a in c["coeffs"]), int(c["bound"]), str(c.get("label", "")))
            for c in doc["constraints"]
        )
        labels = tuple(str(s) for s in doc.get("labels", []))
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise InputError(f"malformed problem document: {exc}") from exc
    return ConstrainedBinaryProblem(len(objective), objective, constraints, labels)


def load_problem(path: str) -> ConstrainedBinaryProblem:
    with open(path, "r", encoding="utf-8") as fh:
        return problem_from_json(fh.read())


def save_problem(problem: ConstrainedBinaryProblem, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(problem_to_json(problem))
