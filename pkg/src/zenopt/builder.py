"""Assembly of hybrid circuits: QAOA phase return plus per-constraint
dephasing and Zeno layers, block ordering, initial-state preparation,
execution, and complexity statistics.

Layer anatomy per repetition p: phase return with angle gamma_p over the
QAOA-compiled Ising terms; one block per DEPHASE/ZENO constraint in the
chosen ordering; a transverse mixer with angle beta_p.  Zeno blocks own the
mixing of decision qubits (Q sub-blocks of RX(beta_p/Q), each followed by a
flag projection), so the trailing global mixer covers decision qubits only
when no constraint is Zeno-assigned.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arithmetic import (
    GATE_MODE,
    ORACLE_MODE,
    CostRegisterLayout,
    _check_mode,
    build_comparator,
    build_cost_adder,
    build_uncompute,
    register_width,
)
from .errors import InputError, LayoutError, StatsUnavailableError
from .problem import (
    DEPHASE,
    QAOA,
    ZENO,
    ConstrainedBinaryProblem,
    IsingCoeffs,
    Multipliers,
    compile_qubo,
    qubo_to_ising,
    qubo_values,
)
from .statevector import (
    DIAGONAL_ORACLE,
    Gate,
    Oracle,
    Projection,
    Statevector,
    apply_gates,
    gate_cphase,
    gate_h,
    gate_phase,
    gate_rx,
    gate_rz,
    gate_rzz,
    new_state,
    project_qubit,
)

NATURAL = "natural"
ZENO_FIRST = "zeno_first"
DEPHASE_FIRST = "dephase_first"
ORDERINGS = (NATURAL, ZENO_FIRST, DEPHASE_FIRST)


@dataclass(frozen=True)
class LayerParams:
    """Angles for P layers plus the Zeno measurement count Q."""

    gamma: tuple[float, ...]
    beta: tuple[float, ...]
    q_measurements: int = 1

    def __post_init__(self):
        if len(self.gamma) != len(self.beta) or not self.gamma:
            raise InputError("gamma and beta must have equal, positive length")
        if self.q_measurements < 1:
            raise InputError("q_measurements must be >= 1")

    @property
    def p_layers(self) -> int:
        return len(self.gamma)

    @staticmethod
    def initial(p_layers: int = 1, q_measurements: int = 1) -> "LayerParams":
        return LayerParams((0.1,) * p_layers, (0.1,) * p_layers, q_measurements)


@dataclass(frozen=True)
class CircuitLayout:
    """Qubit roles: decision vars, QAOA slack bits, per-constraint registers.

    Registers of equal width are pooled: sequential blocks uncompute their
    ancillas, so constraints whose cost registers have the same width share
    physical qubits.
    """

    n_qubits: int
    decision: tuple[int, ...]
    slack: tuple[int, ...]
    registers: dict[int, CostRegisterLayout]

    @property
    def ancilla(self) -> tuple[int, ...]:
        seen: list[int] = []
        for reg in self.registers.values():
            for q in (*reg.cost_qubits, reg.flag_qubit):
                if q not in seen:
                    seen.append(q)
        return tuple(seen)


@dataclass
class HybridCircuit:
    """Ordered gate list with interleaved projection sites."""

    layout: CircuitLayout
    gates: list[Gate]
    projections: list[tuple[int, Projection]]  # (gates applied before, projection)
    ordering: str
    n_parameters: int
    mode: str


@dataclass(frozen=True)
class CircuitStats:
    non_local_gates: int
    n_qubits: int
    n_clbits: int
    depth: int
    width: int
    size: int
    n_parameters: int
    n_unitary_factors: int


def parse_assignment(text: str) -> tuple[str, ...]:
    kinds = tuple(part.strip().upper() for part in text.split(","))
    for kind in kinds:
        if kind not in (QAOA, DEPHASE, ZENO):
            raise InputError(f"unknown representation {kind!r}")
    return kinds


def _constraint_support(coeffs) -> tuple[tuple[int, ...], tuple[int, ...]]:
    vars_ = tuple(i for i, c in enumerate(coeffs) if c != 0)
    weights = tuple(int(coeffs[i]) for i in vars_)
    if any(w < 0 for w in weights):
        raise InputError("constraint coefficients must be non-negative")
    return vars_, weights


def build_layout(problem: ConstrainedBinaryProblem, assignment, qubo_n_bits: int) -> CircuitLayout:
    """Allocate decision, slack, and pooled cost-register qubits."""
    decision = tuple(range(problem.n_vars))
    slack = tuple(range(problem.n_vars, qubo_n_bits))
    registers: dict[int, CostRegisterLayout] = {}
    pool: dict[int, tuple[tuple[int, ...], int]] = {}
    next_q = qubo_n_bits
    for ci, kind in enumerate(assignment):
        if kind == QAOA:
            continue
        support, weights = _constraint_support(problem.constraints[ci].coeffs)
        width = register_width(weights)
        if width not in pool:
            cost = tuple(range(next_q, next_q + width))
            flag = next_q + width
            next_q += width + 1
            pool[width] = (cost, flag)
        cost, flag = pool[width]
        registers[ci] = CostRegisterLayout(support, cost, flag, width)
    return CircuitLayout(next_q, decision, slack, registers)


def build_phase_return(ising: IsingCoeffs, gamma: float) -> list[Gate]:
    """Gate realization of the diagonal evolution e^{-i*gamma*H}.

    The identity term is a global phase and is omitted.  RZ angles carry a
    sign flip relative to the stored spin coefficients because the spin
    variable 2x-1 is the negated Z eigenvalue of the basis state.
    """
    gates: list[Gate] = []
    for i, coeff in sorted(ising.z.items()):
        gates.append(gate_rz(i, -2.0 * gamma * coeff))
    for (i, j), coeff in sorted(ising.zz.items()):
        gates.append(gate_rzz(i, j, 2.0 * gamma * coeff))
    return gates


def _penalty_phase_gates(reg: CostRegisterLayout, bound: int, alpha: float, theta: float) -> list[Gate]:
    """Flag-controlled phases realizing e^{-i*theta*alpha*(cost-bound)} when flagged."""
    gates: list[Gate] = []
    for k, q in enumerate(reg.cost_qubits):
        gates.append(gate_cphase((reg.flag_qubit, q), -theta * alpha * float(1 << k)))
    gates.append(gate_phase(reg.flag_qubit, theta * alpha * float(bound)))
    return gates


def build_dephasing_layer(
    constraint_coeffs,
    bound: int,
    reg: CostRegisterLayout,
    alpha: float,
    theta: float,
    mode: str = GATE_MODE,
) -> list[Gate]:
    """Adder, comparator, violation-weighted dephasing, and uncompute.

    Net effect is the diagonal phase e^{-i*theta*alpha*max(0, cost-bound)}
    with all ancillas restored.  The penalty phases are per-bit scalar
    rotations in either mode; only the arithmetic blocks switch to oracles.
    """
    _check_mode(mode)
    support, weights = _constraint_support(constraint_coeffs)
    if support != reg.decision_qubits:
        raise LayoutError("register layout does not match the constraint support")
    if bound >= (1 << reg.width_m):
        return []  # bound exceeds any achievable cost: nothing to dephase
    adder = build_cost_adder(weights, reg, mode)
    comparator = build_comparator(reg, bound, mode)
    penalty = _penalty_phase_gates(reg, bound, alpha, theta)
    return adder + comparator + penalty + build_uncompute(comparator) + build_uncompute(adder)


def build_zeno_layer(
    constraint_coeffs,
    bound: int,
    reg: CostRegisterLayout,
    beta: float,
    q_measurements: int,
    mixer_qubits,
    mode: str = GATE_MODE,
) -> tuple[list[Gate], list[int]]:
    """Q sub-blocks of mixing followed by a flag projection each.

    Every sub-block mixes the decision qubits by RX(beta/Q), recomputes the
    violation flag, projects it onto 0, and uncomputes.  Returns the gate
    list and the projection positions within it.
    """
    _check_mode(mode)
    support, weights = _constraint_support(constraint_coeffs)
    if support != reg.decision_qubits:
        raise LayoutError("register layout does not match the constraint support")
    vacuous = bound >= (1 << reg.width_m)
    adder = build_cost_adder(weights, reg, mode)
    comparator = build_comparator(reg, bound, mode)
    gates: list[Gate] = []
    positions: list[int] = []
    for _ in range(q_measurements):
        gates.extend(gate_rx(q, beta / q_measurements) for q in mixer_qubits)
        if vacuous:
            continue
        gates.extend(adder)
        gates.extend(comparator)
        positions.append(len(gates))
        gates.extend(build_uncompute(comparator))
        gates.extend(build_uncompute(adder))
    return gates, positions


@dataclass(frozen=True)
class CompiledModel:
    """Compiled cost model shared by circuit building and evaluation."""

    qubo: "object"
    ising: IsingCoeffs
    layout: CircuitLayout
    cost_table: np.ndarray  # QUBO value per decision+slack basis index


@lru_cache(maxsize=128)
def compiled_model(problem: ConstrainedBinaryProblem, assignment, mult: Multipliers) -> CompiledModel:
    """Cached compilation; callers must not mutate the returned arrays."""
    qubo = compile_qubo(problem, assignment, mult)
    table = qubo_values(qubo, np.arange(1 << qubo.n_bits))
    return CompiledModel(qubo, qubo_to_ising(qubo), build_layout(problem, assignment, qubo.n_bits), table)


def _phase_return_oracle(model: CompiledModel, gamma: float) -> Gate:
    """Functional twin of the phase return: one diagonal oracle applying
    e^{-i*gamma*(cost(z) - identity)}, the same phases the gate list realizes."""
    centered = model.cost_table - model.ising.identity
    mask = (1 << model.qubo.n_bits) - 1

    def fn(idx: np.ndarray) -> np.ndarray:
        return -gamma * centered[idx & mask]

    qubits = tuple(range(model.qubo.n_bits))
    return Gate(DIAGONAL_ORACLE, qubits, oracle=Oracle("phase_return", phase_fn=fn))


def build_circuit(
    problem: ConstrainedBinaryProblem,
    assignment,
    mult: Multipliers,
    params: LayerParams,
    ordering: str = NATURAL,
    mode: str = GATE_MODE,
) -> HybridCircuit:
    """Full hybrid circuit for a representation assignment."""
    assignment = tuple(assignment)
    if len(assignment) != problem.n_constraints:
        raise InputError("assignment length must equal the number of constraints")
    if ordering not in ORDERINGS:
        raise InputError(f"ordering must be one of {ORDERINGS}, got {ordering!r}")
    _check_mode(mode)
    model = compiled_model(problem, assignment, mult)
    ising, layout = model.ising, model.layout

    dephase_idx = [ci for ci, k in enumerate(assignment) if k == DEPHASE]
    zeno_idx = [ci for ci, k in enumerate(assignment) if k == ZENO]
    if ordering == NATURAL:
        block_order = sorted(dephase_idx + zeno_idx)
    elif ordering == ZENO_FIRST:
        block_order = zeno_idx + dephase_idx
    else:
        block_order = dephase_idx + zeno_idx

    gates: list[Gate] = []
    projections: list[tuple[int, Projection]] = []
    mixer_targets = layout.slack if zeno_idx else layout.decision + layout.slack
    for p in range(params.p_layers):
        gamma, beta = params.gamma[p], params.beta[p]
        if mode == ORACLE_MODE:
            gates.append(_phase_return_oracle(model, gamma))
        else:
            gates.extend(build_phase_return(ising, gamma))
        for ci in block_order:
            con = problem.constraints[ci]
            reg = layout.registers[ci]
            if assignment[ci] == DEPHASE:
                gates.extend(
                    build_dephasing_layer(con.coeffs, con.bound, reg, mult.alpha, gamma, mode)
                )
            else:
                zgates, zpos = build_zeno_layer(
                    con.coeffs, con.bound, reg, beta, params.q_measurements, layout.decision, mode
                )
                offset = len(gates)
                gates.extend(zgates)
                projections.extend(
                    (offset + pos, Projection(reg.flag_qubit, 0)) for pos in zpos
                )
        gates.extend(gate_rx(q, beta) for q in mixer_targets)
    return HybridCircuit(layout, gates, projections, ordering, 2 * params.p_layers, mode)


def prepare_initial_state(
    problem: ConstrainedBinaryProblem,
    assignment,
    layout: CircuitLayout,
    mode: str = GATE_MODE,
) -> Statevector:
    """Uniform superposition post-selected on the Zeno-assigned constraints.

    A Hadamard wall covers decision and slack qubits; each ZENO constraint's
    flag is then computed, projected onto 0, and uncomputed, leaving an even
    superposition over its feasible subspace with clean ancillas.  The
    pre-run post-selection is state preparation, so the returned state's
    survival_prob is reset to 1: survival then tracks only the circuit's own
    mid-circuit projections.
    """
    assignment = tuple(assignment)
    state = new_state(layout.n_qubits)
    state = apply_gates(state, [gate_h(q) for q in (*layout.decision, *layout.slack)])
    for ci, kind in enumerate(assignment):
        if kind != ZENO:
            continue
        con = problem.constraints[ci]
        reg = layout.registers[ci]
        if con.bound >= (1 << reg.width_m):
            continue  # vacuous constraint keeps the full superposition
        _, weights = _constraint_support(con.coeffs)
        forward = build_cost_adder(weights, reg, mode) + build_comparator(reg, con.bound, mode)
        state = apply_gates(state, forward)
        state = project_qubit(state, reg.flag_qubit, 0)
        state = apply_gates(state, build_uncompute(forward))
    return Statevector(state.n_qubits, state.amplitudes, 1.0)


def run_circuit(circuit: HybridCircuit, state: Statevector) -> Statevector:
    """Execute gates and projections in stream order."""
    if state.n_qubits != circuit.layout.n_qubits:
        raise InputError(
            f"state has {state.n_qubits} qubits, circuit needs {circuit.layout.n_qubits}"
        )
    pos = 0
    for ppos, proj in circuit.projections:
        state = apply_gates(state, circuit.gates[pos:ppos])
        state = project_qubit(state, proj.qubit, proj.outcome)
        pos = ppos
    return apply_gates(state, circuit.gates[pos:])


def ancilla_mass(state: Statevector, layout: CircuitLayout) -> float:
    """Probability mass on branches with any cost/flag qubit not in |0>."""
    mask = 0
    for q in layout.ancilla:
        mask |= 1 << q
    if mask == 0:
        return 0.0
    idx = np.arange(state.dim, dtype=np.int64)
    return float(np.sum(state.probabilities()[(idx & mask) != 0]))


def circuit_stats(circuit: HybridCircuit) -> CircuitStats:
    """Complexity metrics over the flat gate list (GATE mode only)."""
    if circuit.mode != GATE_MODE or any(g.kind == DIAGONAL_ORACLE for g in circuit.gates):
        raise StatsUnavailableError("oracle gates have no honest gate count")
    n = circuit.layout.n_qubits
    depth_per_qubit = [0] * n
    non_local = 0
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for gate in circuit.gates:
        if len(gate.qubits) >= 2:
            non_local += 1
            root = find(gate.qubits[0])
            for q in gate.qubits[1:]:
                parent[find(q)] = root
        level = 1 + max(depth_per_qubit[q] for q in gate.qubits)
        for q in gate.qubits:
            depth_per_qubit[q] = level
    n_clbits = len(circuit.projections)
    return CircuitStats(
        non_local_gates=non_local,
        n_qubits=n,
        n_clbits=n_clbits,
        depth=max(depth_per_qubit) if circuit.gates else 0,
        width=n + n_clbits,
        size=len(circuit.gates),
        n_parameters=circuit.n_parameters,
        n_unitary_factors=len({find(q) for q in range(n)}),
    )


def circuit_to_json(circuit: HybridCircuit) -> str:
    """Stable JSON dump of the gate stream for golden tests."""
    gates = []
    for g in circuit.gates:
        entry: dict = {"kind": g.kind, "qubits": list(g.qubits)}
        if g.kind in ("RX", "RZ", "RZZ", "CPHASE"):
            entry["angle"] = g.angle
        if g.oracle is not None:
            entry["oracle"] = g.oracle.label
        gates.append(entry)
    doc = {
        "n_qubits": circuit.layout.n_qubits,
        "gates": gates,
        "projections": [
            {"position": pos, "qubit": proj.qubit, "outcome": proj.outcome}
            for pos, proj in circuit.projections
        ],
    }
    return json.dumps(doc, indent=2)
