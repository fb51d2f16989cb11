import numpy as np
import pytest

from zenopt import (
    CapacityError,
    ContractError,
    EmptySubspaceError,
    Gate,
    Oracle,
    ShapeError,
    apply_gate,
    apply_gates,
    basis_string,
    expectation_diagonal,
    marginal_probabilities,
    new_state,
    project_qubit,
    sample,
)
from zenopt.statevector import (
    gate_cnot,
    gate_cphase,
    gate_h,
    gate_mcx,
    gate_phase,
    gate_rx,
    gate_rz,
    gate_rzz,
    gate_x,
)


def test_new_state_one_qubit():
    state = new_state(1)
    assert np.allclose(state.amplitudes, [1, 0])
    assert state.survival_prob == 1.0


def test_new_state_two_qubits():
    assert np.allclose(new_state(2).amplitudes, [1, 0, 0, 0])


@pytest.mark.parametrize("n", [0, 27, -3])
def test_new_state_capacity(n):
    with pytest.raises(CapacityError):
        new_state(n)


def test_hadamard_on_zero():
    state = apply_gate(new_state(1), gate_h(0))
    assert np.allclose(state.amplitudes, [0.70710678, 0.70710678])


def test_rx_pi_is_minus_i_x():
    state = apply_gate(new_state(1), gate_rx(0, np.pi))
    assert np.allclose(state.amplitudes, [0, -1j])


def test_rzz_on_00():
    state = apply_gate(new_state(2), gate_rzz(0, 1, 0.7))
    assert np.allclose(state.amplitudes[0], np.exp(-0.35j))


def test_rz_convention():
    plus = apply_gate(new_state(1), gate_h(0))
    state = apply_gate(plus, gate_rz(0, 0.9))
    expected = np.array([np.exp(-0.45j), np.exp(+0.45j)]) / np.sqrt(2)
    assert np.allclose(state.amplitudes, expected)


def test_cnot_and_mcx():
    state = apply_gates(new_state(3), [gate_x(0), gate_x(1), gate_mcx([0, 1], 2)])
    assert np.argmax(np.abs(state.amplitudes)) == 0b111
    state = apply_gates(new_state(2), [gate_x(0), gate_cnot(0, 1)])
    assert np.argmax(np.abs(state.amplitudes)) == 0b11


def test_cphase_single_qubit_is_phase_gate():
    state = apply_gates(new_state(1), [gate_x(0), gate_phase(0, 1.2)])
    assert np.allclose(state.amplitudes, [0, np.exp(1.2j)])
    # |0> branch untouched
    state = apply_gate(new_state(1), gate_phase(0, 1.2))
    assert np.allclose(state.amplitudes, [1, 0])


def test_gate_qubit_validation():
    with pytest.raises(ShapeError):
        apply_gate(new_state(2), gate_h(2))
    with pytest.raises(ShapeError):
        Gate("CNOT", (1, 1))
    with pytest.raises(ShapeError):
        Gate("NOPE", (0,))


def _random_circuit(rng, n, length=40):
    gates = []
    for _ in range(length):
        kind = rng.integers(0, 7)
        q = int(rng.integers(0, n))
        r = int(rng.integers(0, n - 1))
        r = r if r != q else n - 1
        angle = float(rng.uniform(-np.pi, np.pi))
        gates.append(
            [
                gate_h(q),
                gate_x(q),
                gate_rx(q, angle),
                gate_rz(q, angle),
                gate_rzz(q, r, angle),
                gate_cnot(q, r),
                gate_cphase((q, r), angle),
            ][kind]
        )
    return gates


def test_norm_preserved_after_random_circuit():
    rng = np.random.default_rng(11)
    state = new_state(5)
    for gate in _random_circuit(rng, 5):
        state = apply_gate(state, gate)
        assert state.norm_error() < 1e-10


def test_unitarity_roundtrip():
    rng = np.random.default_rng(7)
    gates = _random_circuit(rng, 4, length=25)
    start = apply_gates(new_state(4), [gate_h(q) for q in range(4)])
    forward = apply_gates(start, gates)
    back = apply_gates(forward, [g.inverse() for g in reversed(gates)])
    assert np.max(np.abs(back.amplitudes - start.amplitudes)) < 1e-9


def test_projection_born_rule():
    state = apply_gate(new_state(1), gate_h(0))
    projected = project_qubit(state, 0, 0)
    assert np.allclose(projected.amplitudes, [1, 0])
    assert abs(projected.survival_prob - 0.5) < 1e-12


def test_projection_unequal_weights():
    amps = np.array([np.sqrt(0.25), np.sqrt(0.75)], dtype=complex)
    from zenopt import Statevector

    state = Statevector(1, amps, 1.0)
    projected = project_qubit(state, 0, 1)
    assert np.allclose(projected.amplitudes, [0, 1])
    assert abs(projected.survival_prob - 0.75) < 1e-12


def test_projection_empty_subspace():
    state = apply_gate(new_state(1), gate_x(0))
    with pytest.raises(EmptySubspaceError):
        project_qubit(state, 0, 0)


def test_projection_idempotent():
    state = apply_gates(new_state(2), [gate_h(0), gate_h(1)])
    once = project_qubit(state, 0, 0)
    twice = project_qubit(once, 0, 0)
    assert np.allclose(once.amplitudes, twice.amplitudes)
    assert abs(twice.survival_prob / once.survival_prob - 1.0) < 1e-10


def test_survival_non_increasing():
    state = apply_gates(new_state(3), [gate_h(q) for q in range(3)])
    last = state.survival_prob
    for q in range(3):
        state = project_qubit(state, q, 0)
        assert state.survival_prob <= last
        last = state.survival_prob


def test_sampling_deterministic_state():
    counts = sample(new_state(1), 100, seed=3)
    assert counts == {"0": 100}


def test_sampling_binomial_3sigma():
    state = apply_gate(new_state(1), gate_h(0))
    counts = sample(state, 10**5, seed=7)
    sigma = np.sqrt(10**5 * 0.25)
    assert abs(counts["0"] - 50000) <= 3 * sigma
    assert sum(counts.values()) == 10**5


def test_sampling_seed_reproducible():
    state = apply_gate(new_state(1), gate_h(0))
    assert sample(state, 10**5, seed=7) == sample(state, 10**5, seed=7)


def test_sampling_law_of_large_numbers():
    rng = np.random.default_rng(5)
    state = apply_gates(new_state(4), _random_circuit(rng, 4, length=30))
    shots = 10**5
    counts = sample(state, shots, seed=9)
    probs = state.probabilities()
    for i, p in enumerate(probs):
        observed = counts.get(basis_string(i, 4), 0)
        sigma = np.sqrt(shots * p * (1 - p)) + 1e-12
        assert abs(observed - shots * p) <= 5 * sigma + 1


def test_expectation_diagonal_basics():
    assert expectation_diagonal(new_state(1), lambda z: z) == 0.0
    uniform = apply_gates(new_state(2), [gate_h(0), gate_h(1)])
    assert abs(expectation_diagonal(uniform, lambda z: z) - 1.5) < 1e-12


def test_expectation_diagonal_scalar_fallback():
    uniform = apply_gates(new_state(2), [gate_h(0), gate_h(1)])
    table = {0: 1.0, 1: 2.0, 2: 3.0, 3: 4.0}
    assert abs(expectation_diagonal(uniform, lambda z: table[z]) - 2.5) < 1e-12


def test_diagonal_oracle_phase_exact():
    rng = np.random.default_rng(2)
    state = apply_gates(new_state(3), _random_circuit(rng, 3, length=20))
    phase = Gate(
        "DIAGONAL_ORACLE",
        (0, 1, 2),
        oracle=Oracle("test", phase_fn=lambda z: 0.3 * z.astype(float)),
    )
    out = apply_gate(state, phase)
    z = np.arange(8)
    assert np.allclose(out.amplitudes, state.amplitudes * np.exp(0.3j * z))
    assert np.allclose(np.abs(out.amplitudes), np.abs(state.amplitudes))


def test_permutation_oracle_requires_inverse():
    perm = Gate(
        "DIAGONAL_ORACLE",
        (0,),
        oracle=Oracle("swap", perm_fn=lambda z: z ^ 1),
    )
    with pytest.raises(ContractError):
        perm.inverse()


def test_basis_string_msb_first():
    assert basis_string(1, 3) == "001"  # qubit 0 rightmost
    assert basis_string(4, 3) == "100"


def test_marginal_probabilities():
    state = apply_gates(new_state(3), [gate_h(0), gate_x(2)])
    probs = marginal_probabilities(state, [0, 1])
    assert np.allclose(probs, [0.5, 0.5, 0, 0])
    probs = marginal_probabilities(state, [2])
    assert np.allclose(probs, [0, 1])
