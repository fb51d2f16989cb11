import numpy as np
import pytest

from zenopt import (
    ContractError,
    CostRegisterLayout,
    LayoutError,
    Projection,
    Statevector,
    apply_gates,
    build_comparator,
    build_cost_adder,
    build_uncompute,
    register_width,
)
from zenopt.statevector import gate_h, gate_rz, gate_x

MODES = ("gate", "oracle")


def _basis(n, index):
    amps = np.zeros(1 << n, dtype=complex)
    amps[index] = 1.0
    return Statevector(n, amps, 1.0)


def _register_value(index, qubits):
    return sum(((index >> q) & 1) << k for k, q in enumerate(qubits))


@pytest.mark.parametrize("mode", MODES)
def test_adder_example_weights_123(mode):
    layout = CostRegisterLayout((0, 1, 2), (3, 4, 5), 6, 3)
    adder = build_cost_adder([1, 2, 3], layout, mode)
    state = apply_gates(_basis(7, 0b101), adder)
    index = int(np.argmax(np.abs(state.amplitudes)))
    assert _register_value(index, layout.cost_qubits) == 4
    assert index & 0b111 == 0b101  # decision qubits unchanged


@pytest.mark.parametrize("mode", MODES)
def test_adder_zero_weights(mode):
    layout = CostRegisterLayout((0, 1, 2), (3,), 4, 1)
    adder = build_cost_adder([0, 0, 0], layout, mode)
    state = apply_gates(apply_gates(_basis(5, 0), [gate_h(q) for q in range(3)]), adder)
    probs = state.probabilities()
    assert probs[[i for i in range(32) if (i >> 3) & 1]].sum() < 1e-12


def test_adder_overflow_is_layout_error():
    layout = CostRegisterLayout((0, 1, 2), (3, 4), 5, 2)
    with pytest.raises(LayoutError):
        build_cost_adder([1, 2, 3], layout, "gate")


def test_adder_rejects_negative_weights():
    layout = CostRegisterLayout((0,), (1, 2), 3, 2)
    with pytest.raises(LayoutError):
        build_cost_adder([-1], layout, "gate")


@pytest.mark.parametrize("mode", MODES)
@pytest.mark.parametrize("weights", [[1, 2, 3], [2, 2, 1, 5], [1, 1, 1, 1, 1, 1, 1, 1]])
def test_adder_exhaustive(mode, weights):
    n_dec = len(weights)
    width = register_width(weights)
    layout = CostRegisterLayout(
        tuple(range(n_dec)), tuple(range(n_dec, n_dec + width)), n_dec + width, width
    )
    adder = build_cost_adder(weights, layout, mode)
    n = n_dec + width + 1
    for x in range(1 << n_dec):
        state = apply_gates(_basis(n, x), adder)
        index = int(np.argmax(np.abs(state.amplitudes)))
        expected = sum(w for i, w in enumerate(weights) if (x >> i) & 1)
        assert _register_value(index, layout.cost_qubits) == expected
        assert abs(abs(state.amplitudes[index]) - 1.0) < 1e-10


@pytest.mark.parametrize("mode", MODES)
def test_adder_modes_agree_on_superposition(mode):
    layout = CostRegisterLayout((0, 1, 2), (3, 4, 5), 6, 3)
    start = apply_gates(_basis(7, 0), [gate_h(q) for q in range(3)])
    reference = apply_gates(start, build_cost_adder([1, 2, 3], layout, "gate"))
    other = apply_gates(start, build_cost_adder([1, 2, 3], layout, mode))
    assert np.max(np.abs(reference.amplitudes - other.amplitudes)) < 1e-9


@pytest.mark.parametrize("mode", MODES)
@pytest.mark.parametrize("width", [1, 2, 3, 4])
def test_comparator_exhaustive(mode, width):
    layout = CostRegisterLayout((), tuple(range(width)), width, width)
    for threshold in range(1 << width):
        comparator = build_comparator(layout, threshold, mode)
        for cost in range(1 << width):
            state = apply_gates(_basis(width + 1, cost), comparator)
            index = int(np.argmax(np.abs(state.amplitudes)))
            assert (index >> width) & 1 == (1 if cost > threshold else 0)
            assert index & ((1 << width) - 1) == cost  # register unchanged


def test_comparator_boundaries():
    layout = CostRegisterLayout((), (0, 1, 2), 3, 3)
    comparator = build_comparator(layout, 3, "gate")
    flagged = apply_gates(_basis(4, 4), comparator)
    assert (int(np.argmax(np.abs(flagged.amplitudes))) >> 3) & 1 == 1
    equal = apply_gates(_basis(4, 3), comparator)
    assert (int(np.argmax(np.abs(equal.amplitudes))) >> 3) & 1 == 0
    zero = apply_gates(_basis(4, 0), build_comparator(layout, 0, "gate"))
    assert (int(np.argmax(np.abs(zero.amplitudes))) >> 3) & 1 == 0


def test_comparator_threshold_out_of_range():
    layout = CostRegisterLayout((), (0, 1), 2, 2)
    with pytest.raises(LayoutError):
        build_comparator(layout, 4, "gate")
    with pytest.raises(LayoutError):
        build_comparator(layout, -1, "gate")


@pytest.mark.parametrize("mode", MODES)
def test_compute_uncompute_roundtrip(mode):
    layout = CostRegisterLayout((0, 1, 2), (3, 4, 5), 6, 3)
    forward = build_cost_adder([1, 2, 3], layout, mode) + build_comparator(layout, 2, mode)
    start = apply_gates(
        _basis(7, 0), [gate_h(q) for q in range(3)] + [gate_rz(0, 0.37)]
    )
    state = apply_gates(start, forward + build_uncompute(forward))
    assert np.max(np.abs(state.amplitudes - start.amplitudes)) < 1e-10
    # dirty-ancilla branches carry no amplitude at all
    mask = 0b1111000
    idx = np.arange(1 << 7)
    assert state.probabilities()[(idx & mask) != 0].sum() < 1e-10


def test_uncompute_empty():
    assert build_uncompute([]) == []


def test_uncompute_rejects_projection():
    with pytest.raises(ContractError):
        build_uncompute([gate_x(0), Projection(0, 0)])


def test_register_width():
    assert register_width([1, 2, 3]) == 3
    assert register_width([1, 2, 3, 1, 2, 3]) == 4
    assert register_width([1]) == 1
    assert register_width([0, 0]) == 1
    assert register_width([1, 1, 1]) == 2


def test_layout_disjointness_enforced():
    with pytest.raises(LayoutError):
        CostRegisterLayout((0, 1), (1, 2), 3, 2)
    with pytest.raises(LayoutError):
        CostRegisterLayout((0,), (1, 2), 3, 1)
