# Build the hybrid circuits: every constraint either penalized in the phase
# return (QAOA), dephased through a computed violation flag (DEPHASE), or
# pinned by repeated flag measurements (ZENO).

import numpy as np

from zenopt import (
    LayerParams,
    Multipliers,
    build_circuit,
    cargo_instance,
    circuit_stats,
    marginal_probabilities,
    prepare_initial_state,
    run_circuit,
    state_visit_histogram,
)

problem = cargo_instance([1, 2, 3], 2, 3)
mult = Multipliers.uniform(6, 13.0)
params = LayerParams(gamma=(0.1,), beta=(0.2,), q_measurements=2)

for label, assignment in [
    ("all QAOA", ("QAOA",) * 6),
    ("all DEPHASE", ("DEPHASE",) * 6),
    ("all ZENO", ("ZENO",) * 6),
    ("weight in ZENO", ("ZENO",) + ("QAOA",) * 5),
]:
    circuit = build_circuit(problem, assignment, mult, params)
    stats = circuit_stats(circuit)
    state = prepare_initial_state(problem, assignment, circuit.layout)
    out = run_circuit(circuit, state)
    print(
        f"{label:15s} qubits={stats.n_qubits:2d} non_local={stats.non_local_gates:3d} "
        f"depth={stats.depth:3d} projections={stats.n_clbits} "
        f"survival={out.survival_prob:.4f}"
    )

# The weight-in-ZENO pre-run keeps only placements within the weight budget:
assignment = ("ZENO",) + ("QAOA",) * 5
circuit = build_circuit(problem, assignment, mult, params)
state = prepare_initial_state(problem, assignment, circuit.layout)
marginal = marginal_probabilities(state, range(6))
print("pre-selected support size:", int(np.sum(marginal > 1e-12)), "of 64")

# Visit histograms show every pipeline exploring the whole solution space.
hist = state_visit_histogram(problem, ("QAOA",) * 6, mult, params)
top = sorted(hist.probabilities.items(), key=lambda kv: -kv[1])[:5]
print("most visited decision states (all QAOA):")
for string, prob in top:
    print(f"  |{string}>  p={prob:.4f}")
