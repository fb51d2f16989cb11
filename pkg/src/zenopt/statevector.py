"""Exact statevector simulation with projective post-selection.

Qubit 0 is the least significant bit of a basis index; basis strings are
printed most-significant qubit first.  All operations are pure: they return
new ``Statevector`` values and never mutate their arguments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import CapacityError, ContractError, EmptySubspaceError, ShapeError

MAX_QUBITS = 26

# Gate kinds. CPHASE accepts any number of qubits >= 1: with a single qubit it
# is the phase gate diag(1, e^{i*phi}); with more it phases the all-ones branch.
H = "H"
X = "X"
RX = "RX"
RZ = "RZ"
RZZ = "RZZ"
CNOT = "CNOT"
CPHASE = "CPHASE"
MCX = "MCX"
DIAGONAL_ORACLE = "DIAGONAL_ORACLE"

GATE_KINDS = frozenset({H, X, RX, RZ, RZZ, CNOT, CPHASE, MCX, DIAGONAL_ORACLE})

_SQRT1_2 = 1.0 / np.sqrt(2.0)

_index_cache: dict[int, np.ndarray] = {}
_mask_cache: dict[tuple, np.ndarray] = {}
_swap_cache: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}
_perm_cache: dict[tuple, np.ndarray] = {}


def _indices(n_qubits: int) -> np.ndarray:
    """Cached ``arange(2**n)`` used for mask-based gate application."""
    arr = _index_cache.get(n_qubits)
    if arr is None:
        arr = np.arange(1 << n_qubits, dtype=np.int64)
        _index_cache[n_qubits] = arr
    return arr


def clear_simulation_caches() -> None:
    """Drop cached selector masks, swap pairs, and permutation tables.

    Long sweeps over many distinct circuit layouts call this between rows to
    bound memory; within one layout the caches are what make repeated
    evaluation fast.
    """
    _mask_cache.clear()
    _swap_cache.clear()
    _perm_cache.clear()


def _ones_mask(n_qubits: int, bitmask: int) -> np.ndarray:
    """Cached boolean selector of basis states with all ``bitmask`` bits set."""
    key = (n_qubits, bitmask)
    sel = _mask_cache.get(key)
    if sel is None:
        idx = _indices(n_qubits)
        sel = (idx & bitmask) == bitmask
        _mask_cache[key] = sel
    return sel


def _swap_pairs(n_qubits: int, control_mask: int, target: int) -> tuple[np.ndarray, np.ndarray]:
    """Cached (src, dst) index pairs for controlled-X style swaps."""
    key = (n_qubits, control_mask, target)
    pairs = _swap_cache.get(key)
    if pairs is None:
        idx = _indices(n_qubits)
        src = idx[((idx & control_mask) == control_mask) & ((idx >> target) & 1 == 0)]
        pairs = (src, src | (1 << target))
        _swap_cache[key] = pairs
    return pairs


@dataclass(frozen=True)
class Oracle:
    """Basis-state function backing a DIAGONAL_ORACLE gate.

    ``phase_fn`` maps an array of basis indices to real phases phi(z) and the
    gate multiplies amplitude z by e^{i*phi(z)}.  ``perm_fn`` maps an array of
    basis indices to a permutation of them and the gate relabels amplitudes.
    Exactly one of the two must be set.  ``inv_perm_fn`` is required to invert
    a permutation oracle.  A hashable ``cache_key`` identifying the function's
    semantics lets equal permutation oracles share their index tables across
    rebuilt circuits.
    """

    label: str
    phase_fn: Callable[[np.ndarray], np.ndarray] | None = None
    perm_fn: Callable[[np.ndarray], np.ndarray] | None = None
    inv_perm_fn: Callable[[np.ndarray], np.ndarray] | None = None
    cache_key: tuple | None = None

    def __post_init__(self):
        if (self.phase_fn is None) == (self.perm_fn is None):
            raise ContractError("oracle must define exactly one of phase_fn/perm_fn")

    def permutation(self, n_qubits: int) -> np.ndarray:
        if self.cache_key is None:
            return np.asarray(self.perm_fn(_indices(n_qubits)), dtype=np.int64)
        key = (n_qubits, self.cache_key)
        table = _perm_cache.get(key)
        if table is None:
            table = np.asarray(self.perm_fn(_indices(n_qubits)), dtype=np.int64)
            _perm_cache[key] = table
        return table


@dataclass(frozen=True)
class Gate:
    """A single circuit operation over explicit qubit indices.

    For CNOT and MCX the last qubit is the target and the rest are controls.
    ``angle`` is in radians and only meaningful for parameterized kinds.
    Conventions fixed project-wide: RZ = diag(e^{-i a/2}, e^{+i a/2}),
    RZZ = e^{-i a/2 Z(x)Z}, RX = e^{-i a/2 X}, CPHASE phases the all-ones
    branch by e^{i a}.
    """

    kind: str
    qubits: tuple[int, ...]
    angle: float = 0.0
    oracle: Oracle | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ShapeError(f"unknown gate kind {self.kind!r}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ShapeError(f"duplicate qubit in {self.kind} gate: {self.qubits}")
        if self.kind == DIAGONAL_ORACLE and self.oracle is None:
            raise ShapeError("DIAGONAL_ORACLE gate requires an oracle")

    def inverse(self) -> "Gate":
        """Gate with the inverse action (negated angle or inverse oracle)."""
        if self.kind in (H, X, CNOT, MCX):
            return self
        if self.kind in (RX, RZ, RZZ, CPHASE):
            return Gate(self.kind, self.qubits, -self.angle)
        oracle = self.oracle
        if oracle.phase_fn is not None:
            fn = oracle.phase_fn
            return Gate(
                DIAGONAL_ORACLE,
                self.qubits,
                oracle=Oracle(oracle.label, phase_fn=lambda z, _f=fn: -_f(z)),
            )
        if oracle.inv_perm_fn is None:
            raise ContractError(f"permutation oracle {oracle.label!r} has no inverse")
        inv_key = None if oracle.cache_key is None else ("inv", oracle.cache_key)
        return Gate(
            DIAGONAL_ORACLE,
            self.qubits,
            oracle=Oracle(
                oracle.label,
                perm_fn=oracle.inv_perm_fn,
                inv_perm_fn=oracle.perm_fn,
                cache_key=inv_key,
            ),
        )


def gate_h(q: int) -> Gate:
    return Gate(H, (q,))


def gate_x(q: int) -> Gate:
    return Gate(X, (q,))


def gate_rx(q: int, angle: float) -> Gate:
    return Gate(RX, (q,), angle)


def gate_rz(q: int, angle: float) -> Gate:
    return Gate(RZ, (q,), angle)


def gate_rzz(q1: int, q2: int, angle: float) -> Gate:
    return Gate(RZZ, (q1, q2), angle)


def gate_cnot(control: int, target: int) -> Gate:
    return Gate(CNOT, (control, target))


def gate_cphase(qubits: Sequence[int], angle: float) -> Gate:
    return Gate(CPHASE, tuple(qubits), angle)


def gate_phase(q: int, angle: float) -> Gate:
    """Single-qubit phase diag(1, e^{i*angle}) as a one-qubit CPHASE."""
    return Gate(CPHASE, (q,), angle)


def gate_mcx(controls: Sequence[int], target: int) -> Gate:
    if len(controls) == 1:
        return gate_cnot(controls[0], target)
    return Gate(MCX, (*controls, target))


@dataclass(frozen=True)
class Projection:
    """Mid-circuit projective measurement post-selected on ``outcome``."""

    qubit: int
    outcome: int = 0


@dataclass(frozen=True)
class Statevector:
    """2^n complex amplitudes plus cumulative post-selection probability."""

    n_qubits: int
    amplitudes: np.ndarray
    survival_prob: float = 1.0

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm_error(self) -> float:
        return abs(float(np.sum(self.probabilities())) - 1.0)


def new_state(n_qubits: int) -> Statevector:
    """All-zeros computational basis state |0...0> on ``n_qubits`` qubits."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise CapacityError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(n_qubits, amps, 1.0)


def basis_string(index: int, n_qubits: int) -> str:
    """Basis index as a bit string, qubit 0 rightmost."""
    return format(index, f"0{n_qubits}b")


def _check_gate(gate: Gate, n_qubits: int) -> None:
    for q in gate.qubits:
        if not 0 <= q < n_qubits:
            raise ShapeError(
                f"{gate.kind} gate qubit {q} out of range for {n_qubits}-qubit state"
            )
    if gate.kind in (RX, RZ, H, X) and len(gate.qubits) != 1:
        raise ShapeError(f"{gate.kind} acts on exactly one qubit, got {gate.qubits}")
    if gate.kind == RZZ and len(gate.qubits) != 2:
        raise ShapeError(f"RZZ acts on exactly two qubits, got {gate.qubits}")
    if gate.kind == CNOT and len(gate.qubits) != 2:
        raise ShapeError(f"CNOT acts on exactly two qubits, got {gate.qubits}")
    if gate.kind == MCX and len(gate.qubits) < 2:
        raise ShapeError(f"MCX needs at least one control, got {gate.qubits}")
    if gate.kind == CPHASE and len(gate.qubits) < 1:
        raise ShapeError("CPHASE needs at least one qubit")


def _apply_inplace(amps: np.ndarray, gate: Gate, n_qubits: int) -> None:
    """Apply ``gate`` to ``amps`` in place.  Callers own the array."""
    kind = gate.kind
    if kind in (H, X, RX, RZ):
        q = gate.qubits[0]
        view = amps.reshape(-1, 2, 1 << q)
        a0 = view[:, 0, :]
        a1 = view[:, 1, :]
        if kind == H:
            t = a0.copy()
            a0 += a1
            a0 *= _SQRT1_2
            np.subtract(t, a1, out=a1)
            a1 *= _SQRT1_2
        elif kind == X:
            t = a0.copy()
            a0[...] = a1
            a1[...] = t
        elif kind == RX:
            c = np.cos(gate.angle / 2.0)
            s = -1j * np.sin(gate.angle / 2.0)
            t = a0.copy()
            a0 *= c
            a0 += s * a1
            a1 *= c
            a1 += s * t
        else:  # RZ
            a0 *= np.exp(-0.5j * gate.angle)
            a1 *= np.exp(+0.5j * gate.angle)
        return

    if kind == RZZ:
        a, b = gate.qubits
        # Phase the whole state by e^{-i a/2}, then the odd-parity branch by
        # e^{+i a} on top, using the cached single-bit selectors.
        odd = _ones_mask(n_qubits, 1 << a) ^ _ones_mask(n_qubits, 1 << b)
        amps *= np.exp(-0.5j * gate.angle)
        amps[odd] *= np.exp(1j * gate.angle)
    elif kind == CPHASE:
        mask = 0
        for q in gate.qubits:
            mask |= 1 << q
        amps[_ones_mask(n_qubits, mask)] *= np.exp(1j * gate.angle)
    elif kind in (CNOT, MCX):
        *controls, target = gate.qubits
        cmask = 0
        for q in controls:
            cmask |= 1 << q
        src, dst = _swap_pairs(n_qubits, cmask, target)
        lo = amps[src].copy()
        amps[src] = amps[dst]
        amps[dst] = lo
    elif kind == DIAGONAL_ORACLE:
        oracle = gate.oracle
        if oracle.phase_fn is not None:
            amps *= np.exp(1j * np.asarray(oracle.phase_fn(_indices(n_qubits)), dtype=np.float64))
        else:
            out = np.empty_like(amps)
            out[oracle.permutation(n_qubits)] = amps
            amps[...] = out
    else:  # pragma: no cover - guarded by GATE_KINDS
        raise ShapeError(f"unknown gate kind {kind!r}")


def apply_gate(state: Statevector, gate: Gate) -> Statevector:
    """Unitary gate application; preserves the norm to 1e-10."""
    _check_gate(gate, state.n_qubits)
    amps = state.amplitudes.copy()
    _apply_inplace(amps, gate, state.n_qubits)
    return Statevector(state.n_qubits, amps, state.survival_prob)


def apply_gates(state: Statevector, gates: Sequence[Gate]) -> Statevector:
    """Apply a gate sequence with a single amplitude-array copy."""
    amps = state.amplitudes.copy()
    for gate in gates:
        _check_gate(gate, state.n_qubits)
        _apply_inplace(amps, gate, state.n_qubits)
    return Statevector(state.n_qubits, amps, state.survival_prob)


def project_qubit(state: Statevector, qubit: int, outcome: int) -> Statevector:
    """Post-select ``qubit`` on ``outcome``, renormalize, track survival.

    Raises EmptySubspaceError when the outcome probability is at most 1e-12,
    which signals that post-selection annihilated the state.
    """
    if not 0 <= qubit < state.n_qubits:
        raise ShapeError(f"qubit {qubit} out of range")
    if outcome not in (0, 1):
        raise ShapeError(f"outcome must be 0 or 1, got {outcome}")
    bits = (_indices(state.n_qubits) >> qubit) & 1
    keep = bits == outcome
    prob = float(np.sum(np.abs(state.amplitudes[keep]) ** 2))
    if prob <= 1e-12:
        raise EmptySubspaceError(
            f"projection of qubit {qubit} onto |{outcome}> has probability {prob:.3e}"
        )
    amps = np.where(keep, state.amplitudes, 0.0) / np.sqrt(prob)
    return Statevector(state.n_qubits, amps, state.survival_prob * prob)


def sample(state: Statevector, shots: int, seed: int) -> dict[str, int]:
    """Multinomial sampling of basis strings; deterministic given ``seed``."""
    if shots < 1:
        raise ShapeError(f"shots must be >= 1, got {shots}")
    probs = state.probabilities()
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, probs)
    n = state.n_qubits
    return {basis_string(i, n): int(c) for i, c in enumerate(counts) if c > 0}


def expectation_diagonal(state: Statevector, value_fn: Callable) -> float:
    """Expectation sum_z |amp_z|^2 * value_fn(z) over basis indices.

    ``value_fn`` is preferably vectorized over an int64 index array; plain
    scalar functions are accepted and evaluated per basis state.
    """
    idx = _indices(state.n_qubits)
    try:
        vals = np.asarray(value_fn(idx), dtype=np.float64)
        if vals.shape != idx.shape:
            raise TypeError
    except TypeError:
        vals = np.array([float(value_fn(int(i))) for i in idx])
    return float(state.probabilities() @ vals)


def marginal_probabilities(state: Statevector, qubits: Sequence[int]) -> np.ndarray:
    """Probability of each joint outcome of ``qubits`` (qubits[0] = bit 0)."""
    qubits = list(qubits)
    probs = state.probabilities()
    k = len(qubits)
    if qubits == list(range(k)):  # contiguous low qubits reduce by reshape
        return probs.reshape(-1, 1 << k).sum(axis=0)
    idx = _indices(state.n_qubits)
    key = np.zeros_like(idx)
    for bit, q in enumerate(qubits):
        key |= ((idx >> q) & 1) << bit
    return np.bincount(key, weights=probs, minlength=1 << k)
