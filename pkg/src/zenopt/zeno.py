"""Survival probability under repeated projective measurement and the
projected-Hamiltonian limit dynamics, in dense linear algebra (hbar = 1).

Dimensions are capped at toy scale; matrix exponentials go through an
eigendecomposition so repeated projection products stay exact to machine
precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ContractError

MAX_DIM = 256


def _as_matrix(obj) -> np.ndarray:
    mat = getattr(obj, "matrix", obj)
    mat = np.asarray(mat, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {mat.shape}")
    if mat.shape[0] > MAX_DIM:
        raise CapacityError(f"dense analysis capped at dim {MAX_DIM}, got {mat.shape[0]}")
    return mat


def _check_hermitian(mat: np.ndarray, what: str) -> None:
    if np.max(np.abs(mat - mat.conj().T)) > 1e-12:
        raise ContractError(f"{what} must be Hermitian within 1e-12")


def _check_projector(mat: np.ndarray) -> None:
    _check_hermitian(mat, "projector")
    if np.max(np.abs(mat @ mat - mat)) > 1e-12:
        raise ContractError("projector must satisfy P @ P = P within 1e-12")


@dataclass(frozen=True)
class DenseHamiltonian:
    """Hermitian matrix in energy units."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = _as_matrix(self.matrix)
        _check_hermitian(mat, "Hamiltonian")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Projector:
    """Orthogonal projection operator."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = _as_matrix(self.matrix)
        _check_projector(mat)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def expm_hermitian(hamiltonian, t: float) -> np.ndarray:
    """exp(-i H t) for Hermitian H via eigendecomposition."""
    mat = _as_matrix(hamiltonian)
    _check_hermitian(mat, "Hamiltonian")
    evals, vecs = np.linalg.eigh(mat)
    return (vecs * np.exp(-1j * evals * t)) @ vecs.conj().T


def _state(psi0, dim: int) -> np.ndarray:
    psi = np.asarray(psi0, dtype=np.complex128).reshape(-1)
    if psi.shape != (dim,):
        raise ContractError(f"state must have dimension {dim}, got {psi.shape}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-9:
        raise ContractError(f"state must be normalized, |psi| = {norm}")
    return psi


def survival_analytic(hamiltonian, psi0, t: float, n_measurements: int) -> float:
    """Second-order survival estimate 1 - t * (t/N) * Theta^2.

    Theta is the energy variance <H^2> - <H>^2 in the initial state.  This is
    the small-interval expansion taken at face value, so the result is not
    clamped and can drop below 0 for long times.
    """
    mat = _as_matrix(hamiltonian)
    _check_hermitian(mat, "Hamiltonian")
    if n_measurements < 1:
        raise ContractError("n_measurements must be >= 1")
    psi = _state(psi0, mat.shape[0])
    h_psi = mat @ psi
    mean = np.vdot(psi, h_psi).real
    second = np.vdot(h_psi, h_psi).real  # <H^2> since H is Hermitian
    theta = second - mean**2
    eps = t / n_measurements
    return float(1.0 - t * eps * theta**2)


def survival_empirical(hamiltonian, projector, psi0, t: float, n_measurements: int) -> float:
    """Exact survival ||(P exp(-i H t/N))^N psi0||^2.

    Requires P psi0 = psi0: survival is measured for a state starting inside
    the projected subspace.
    """
    mat = _as_matrix(hamiltonian)
    _check_hermitian(mat, "Hamiltonian")
    proj = _as_matrix(projector)
    _check_projector(proj)
    if n_measurements < 1:
        raise ContractError("n_measurements must be >= 1")
    psi = _state(psi0, mat.shape[0])
    if np.linalg.norm(proj @ psi - psi) > 1e-10:
        raise ContractError("initial state must lie inside the projected subspace")
    step = expm_hermitian(mat, t / n_measurements)
    vec = psi
    for _ in range(n_measurements):
        vec = proj @ (step @ vec)
    return float(np.linalg.norm(vec) ** 2)


def zeno_hamiltonian(hamiltonian, projector) -> DenseHamiltonian:
    """Generator P H P of the dynamics inside the measured subspace."""
    mat = _as_matrix(hamiltonian)
    _check_hermitian(mat, "Hamiltonian")
    proj = _as_matrix(projector)
    _check_projector(proj)
    return DenseHamiltonian(proj @ mat @ proj)


def zeno_limit_error(hamiltonian, projector, psi0, t: float, n_measurements: int) -> float:
    """Distance of the N-measurement product from its N -> infinity limit.

    Returns ||(P exp(-i H t/N))^N psi0 - P exp(-i P H P t) psi0||.
    """
    mat = _as_matrix(hamiltonian)
    _check_hermitian(mat, "Hamiltonian")
    proj = _as_matrix(projector)
    _check_projector(proj)
    if n_measurements < 1:
        raise ContractError("n_measurements must be >= 1")
    psi = _state(psi0, mat.shape[0])
    step = expm_hermitian(mat, t / n_measurements)
    vec = psi
    for _ in range(n_measurements):
        vec = proj @ (step @ vec)
    limit = proj @ (expm_hermitian(proj @ mat @ proj, t) @ psi)
    return float(np.linalg.norm(vec - limit))
