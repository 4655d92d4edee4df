"""Dense complex linear algebra for one to three qubits.

Everything in this module operates on plain ``numpy`` arrays of dimension
2, 4 or 8: Hamiltonians, density matrices and pure-state amplitude
vectors.  Basis convention: qubit 1 is the leftmost tensor factor, i.e.
the most significant bit of the computational-basis index.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

# Tolerances shared across the package.
HERMITIAN_ATOL = 1e-12
NORM_ATOL = 1e-12
PSD_FLOOR = -1e-12
DEGENERACY_GAP = 1e-10

VALID_DIMS = (2, 4, 8)

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


class ConvergenceError(RuntimeError):
    """The underlying eigensolver failed to converge."""


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray  # (d,) real, ascending
    eigenvectors: np.ndarray  # (d, d), column i pairs with eigenvalues[i]


class GroundState(NamedTuple):
    energy: float
    state: np.ndarray  # (d,) normalized, phase-fixed
    near_degenerate: bool  # spectral gap below DEGENERACY_GAP


def identity(dim: int) -> np.ndarray:
    if dim not in VALID_DIMS:
        raise ValueError(f"dim must be one of {VALID_DIMS}, got {dim}")
    return np.eye(dim, dtype=complex)


def check_matrix(a: np.ndarray) -> np.ndarray:
    """Validate a square complex matrix of dimension 2, 4 or 8."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] not in VALID_DIMS:
        raise ValueError(f"dim must be one of {VALID_DIMS}, got {a.shape[0]}")
    if not np.all(np.isfinite(a.view(float))):
        raise ValueError("matrix entries must be finite")
    return a


def check_hermitian(a: np.ndarray, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    a = check_matrix(a)
    dev = np.abs(a - a.conj().T).max()
    if dev > atol:
        raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3e})")
    return a


def check_state(v: np.ndarray, atol: float = NORM_ATOL) -> np.ndarray:
    """Validate a normalized pure state of 2 or 3 qubits."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.shape[0] not in (4, 8):
        raise ValueError(f"state dimension must be 4 or 8, got {v.shape[0]}")
    if not np.all(np.isfinite(v.view(float))):
        raise ValueError("state amplitudes must be finite")
    nrm = np.linalg.norm(v)
    if abs(nrm - 1.0) > atol:
        raise ValueError(f"state is not normalized (|norm - 1| = {abs(nrm - 1.0):.3e})")
    return v


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, restricted to total dimension <= 8."""
    a = check_matrix(a)
    b = check_matrix(b)
    if a.shape[0] * b.shape[0] > 8:
        raise ValueError(
            f"kron dimension overflow: {a.shape[0]} * {b.shape[0]} > 8"
        )
    return np.kron(a, b)


def hermitian_eig(h: np.ndarray) -> EigenDecomposition:
    """Full eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Deterministic for bit-identical input.  Raises ConvergenceError if the
    LAPACK driver fails to converge.
    """
    h = check_hermitian(h)
    try:
        w, u = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - hard to trigger
        raise ConvergenceError(f"eigensolver did not converge: {exc}") from exc
    return EigenDecomposition(w, u)


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude amplitude real and positive.

    Ties broken by the lowest index (np.argmax returns the first maximum).
    """
    idx = int(np.argmax(np.abs(v)))
    pivot = v[idx]
    if pivot == 0:
        return v
    return v * (pivot.conjugate() / abs(pivot))


def ground_state(h: np.ndarray) -> GroundState:
    """Lowest eigenpair of a Hamiltonian, with a near-degeneracy flag.

    The flag is raised when the gap between the two lowest eigenvalues is
    below DEGENERACY_GAP; callers decide whether to keep such samples.
    """
    w, u = hermitian_eig(h)
    state = fix_phase(u[:, 0].copy())
    gap = float(w[1] - w[0])
    return GroundState(float(w[0]), state, gap < DEGENERACY_GAP)


def partial_trace(state: np.ndarray, keep, n_qubits: int) -> np.ndarray:
    """Reduced density matrix of a pure state over the kept qubits.

    ``keep`` holds 1-based qubit indices (qubit 1 = most significant bit);
    kept qubits stay in ascending order in the result.
    """
    if n_qubits not in (2, 3):
        raise ValueError(f"n_qubits must be 2 or 3, got {n_qubits}")
    state = check_state(state)
    if state.shape[0] != 2**n_qubits:
        raise ValueError(
            f"state dimension {state.shape[0]} does not match {n_qubits} qubits"
        )
    keep = sorted(set(int(q) for q in keep))
    if not keep or any(q < 1 or q > n_qubits for q in keep):
        raise ValueError(f"keep must be a nonempty subset of 1..{n_qubits}, got {keep}")
    if len(keep) == n_qubits:
        raise ValueError("keep must be a proper subset (nothing to trace out)")
    psi = state.reshape((2,) * n_qubits)
    traced = [q - 1 for q in range(1, n_qubits + 1) if q not in keep]
    rho = np.tensordot(psi, psi.conj(), axes=(traced, traced))
    d = 2 ** len(keep)
    return rho.reshape(d, d)


def matrix_sqrt_psd(rho: np.ndarray) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues in [PSD_FLOOR, 0) are clamped to zero; anything below the
    floor is treated as a genuinely non-PSD input and rejected.
    """
    w, u = hermitian_eig(rho)
    if w[0] < PSD_FLOOR:
        raise ValueError(f"matrix is not PSD (eigenvalue {w[0]:.3e} below floor)")
    w = np.where(w < 0.0, 0.0, w)
    return (u * np.sqrt(w)) @ u.conj().T


def det2(rho: np.ndarray) -> float:
    """Determinant of a 2x2 Hermitian matrix, as a real number."""
    rho = check_matrix(rho)
    if rho.shape[0] != 2:
        raise ValueError(f"det2 requires dim 2, got {rho.shape[0]}")
    d = rho[0, 0] * rho[1, 1] - rho[0, 1] * rho[1, 0]
    if abs(d.imag) > 1e-12:
        raise ValueError(f"determinant has imaginary residue {d.imag:.3e}")
    return float(d.real)
