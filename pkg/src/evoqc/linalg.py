"""Dense complex linear algebra for statevectors and small matrices.

Everything here operates on plain numpy arrays: statevectors are complex
vectors of length ``2**n``, operators are ``d x d`` complex matrices.
Unitaries produced by this module satisfy ``max |U^dag U - I| <= 1e-10``.
"""

from __future__ import annotations

import numpy as np

from .validation import (
    HERMITIAN_ATOL,
    NORM_ATOL,
    check_hermitian,
    check_qubit_count,
    check_statevector,
    check_unitary,
)

__all__ = [
    "make_ground_state",
    "apply_unitary",
    "ground_projection_prob",
    "hermitian_eig",
    "exp_minus_i",
]


def make_ground_state(n) -> np.ndarray:
    """Return the all-zeros computational basis state on ``n`` qubits."""
    n = check_qubit_count(n)
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1.0
    return psi


def apply_unitary(U, psi) -> np.ndarray:
    """Apply a unitary to a statevector (norm is preserved by unitarity)."""
    U = np.asarray(U, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {U.shape}")
    if psi.ndim != 1 or psi.shape[0] != U.shape[1]:
        raise ValueError(f"dimension mismatch: U is {U.shape}, psi has shape {psi.shape}")
    return U @ psi


def ground_projection_prob(psi) -> float:
    """Probability of measuring the all-zeros outcome on ``psi``."""
    psi = check_statevector(psi, atol=NORM_ATOL)
    return float(abs(psi[0]) ** 2)


def hermitian_eig(H, atol=HERMITIAN_ATOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with real eigenvalues in
    ascending order and eigenvectors as the columns of a unitary matrix,
    so that ``H = V diag(w) V^dag``.
    """
    H = check_hermitian(H, atol=atol)
    w, V = np.linalg.eigh(H)
    return w, V


def exp_minus_i(H, atol=HERMITIAN_ATOL) -> np.ndarray:
    """Compute ``exp(-i H)`` for Hermitian ``H`` via eigendecomposition.

    Exact for Hermitian input up to the eigensolver's accuracy; the result
    is unitary to within the package tolerance.
    """
    w, V = hermitian_eig(H, atol=atol)
    U = (V * np.exp(-1j * w)) @ V.conj().T
    return check_unitary(U)
