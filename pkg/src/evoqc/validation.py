"""Input validation helpers shared across the package.

All helpers return validated (and, where needed, converted) numpy arrays
so callers can rely on dtype and shape afterwards.
"""

from __future__ import annotations

import numpy as np

MAX_QUBITS = 12

UNITARY_ATOL = 1e-10
HERMITIAN_ATOL = 1e-12
NORM_ATOL = 1e-10


def check_qubit_count(n) -> int:
    """Validate a qubit count against the supported dense-simulation range."""
    n = int(n)
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}], got {n}")
    return n


def check_statevector(psi, atol=NORM_ATOL) -> np.ndarray:
    """Validate a normalized statevector of power-of-two length."""
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ValueError(f"statevector must be 1-d, got shape {psi.shape}")
    d = psi.shape[0]
    if d < 2 or d & (d - 1):
        raise ValueError(f"statevector length must be a power of two >= 2, got {d}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > atol:
        raise ValueError(f"statevector norm {norm} deviates from 1 by more than {atol}")
    return psi


def check_hermitian(H, atol=HERMITIAN_ATOL) -> np.ndarray:
    """Validate a square Hermitian matrix within ``atol`` elementwise."""
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    dev = np.max(np.abs(H - H.conj().T))
    if dev > atol:
        raise ValueError(f"matrix is not Hermitian: max |H - H^dag| = {dev:g} > {atol:g}")
    return H


def check_unitary(U, atol=UNITARY_ATOL) -> np.ndarray:
    """Validate a square unitary matrix: max |U^dag U - I| <= ``atol``."""
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {U.shape}")
    d = U.shape[0]
    dev = np.max(np.abs(U.conj().T @ U - np.eye(d)))
    if dev > atol:
        raise ValueError(f"matrix is not unitary: max |U^dag U - I| = {dev:g} > {atol:g}")
    return U


def check_control_vector(p, d=None) -> np.ndarray:
    """Validate a real control vector; with ``d`` given, require length d**2 - 1."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise ValueError(f"control vector must be 1-d, got shape {p.shape}")
    if d is not None and p.shape[0] != d * d - 1:
        raise ValueError(
            f"control vector for dimension {d} must have length {d * d - 1}, got {p.shape[0]}"
        )
    return p


def check_truth_tables(X) -> np.ndarray:
    """Validate a matrix whose rows are 0/1 truth tables of power-of-two width."""
    X = np.asarray(X)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-d array of truth tables, got shape {X.shape}")
    width = X.shape[1]
    if width < 2 or width & (width - 1):
        raise ValueError(f"truth-table width must be a power of two >= 2, got {width}")
    Xi = X.astype(int)
    if np.any((Xi != 0) & (Xi != 1)) or not np.allclose(X, Xi):
        raise ValueError("truth tables must contain only 0/1 entries")
    return Xi
