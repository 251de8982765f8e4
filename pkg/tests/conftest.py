import numpy as np

from evoqc.circuit import CandidatePair
from evoqc.su_basis import cached_basis


def hadamard_controls(n) -> np.ndarray:
    """Control vector whose unitary is the n-fold Hadamard up to global phase.

    The n-fold Hadamard is a product of commuting single-qubit rotations by
    pi/2 around (X+Z)/sqrt(2), so the exponents add; projecting the summed
    exponent onto the generator basis (Tr(g^2) = 2) gives the coordinates.
    """
    d = 2**n
    rot = (np.array([[0, 1], [1, 0]]) + np.array([[1, 0], [0, -1]])) / np.sqrt(2)
    M = np.zeros((d, d), dtype=complex)
    for i in range(n):
        ops = [rot if j == i else np.eye(2) for j in range(n)]
        term = ops[0]
        for op in ops[1:]:
            term = np.kron(term, op)
        M += (np.pi / 2) * term
    basis = cached_basis(d)
    return np.real(np.einsum("aij,ji->a", basis, M)) / 2.0


def hadamard_pair(n) -> CandidatePair:
    p = hadamard_controls(n)
    return CandidatePair(n=n, p1=p, p3=p)
