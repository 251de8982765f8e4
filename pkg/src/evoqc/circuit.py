"""Three-block circuit evaluation and the fitness function.

A candidate is a pair of control vectors ``(p1, p3)``.  One circuit run on
oracle function ``x`` applies ``U3 * O_x * U1`` to the all-zeros state
``stages`` times in sequence (one oracle query per stage), then measures in
the computational basis.  Fitness rewards sending constant functions to the
all-zeros outcome and balanced functions away from it:

    xi = (P_C + (1 - P_B)) / 2

where ``P_C`` / ``P_B`` average the all-zeros probability over the constant
/ balanced training functions.  Probabilities are computed exactly from
amplitudes by default; an optional seeded shot-noise mode replaces each
probability with a binomial frequency estimate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import make_ground_state
from .oracles import BooleanFunction, TrainingSet, oracle_phases
from .su_basis import BASIS_ORDER, cached_basis, unitary_from_controls
from .validation import check_control_vector, check_qubit_count, check_unitary

__all__ = [
    "CandidatePair",
    "FitnessReport",
    "FitnessEvaluator",
    "hadamard_layer",
    "run_circuit",
    "interpret",
    "batch_ground_probs",
    "fitness",
    "fitness_of_unitaries",
]


@dataclass(frozen=True, eq=False)
class CandidatePair:
    """Control vectors for the two learnable blocks of an n-qubit circuit."""

    n: int
    p1: np.ndarray
    p3: np.ndarray

    def __post_init__(self):
        n = check_qubit_count(self.n)
        d = 2**n
        object.__setattr__(self, "p1", check_control_vector(self.p1, d=d))
        object.__setattr__(self, "p3", check_control_vector(self.p3, d=d))

    def to_dict(self) -> dict:
        return {
            "d": 2**self.n,
            "basis_order": BASIS_ORDER,
            "p1": [float(v) for v in self.p1],
            "p3": [float(v) for v in self.p3],
        }

    @classmethod
    def from_dict(cls, obj) -> "CandidatePair":
        order = obj.get("basis_order", BASIS_ORDER)
        if order != BASIS_ORDER:
            raise ValueError(f"unsupported generator ordering {order!r}")
        d = int(obj["d"])
        n = (d - 1).bit_length()
        if 2**n != d:
            raise ValueError(f"dimension {d} is not a power of two")
        return cls(n=n, p1=np.asarray(obj["p1"], float), p3=np.asarray(obj["p3"], float))


@dataclass(frozen=True)
class FitnessReport:
    """Fitness value together with its two class-averaged probabilities."""

    xi: float
    p_c_mean: float
    p_b_mean: float
    stages_used: int

    def to_dict(self) -> dict:
        return {
            "xi": self.xi,
            "p_c_mean": self.p_c_mean,
            "p_b_mean": self.p_b_mean,
            "stages_used": self.stages_used,
        }


def hadamard_layer(n) -> np.ndarray:
    """The n-fold tensor power of the Hadamard gate."""
    n = check_qubit_count(n)
    h = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)
    U = h
    for _ in range(n - 1):
        U = np.kron(U, h)
    return U


def run_circuit(pair: CandidatePair, f: BooleanFunction, stages=1) -> np.ndarray:
    """Run the staged circuit on oracle ``f`` starting from the ground state.

    Only matrix-vector products are used; the staged operator is never
    formed as a matrix power.
    """
    if f.n != pair.n:
        raise ValueError(f"function arity {f.n} does not match circuit size {pair.n}")
    stages = int(stages)
    if stages < 1:
        raise ValueError(f"stage count must be >= 1, got {stages}")
    basis = cached_basis(2**pair.n)
    U1 = unitary_from_controls(pair.p1, basis)
    U3 = unitary_from_controls(pair.p3, basis)
    phases = oracle_phases(f)
    psi = make_ground_state(pair.n)
    for _ in range(stages):
        psi = U3 @ (phases * (U1 @ psi))
    return psi


def interpret(outcome, n) -> str:
    """Map a measurement outcome to the label 'c' (all zeros) or 'b'."""
    n = check_qubit_count(n)
    outcome = int(outcome)
    if not 0 <= outcome < 2**n:
        raise ValueError(f"outcome {outcome} out of range for {n} qubits")
    return "c" if outcome == 0 else "b"


def batch_ground_probs(U1, U3, phases, stages) -> np.ndarray:
    """All-zeros outcome probability for one circuit over many oracles.

    ``phases`` holds one oracle diagonal per row; one statevector per row
    is evolved through the staged circuit.
    """
    psi = np.zeros(phases.shape, dtype=complex)
    psi[:, 0] = 1.0
    for _ in range(int(stages)):
        psi = psi @ U1.T
        psi = psi * phases
        psi = psi @ U3.T
    return np.abs(psi[:, 0]) ** 2


class FitnessEvaluator:
    """Scores candidates against a fixed collection of training functions.

    The oracle diagonals are precompiled into one array per class, so an
    evaluation costs two matrix exponentials plus a handful of small dense
    products.  Exact-probability evaluation carries no mutable state and is
    safe to call concurrently; the shot-noise mode consumes ``rng`` and is
    not.
    """

    def __init__(self, constants, balanced, shots=None, rng=None):
        if not constants or not balanced:
            raise ValueError("need at least one constant and one balanced training function")
        ns = {f.n for f in list(constants) + list(balanced)}
        if len(ns) != 1:
            raise ValueError(f"training functions mix arities: {sorted(ns)}")
        self.n = ns.pop()
        self.d = 2**self.n
        self._phases_c = np.array([oracle_phases(f) for f in constants])
        self._phases_b = np.array([oracle_phases(f) for f in balanced])
        if shots is not None and shots < 1:
            raise ValueError(f"shots must be a positive integer, got {shots}")
        self.shots = shots
        if shots is not None and rng is None:
            raise ValueError("shot-noise mode requires an rng")
        self._rng = rng

    @classmethod
    def from_training_set(cls, training: TrainingSet, shots=None, rng=None):
        return cls(training.constants, training.balanced, shots=shots, rng=rng)

    def _ground_probs(self, U1, U3, phases, stages) -> np.ndarray:
        probs = batch_ground_probs(U1, U3, phases, stages)
        if self.shots is not None:
            probs = self._rng.binomial(self.shots, np.clip(probs, 0.0, 1.0)) / self.shots
        return probs

    def _report(self, U1, U3, stages) -> FitnessReport:
        stages = int(stages)
        if stages < 1:
            raise ValueError(f"stage count must be >= 1, got {stages}")
        p_c = float(np.mean(self._ground_probs(U1, U3, self._phases_c, stages)))
        p_b = float(np.mean(self._ground_probs(U1, U3, self._phases_b, stages)))
        return FitnessReport(
            xi=(p_c + (1.0 - p_b)) / 2.0, p_c_mean=p_c, p_b_mean=p_b, stages_used=stages
        )

    def report_for_unitaries(self, U1, U3, stages=1) -> FitnessReport:
        U1 = check_unitary(U1)
        U3 = check_unitary(U3)
        if U1.shape[0] != self.d or U3.shape[0] != self.d:
            raise ValueError(
                f"unitary dimension {U1.shape[0]}x{U3.shape[0]} does not match d = {self.d}"
            )
        return self._report(U1, U3, stages)

    def report(self, pair: CandidatePair, stages=1) -> FitnessReport:
        if pair.n != self.n:
            raise ValueError(f"candidate size {pair.n} does not match training arity {self.n}")
        basis = cached_basis(self.d)
        # unitarity of the exponential map is already enforced in exp_minus_i
        U1 = unitary_from_controls(pair.p1, basis)
        U3 = unitary_from_controls(pair.p3, basis)
        return self._report(U1, U3, stages)

    def xi(self, pair: CandidatePair, stages=1) -> float:
        return self.report(pair, stages).xi


def fitness(pair: CandidatePair, training: TrainingSet, stages=1, shots=None, rng=None):
    """Fitness of a control-vector pair on a training set."""
    ev = FitnessEvaluator.from_training_set(training, shots=shots, rng=rng)
    return ev.report(pair, stages)


def fitness_of_unitaries(U1, U3, training: TrainingSet, stages=1, shots=None, rng=None):
    """Fitness of explicit unitaries, bypassing the exponential-map parametrization."""
    ev = FitnessEvaluator.from_training_set(training, shots=shots, rng=rng)
    return ev.report_for_unitaries(U1, U3, stages)
