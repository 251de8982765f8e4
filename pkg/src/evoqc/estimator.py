"""Scikit-learn style estimator wrapping the circuit learner.

Samples are whole truth tables: ``X`` has one row per Boolean function
(0/1 entries, power-of-two width), ``y`` holds the labels ``'c'``
(constant) and ``'b'`` (balanced).  ``fit`` runs the differential-evolution
loop; ``predict`` runs the learned circuit on each function and reads the
label off the all-zeros measurement outcome.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from .circuit import batch_ground_probs
from .evolve import DEConfig, learn
from .oracles import BooleanFunction, TrainingSet, oracle_phases
from .su_basis import cached_basis, unitary_from_controls
from .validation import check_truth_tables

__all__ = ["CircuitLearner"]


class CircuitLearner(ClassifierMixin, BaseEstimator):
    """Learns a quantum circuit that labels Boolean functions 'c' or 'b'.

    Parameters mirror :class:`evoqc.evolve.DEConfig`; ``random_state``
    seeds the whole run (``None`` draws fresh entropy per fit).

    Attributes set by ``fit``:

    - ``classes_``: the label array ``['b', 'c']``.
    - ``n_qubits_``: number of input bits of the learned circuit.
    - ``pair_``: the learned control-vector pair.
    - ``run_``: the full :class:`evoqc.evolve.LearningRun`.
    - ``best_fitness_``, ``stages_used_``: convergence summary.
    """

    def __init__(
        self,
        n_pop=10,
        weight=0.7,
        crossover_rate=0.02,
        halt_fitness=0.99,
        max_iterations=20000,
        stagnation_window=2500,
        improvement_epsilon=1e-4,
        max_stages=3,
        random_state=None,
    ):
        self.n_pop = n_pop
        self.weight = weight
        self.crossover_rate = crossover_rate
        self.halt_fitness = halt_fitness
        self.max_iterations = max_iterations
        self.stagnation_window = stagnation_window
        self.improvement_epsilon = improvement_epsilon
        self.max_stages = max_stages
        self.random_state = random_state

    def _config(self) -> DEConfig:
        seed = self.random_state
        if seed is None:
            seed = int(np.random.SeedSequence().entropy % (2**63))
        return DEConfig(
            n_pop=self.n_pop,
            weight=self.weight,
            crossover_rate=self.crossover_rate,
            halt_fitness=self.halt_fitness,
            max_iterations=self.max_iterations,
            stagnation_window=self.stagnation_window,
            improvement_epsilon=self.improvement_epsilon,
            max_stages=self.max_stages,
            seed=int(seed),
        )

    @staticmethod
    def _split_labels(X, y):
        X = check_truth_tables(X)
        y = np.asarray(y)
        if y.shape[0] != X.shape[0]:
            raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]} labels")
        labels = set(np.unique(y).tolist())
        if not labels <= {"b", "c"}:
            raise ValueError(f"labels must be 'c' (constant) or 'b' (balanced), got {sorted(labels)}")
        n = (X.shape[1] - 1).bit_length()
        functions = [BooleanFunction(n, tuple(row)) for row in X]
        constants = [f for f, lab in zip(functions, y) if lab == "c"]
        balanced = [f for f, lab in zip(functions, y) if lab == "b"]
        return n, constants, balanced

    def fit(self, X, y):
        n, constants, balanced = self._split_labels(X, y)
        if not constants or not balanced:
            raise ValueError("training data must contain both 'c' and 'b' examples")
        training = TrainingSet(
            n=n, constants=constants, balanced=balanced, policy="custom", seed=None
        )
        run = learn(self._config(), n, training)
        self.classes_ = np.array(["b", "c"])
        self.n_features_in_ = X.shape[1] if hasattr(X, "shape") else len(X[0])
        self.n_qubits_ = n
        self.run_ = run
        self.pair_ = run.final_pair
        self.best_fitness_ = run.trace[-1]
        self.stages_used_ = run.stages_used
        return self

    def _check_fitted(self):
        if not hasattr(self, "pair_"):
            raise NotFittedError("this CircuitLearner instance is not fitted yet")

    def _ground_probs(self, X) -> np.ndarray:
        self._check_fitted()
        X = check_truth_tables(X)
        n = (X.shape[1] - 1).bit_length()
        if n != self.n_qubits_:
            raise ValueError(f"expected {2**self.n_qubits_}-entry truth tables, got {X.shape[1]}")
        basis = cached_basis(2**n)
        U1 = unitary_from_controls(self.pair_.p1, basis)
        U3 = unitary_from_controls(self.pair_.p3, basis)
        phases = np.array([oracle_phases(BooleanFunction(n, tuple(row))) for row in X])
        return batch_ground_probs(U1, U3, phases, self.stages_used_)

    def predict_proba(self, X) -> np.ndarray:
        """Columns follow ``classes_``: P('b'), P('c') for a single-shot readout."""
        p_c = self._ground_probs(X)
        return np.column_stack([1.0 - p_c, p_c])

    def predict(self, X) -> np.ndarray:
        p_c = self._ground_probs(X)
        return np.where(p_c >= 0.5, "c", "b")
