import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from evoqc.estimator import CircuitLearner
from evoqc.oracles import build_training_set


def labeled_data(n):
    ts = build_training_set(n)
    functions = ts.constants + ts.balanced
    X = np.array([f.table for f in functions])
    y = np.array(["c"] * len(ts.constants) + ["b"] * len(ts.balanced))
    return X, y


@pytest.fixture(scope="module")
def fitted():
    X, y = labeled_data(1)
    est = CircuitLearner(random_state=0)
    return est.fit(X, y), X, y


class TestFit:
    def test_learns_training_labels(self, fitted):
        est, X, y = fitted
        assert est.best_fitness_ >= 0.99
        assert est.stages_used_ == 1
        assert np.array_equal(est.predict(X), y)
        assert est.score(X, y) == 1.0

    def test_attributes(self, fitted):
        est, X, _ = fitted
        assert list(est.classes_) == ["b", "c"]
        assert est.n_qubits_ == 1
        assert est.n_features_in_ == X.shape[1]
        assert est.pair_ is est.run_.final_pair

    def test_rejects_bad_labels(self):
        X, y = labeled_data(1)
        with pytest.raises(ValueError, match="label"):
            CircuitLearner().fit(X, np.array(["x"] * len(y)))

    def test_rejects_single_class(self):
        X, y = labeled_data(1)
        with pytest.raises(ValueError):
            CircuitLearner().fit(X[y == "b"], y[y == "b"])

    def test_rejects_non_binary_tables(self):
        with pytest.raises(ValueError):
            CircuitLearner().fit(np.array([[0, 2], [1, 0]]), np.array(["c", "b"]))

    def test_rejects_bad_width(self):
        with pytest.raises(ValueError):
            CircuitLearner().fit(np.array([[0, 1, 0], [1, 0, 0]]), np.array(["c", "b"]))

    def test_deterministic_with_random_state(self):
        X, y = labeled_data(1)
        a = CircuitLearner(random_state=7, max_iterations=50).fit(X, y)
        b = CircuitLearner(random_state=7, max_iterations=50).fit(X, y)
        assert a.run_.trace == b.run_.trace


class TestPredict:
    def test_proba_rows_sum_to_one(self, fitted):
        est, X, _ = fitted
        proba = est.predict_proba(X)
        assert proba.shape == (X.shape[0], 2)
        assert np.allclose(proba.sum(axis=1), 1.0)
        assert np.all(proba >= 0)

    def test_unfitted_raises(self):
        X, _ = labeled_data(1)
        with pytest.raises(NotFittedError):
            CircuitLearner().predict(X)

    def test_width_mismatch_after_fit(self, fitted):
        est, _, _ = fitted
        with pytest.raises(ValueError):
            est.predict(np.array([[0, 1, 1, 0]]))


class TestSklearnProtocol:
    def test_get_params_roundtrip(self):
        est = CircuitLearner(weight=0.5, crossover_rate=0.1, random_state=3)
        params = est.get_params()
        assert params["weight"] == 0.5
        restored = CircuitLearner(**params)
        assert restored.get_params() == params

    def test_clone_preserves_params(self):
        est = CircuitLearner(n_pop=12, random_state=5)
        cloned = clone(est)
        assert cloned.get_params() == est.get_params()

    def test_set_params(self):
        est = CircuitLearner()
        est.set_params(halt_fitness=0.95, max_iterations=10)
        assert est.halt_fitness == 0.95
        assert est.max_iterations == 10
