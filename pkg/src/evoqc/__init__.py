"""evoqc: learn quantum oracle-decision circuits by differential evolution.

The package simulates a three-block parametrized circuit (two learnable
unitaries around a phase oracle), scores candidates on labeled Boolean
functions, and optimizes the parameters with differential evolution.  A
Monte-Carlo harness studies how the learning time scales with the size of
the parameter space.
"""

from .circuit import (
    CandidatePair,
    FitnessEvaluator,
    FitnessReport,
    fitness,
    fitness_of_unitaries,
    hadamard_layer,
    interpret,
    run_circuit,
)
from .estimator import CircuitLearner
from .evolve import DEConfig, LearningRun, Population, learn
from .experiment import (
    ScalingFit,
    TrialEnsemble,
    gaussian_fit,
    learning_probability,
    mean_best_fitness_curve,
    run_ensemble,
    scaling_fit,
    verify_learned,
)
from .linalg import (
    apply_unitary,
    exp_minus_i,
    ground_projection_prob,
    hermitian_eig,
    make_ground_state,
)
from .oracles import (
    BooleanFunction,
    FunctionClass,
    TrainingSet,
    build_training_set,
    classify,
    enumerate_balanced,
    oracle_unitary,
)
from .su_basis import (
    build_basis,
    canonicalize,
    parameter_count,
    unitary_from_controls,
)

__version__ = "0.1.0"
