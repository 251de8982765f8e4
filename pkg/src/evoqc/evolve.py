"""Differential-evolution learning loop over candidate circuit pairs.

Classic DE/rand/1 with binomial crossover, elitist best-record bookkeeping,
a fitness-threshold halting rule, and a stagnation-triggered stage
escalation (re-running the circuit with one more oracle query per
evaluation when progress stalls).

Determinism contract: a run is fully determined by ``(config, training
set)``.  Random draws come from per-member, per-generation substreams of
the master seed, so results do not depend on evaluation order or on any
parallelism in the fitness evaluations.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .circuit import CandidatePair, FitnessEvaluator
from .su_basis import canonicalize
from .validation import check_qubit_count

__all__ = [
    "DEConfig",
    "Population",
    "LearningRun",
    "init_population",
    "mutate",
    "crossover",
    "select",
    "step",
    "learn",
]


@dataclass(frozen=True)
class DEConfig:
    """Optimizer settings.

    The defaults were chosen empirically for reliable convergence of the
    constant-vs-balanced learning task at population size 10: a small
    crossover rate (so each trial perturbs only a few coordinates) is what
    keeps the search effective as the parameter count grows.  Large
    crossover rates (0.5 and above) stall below the halting threshold from
    two qubits upward; for four qubits and beyond, lowering
    ``crossover_rate`` further (around 0.005) is advisable.
    """

    n_pop: int = 10
    weight: float = 0.7
    crossover_rate: float = 0.02
    halt_fitness: float = 0.99
    max_iterations: int = 20000
    stagnation_window: int = 2500
    improvement_epsilon: float = 1e-4
    max_stages: int = 3
    seed: int = 0
    exclude_target: bool = True
    force_mutant_crossover: bool = False

    def __post_init__(self):
        if self.n_pop < 3:
            raise ValueError(f"population size must be >= 3, got {self.n_pop}")
        if self.exclude_target and self.n_pop < 4:
            raise ValueError(
                "population size must be >= 4 when the mutation donors exclude the "
                "target member; set exclude_target=False for n_pop = 3"
            )
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError(f"crossover rate must be in [0, 1], got {self.crossover_rate}")
        if not 0.0 < self.halt_fitness <= 1.0:
            raise ValueError(f"halting fitness must be in (0, 1], got {self.halt_fitness}")
        if self.max_iterations < 0:
            raise ValueError(f"iteration cap must be >= 0, got {self.max_iterations}")
        if self.stagnation_window < 1:
            raise ValueError(f"stagnation window must be >= 1, got {self.stagnation_window}")
        if self.max_stages < 1:
            raise ValueError(f"max stages must be >= 1, got {self.max_stages}")
        if self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj) -> "DEConfig":
        return cls(**obj)


@dataclass
class Population:
    """Current members with cached fitnesses and the best-so-far record."""

    members: list
    fitnesses: np.ndarray
    best_pair: CandidatePair
    best_fitness: float
    iteration: int = 0
    stage: int = 1


@dataclass
class LearningRun:
    """Trace and outcome of one learning trial."""

    config: DEConfig
    n: int
    seed: int
    trace: list
    completed: bool
    completion_iteration: int | None
    stages_used: int
    final_pair: CandidatePair

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "n": self.n,
            "seed": self.seed,
            "trace": [float(x) for x in self.trace],
            "completed": self.completed,
            "completion_iteration": self.completion_iteration,
            "stages_used": self.stages_used,
            "final_pair": self.final_pair.to_dict(),
        }

    @classmethod
    def from_dict(cls, obj) -> "LearningRun":
        return cls(
            config=DEConfig.from_dict(obj["config"]),
            n=int(obj["n"]),
            seed=int(obj["seed"]),
            trace=[float(x) for x in obj["trace"]],
            completed=bool(obj["completed"]),
            completion_iteration=obj["completion_iteration"],
            stages_used=int(obj["stages_used"]),
            final_pair=CandidatePair.from_dict(obj["final_pair"]),
        )


def _substream(seed, *key) -> np.random.Generator:
    """Independent generator derived from the master seed and an index key."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


def random_pair(n, rng) -> CandidatePair:
    """Candidate with both control vectors uniform on [-pi, pi)."""
    dim = 4**n - 1
    return CandidatePair(
        n=n,
        p1=rng.uniform(-np.pi, np.pi, dim),
        p3=rng.uniform(-np.pi, np.pi, dim),
    )


def init_population(cfg: DEConfig, n, score, seed_members=None) -> Population:
    """Draw the initial population and evaluate it at stage 1.

    ``score`` is a callable ``(pair, stages) -> fitness``.  ``seed_members``
    optionally replaces the first few randomly drawn members (used to start
    from known candidates).
    """
    n = check_qubit_count(n)
    rng = _substream(cfg.seed, 0)
    members = [random_pair(n, rng) for _ in range(cfg.n_pop)]
    if seed_members:
        if len(seed_members) > cfg.n_pop:
            raise ValueError(f"got {len(seed_members)} seed members for n_pop = {cfg.n_pop}")
        for i, pair in enumerate(seed_members):
            members[i] = pair
    fitnesses = np.array([score(m, 1) for m in members])
    best = int(np.argmax(fitnesses))
    return Population(
        members=members,
        fitnesses=fitnesses,
        best_pair=members[best],
        best_fitness=float(fitnesses[best]),
        iteration=0,
        stage=1,
    )


def _donor_indices(n_pop, i, rng, exclude_target):
    candidates = [j for j in range(n_pop) if not (exclude_target and j == i)]
    return rng.choice(candidates, size=3, replace=False)


def mutate(pop: Population, i, rng, weight, exclude_target=True):
    """Differential mutants for member ``i``:  p_a + weight * (p_b - p_c).

    Donor triples are drawn independently for each of the two control
    vectors; mutants are wrapped back into [-pi, pi).
    """
    n_pop = len(pop.members)
    mutants = []
    for attr in ("p1", "p3"):
        a, b, c = _donor_indices(n_pop, i, rng, exclude_target)
        pa = getattr(pop.members[a], attr)
        pb = getattr(pop.members[b], attr)
        pc = getattr(pop.members[c], attr)
        mutants.append(canonicalize(pa + weight * (pb - pc)))
    return tuple(mutants)


def crossover(parent, mutant, crossover_rate, rng, force_mutant=False) -> np.ndarray:
    """Binomial crossover: take the mutant component where R_j <= rate.

    With ``force_mutant`` a uniformly chosen component is taken from the
    mutant unconditionally (classic-DE variant; off by default).
    """
    parent = np.asarray(parent, dtype=float)
    mutant = np.asarray(mutant, dtype=float)
    if parent.shape != mutant.shape:
        raise ValueError(f"shape mismatch: parent {parent.shape}, mutant {mutant.shape}")
    R = rng.random(parent.shape[0])
    trial = np.where(R > crossover_rate, parent, mutant)
    if force_mutant:
        j = rng.integers(parent.shape[0])
        trial[j] = mutant[j]
    return trial


def select(parent: CandidatePair, trial: CandidatePair, score, parent_fitness=None):
    """Greedy selection: the trial survives only on strictly larger fitness."""
    if parent_fitness is None:
        parent_fitness = score(parent)
    trial_fitness = score(trial)
    if trial_fitness > parent_fitness:
        return trial, float(trial_fitness)
    return parent, float(parent_fitness)


def step(pop: Population, score, cfg: DEConfig) -> Population:
    """One full generation: mutate, cross over, and select every member.

    Evaluates exactly ``n_pop`` trial pairs; parents keep their cached
    fitness.  Returns a new population with the iteration count advanced.
    """
    n_pop = len(pop.members)
    members = list(pop.members)
    fitnesses = pop.fitnesses.copy()
    for i in range(n_pop):
        rng = _substream(cfg.seed, pop.iteration + 1, i)
        nu1, nu3 = mutate(pop, i, rng, cfg.weight, cfg.exclude_target)
        trial = CandidatePair(
            n=members[i].n,
            p1=crossover(members[i].p1, nu1, cfg.crossover_rate, rng, cfg.force_mutant_crossover),
            p3=crossover(members[i].p3, nu3, cfg.crossover_rate, rng, cfg.force_mutant_crossover),
        )
        members[i], fitnesses[i] = select(
            members[i],
            trial,
            lambda pair: score(pair, pop.stage),
            parent_fitness=fitnesses[i],
        )
    best = int(np.argmax(fitnesses))
    best_pair, best_fitness = pop.best_pair, pop.best_fitness
    if fitnesses[best] > best_fitness:
        best_pair, best_fitness = members[best], float(fitnesses[best])
    return Population(
        members=members,
        fitnesses=fitnesses,
        best_pair=best_pair,
        best_fitness=best_fitness,
        iteration=pop.iteration + 1,
        stage=pop.stage,
    )


def _escalate(pop: Population, score) -> Population:
    """Move to the next stage and re-score everything there.

    All cached fitnesses are invalidated; the best record is re-anchored to
    the re-scored members, so the recorded value may drop across the
    boundary.
    """
    stage = pop.stage + 1
    fitnesses = np.array([score(m, stage) for m in pop.members])
    best = int(np.argmax(fitnesses))
    return Population(
        members=list(pop.members),
        fitnesses=fitnesses,
        best_pair=pop.members[best],
        best_fitness=float(fitnesses[best]),
        iteration=pop.iteration,
        stage=stage,
    )


def learn(cfg: DEConfig, n, training, shots=None, seed_members=None) -> LearningRun:
    """Run the full learning loop on a training set.

    Iterates generations until the best fitness reaches
    ``cfg.halt_fitness`` (completed) or ``cfg.max_iterations`` is exhausted
    (reported, not an error).  If the best fitness improves by less than
    ``cfg.improvement_epsilon`` over ``cfg.stagnation_window`` consecutive
    iterations and stages remain, the stage count is escalated.

    ``trace[r]`` is the best fitness after ``r`` generations; ``trace[0]``
    reflects the initial population.
    """
    n = check_qubit_count(n)
    if training.n != n:
        raise ValueError(f"training set arity {training.n} does not match n = {n}")
    noise_rng = _substream(cfg.seed, 2) if shots is not None else None
    evaluator = FitnessEvaluator.from_training_set(training, shots=shots, rng=noise_rng)
    xi = evaluator.xi

    pop = init_population(cfg, n, xi, seed_members=seed_members)
    trace = [pop.best_fitness]
    anchor_fitness, anchor_iteration = pop.best_fitness, 0

    completed = pop.best_fitness >= cfg.halt_fitness
    while not completed and pop.iteration < cfg.max_iterations:
        stalled = (
            pop.best_fitness - anchor_fitness < cfg.improvement_epsilon
            and pop.iteration - anchor_iteration >= cfg.stagnation_window
        )
        if stalled and pop.stage < cfg.max_stages:
            pop = _escalate(pop, xi)
            anchor_fitness, anchor_iteration = pop.best_fitness, pop.iteration
        pop = step(pop, xi, cfg)
        trace.append(pop.best_fitness)
        if pop.best_fitness - anchor_fitness >= cfg.improvement_epsilon:
            anchor_fitness, anchor_iteration = pop.best_fitness, pop.iteration
        completed = pop.best_fitness >= cfg.halt_fitness

    return LearningRun(
        config=cfg,
        n=n,
        seed=cfg.seed,
        trace=trace,
        completed=completed,
        completion_iteration=pop.iteration if completed else None,
        stages_used=pop.stage,
        final_pair=pop.best_pair,
    )
