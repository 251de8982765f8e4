import numpy as np
import pytest

from conftest import hadamard_pair

from evoqc.circuit import CandidatePair
from evoqc.evolve import (
    DEConfig,
    Population,
    crossover,
    init_population,
    learn,
    mutate,
    select,
    step,
)
from evoqc.oracles import build_training_set


def flat_score(pair, stages=1):
    return 0.5


def make_population(vectors, n=1, fitness=0.5):
    members = [CandidatePair(n=n, p1=np.asarray(v, float), p3=np.asarray(v, float)) for v in vectors]
    fitnesses = np.full(len(members), float(fitness))
    return Population(
        members=members,
        fitnesses=fitnesses,
        best_pair=members[0],
        best_fitness=float(fitness),
        iteration=0,
        stage=1,
    )


class TestDEConfig:
    def test_defaults_valid(self):
        cfg = DEConfig()
        assert cfg.n_pop == 10
        assert cfg.halt_fitness == 0.99

    def test_population_floor(self):
        with pytest.raises(ValueError):
            DEConfig(n_pop=2)

    def test_target_exclusion_needs_four(self):
        with pytest.raises(ValueError):
            DEConfig(n_pop=3)
        assert DEConfig(n_pop=3, exclude_target=False).n_pop == 3

    def test_crossover_range(self):
        with pytest.raises(ValueError):
            DEConfig(crossover_rate=1.5)

    def test_dict_roundtrip(self):
        cfg = DEConfig(seed=9, weight=0.55)
        assert DEConfig.from_dict(cfg.to_dict()) == cfg


class TestInitPopulation:
    def test_shapes_and_cache(self):
        cfg = DEConfig(seed=1)
        pop = init_population(cfg, 1, flat_score)
        assert len(pop.members) == cfg.n_pop
        assert all(m.p1.shape == (3,) and m.p3.shape == (3,) for m in pop.members)
        assert pop.fitnesses.shape == (cfg.n_pop,)
        assert pop.best_fitness == pop.fitnesses.max()

    def test_vectors_in_range(self):
        pop = init_population(DEConfig(seed=2), 2, flat_score)
        for m in pop.members:
            assert np.all(m.p1 >= -np.pi) and np.all(m.p1 < np.pi)

    def test_same_seed_same_population(self):
        a = init_population(DEConfig(seed=5), 1, flat_score)
        b = init_population(DEConfig(seed=5), 1, flat_score)
        for ma, mb in zip(a.members, b.members):
            assert np.array_equal(ma.p1, mb.p1)
            assert np.array_equal(ma.p3, mb.p3)

    def test_seed_members_replace_prefix(self):
        injected = hadamard_pair(1)
        pop = init_population(DEConfig(seed=5), 1, flat_score, seed_members=[injected])
        assert pop.members[0] is injected


class TestMutate:
    def test_identical_members_fixed_point(self):
        # p_b - p_c vanishes whenever all donors coincide
        pop = make_population([np.array([0.3, -0.2, 1.0])] * 4)
        rng = np.random.default_rng(0)
        nu1, nu3 = mutate(pop, 0, rng, weight=0.8)
        assert np.allclose(nu1, [0.3, -0.2, 1.0])
        assert np.allclose(nu3, [0.3, -0.2, 1.0])

    def test_zero_weight_returns_a_member(self):
        vectors = [np.array([x, 0.0, 0.0]) for x in (0.1, 0.2, 0.3, 0.4, 0.5)]
        pop = make_population(vectors)
        rng = np.random.default_rng(1)
        nu1, _ = mutate(pop, 0, rng, weight=0.0)
        assert any(np.allclose(nu1, v) for v in vectors[1:])

    def test_difference_arithmetic(self):
        # donors for target 0 are all drawn from {w, 0, 0}; the reachable
        # mutants are w, +W*w, and -W*w
        w = np.array([np.pi / 2, 0.0, 0.0])
        zero = np.zeros(3)
        pop = make_population([zero, w, zero, zero])
        expected = [w, 0.8 * w, -0.8 * w, zero]
        for trial_seed in range(10):
            nu1, _ = mutate(pop, 1, np.random.default_rng(trial_seed), weight=0.8)
            assert any(np.allclose(nu1, e) for e in expected)

    def test_excludes_target_index(self):
        # target's vector is unique; with exclusion it can never be a donor
        w = np.array([1.0, 1.0, 1.0])
        pop = make_population([np.zeros(3)] * 3 + [w])
        for trial_seed in range(20):
            nu1, nu3 = mutate(pop, 3, np.random.default_rng(trial_seed), weight=0.5)
            assert np.allclose(nu1, 0.0) and np.allclose(nu3, 0.0)

    def test_wraps_into_range(self):
        vectors = [np.full(3, 3.0), np.full(3, 3.0), np.full(3, 3.0), np.full(3, -3.0)]
        pop = make_population(vectors)
        for trial_seed in range(10):
            nu1, _ = mutate(pop, 0, np.random.default_rng(trial_seed), weight=0.9)
            assert np.all(nu1 >= -np.pi) and np.all(nu1 < np.pi)


class TestCrossover:
    def test_rate_one_takes_mutant(self):
        rng = np.random.default_rng(0)
        parent, mutant = np.zeros(50), np.ones(50)
        assert np.array_equal(crossover(parent, mutant, 1.0, rng), mutant)

    def test_rate_zero_keeps_parent(self):
        rng = np.random.default_rng(0)
        parent, mutant = np.zeros(50), np.ones(50)
        assert np.array_equal(crossover(parent, mutant, 0.0, rng), parent)

    def test_seeded_mixture_reproducible(self):
        parent, mutant = np.zeros(20), np.ones(20)
        a = crossover(parent, mutant, 0.5, np.random.default_rng(3))
        b = crossover(parent, mutant, 0.5, np.random.default_rng(3))
        assert np.array_equal(a, b)
        assert 0 < a.sum() < 20

    def test_forced_mutant_component(self):
        parent, mutant = np.zeros(20), np.ones(20)
        trial = crossover(parent, mutant, 0.0, np.random.default_rng(1), force_mutant=True)
        assert trial.sum() == 1.0

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            crossover(np.zeros(3), np.zeros(4), 0.5, np.random.default_rng(0))


class TestSelect:
    def setup_method(self):
        self.a = hadamard_pair(1)
        self.b = hadamard_pair(1)

    def test_better_trial_wins(self):
        winner, fit = select(self.a, self.b, lambda p: 0.9 if p is self.b else 0.5)
        assert winner is self.b and fit == 0.9

    def test_tie_keeps_parent(self):
        winner, fit = select(self.a, self.b, lambda p: 0.5)
        assert winner is self.a and fit == 0.5

    def test_worse_trial_loses(self):
        winner, fit = select(self.a, self.b, lambda p: 0.4 if p is self.b else 0.5)
        assert winner is self.a and fit == 0.5

    def test_cached_parent_fitness_used(self):
        calls = []

        def score(pair):
            calls.append(pair)
            return 0.3

        winner, fit = select(self.a, self.b, score, parent_fitness=0.5)
        assert winner is self.a and fit == 0.5
        assert calls == [self.b]


class TestStep:
    def test_population_size_and_iteration(self):
        cfg = DEConfig(seed=3)
        pop = init_population(cfg, 1, flat_score)
        nxt = step(pop, flat_score, cfg)
        assert len(nxt.members) == len(pop.members)
        assert nxt.iteration == pop.iteration + 1

    def test_flat_landscape_keeps_parents(self):
        cfg = DEConfig(seed=3)
        pop = init_population(cfg, 1, flat_score)
        nxt = step(pop, flat_score, cfg)
        for before, after in zip(pop.members, nxt.members):
            assert after is before

    def test_best_fitness_never_decreases(self):
        ts = build_training_set(1)
        from evoqc.circuit import FitnessEvaluator

        score = FitnessEvaluator.from_training_set(ts).xi
        cfg = DEConfig(seed=11, max_iterations=50)
        pop = init_population(cfg, 1, score)
        for _ in range(30):
            nxt = step(pop, score, cfg)
            assert nxt.best_fitness >= pop.best_fitness
            pop = nxt

    def test_evaluates_one_trial_per_member(self):
        cfg = DEConfig(seed=3)
        pop = init_population(cfg, 1, flat_score)
        count = [0]

        def counting_score(pair, stages=1):
            count[0] += 1
            return 0.5

        step(pop, counting_score, cfg)
        assert count[0] == cfg.n_pop


class TestLearn:
    def test_single_bit_run_completes_at_stage_one(self):
        ts = build_training_set(1)
        run = learn(DEConfig(seed=1), 1, ts)
        assert run.completed
        assert run.trace[-1] >= 0.99
        assert run.stages_used == 1
        assert run.completion_iteration == len(run.trace) - 1

    def test_trace_monotone_within_single_stage(self):
        ts = build_training_set(1)
        run = learn(DEConfig(seed=2), 1, ts)
        assert run.stages_used == 1
        assert np.all(np.diff(run.trace) >= 0)

    def test_injected_optimum_halts_immediately(self):
        ts = build_training_set(1)
        run = learn(DEConfig(seed=3), 1, ts, seed_members=[hadamard_pair(1)])
        assert run.completed
        assert run.completion_iteration == 0
        assert len(run.trace) == 1

    def test_zero_iteration_cap_reports_incomplete(self):
        ts = build_training_set(1)
        run = learn(DEConfig(seed=4, max_iterations=0), 1, ts)
        assert not run.completed
        assert run.completion_iteration is None
        assert len(run.trace) == 1

    def test_deterministic_given_seed(self):
        ts = build_training_set(1)
        a = learn(DEConfig(seed=6), 1, ts)
        b = learn(DEConfig(seed=6), 1, ts)
        assert a.trace == b.trace
        assert a.completion_iteration == b.completion_iteration
        assert np.array_equal(a.final_pair.p1, b.final_pair.p1)
        assert np.array_equal(a.final_pair.p3, b.final_pair.p3)

    def test_run_json_roundtrip(self):
        import json

        from evoqc.evolve import LearningRun

        ts = build_training_set(1)
        run = learn(DEConfig(seed=7, max_iterations=20), 1, ts)
        restored = LearningRun.from_dict(json.loads(json.dumps(run.to_dict())))
        assert restored.trace == run.trace
        assert restored.config == run.config
        assert np.array_equal(restored.final_pair.p1, run.final_pair.p1)


class TestStageEscalation:
    def test_unreachable_halt_walks_through_stages(self):
        # an exactly-1.0 threshold is never met, so each stagnation window
        # escalates until the stage budget is spent
        ts = build_training_set(1)
        cfg = DEConfig(
            seed=8,
            halt_fitness=1.0,
            stagnation_window=4,
            improvement_epsilon=2.0,  # no improvement ever counts
            max_stages=3,
            max_iterations=30,
        )
        run = learn(cfg, 1, ts)
        assert not run.completed
        assert run.stages_used == 3

    def test_escalation_rescores_members(self):
        from evoqc.evolve import _escalate

        cfg = DEConfig(seed=9)
        stage_values = {1: 0.3, 2: 0.8}
        pop = init_population(cfg, 1, lambda pair, stages: stage_values[stages])
        assert pop.best_fitness == 0.3
        escalated = _escalate(pop, lambda pair, stages: stage_values[stages])
        assert escalated.stage == 2
        assert escalated.best_fitness == 0.8
        assert np.all(escalated.fitnesses == 0.8)
        assert escalated.best_pair in escalated.members
        assert escalated.iteration == pop.iteration

    def test_default_runs_never_escalate(self):
        ts = build_training_set(1)
        for seed in range(3):
            run = learn(DEConfig(seed=seed), 1, ts)
            assert run.completed and run.stages_used == 1
