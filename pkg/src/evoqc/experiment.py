"""Monte-Carlo harness: trial ensembles, convergence statistics, and fits.

An ensemble runs many independent learning trials that differ only in
their seed (``base_seed + trial_index``).  From the ensemble come the
averaged best-fitness curve, the empirical completion-probability curve
P(r), its Gaussian summary (r_c, delta_r), and the learning-time scaling
fit r_c = A * sqrt(D) + B across problem sizes.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

import numpy as np
from joblib import Parallel, delayed

from .circuit import FitnessReport, fitness
from .evolve import DEConfig, learn
from .oracles import TrainingSet, build_training_set
from .su_basis import parameter_count

__all__ = [
    "TrialEnsemble",
    "ScalingFit",
    "run_ensemble",
    "mean_best_fitness_curve",
    "learning_probability",
    "completion_fraction",
    "gaussian_fit",
    "gaussian_cdf_fit",
    "scaling_fit",
    "verify_learned",
    "default_jobs",
]

JOBS_ENV_VAR = "EVOQC_JOBS"


def default_jobs() -> int:
    """Worker-pool size: the EVOQC_JOBS environment variable, else 1."""
    try:
        return max(1, int(os.environ.get(JOBS_ENV_VAR, "1")))
    except ValueError:
        return 1


@dataclass
class TrialEnsemble:
    """Independent learning trials sharing one configuration."""

    n: int
    cfg: DEConfig
    runs: list
    trial_count: int
    base_seed: int

    def completions(self) -> list:
        return [r.completion_iteration for r in self.runs if r.completed]


def _run_trial(cfg, n, training, trial_seed):
    return learn(replace(cfg, seed=trial_seed), n, training)


def run_ensemble(n, cfg: DEConfig, trials, base_seed, jobs=None, training=None) -> TrialEnsemble:
    """Run ``trials`` seeded learning trials (seeds ``base_seed + i``).

    Trials execute on a worker pool of size ``jobs`` (default from
    EVOQC_JOBS, else serial); results are collected in trial order, so the
    output is identical for any pool size.  ``training`` defaults to the
    standard set for ``n`` (full enumeration up to n = 3, a 64-function
    sample seeded with ``base_seed`` above that).
    """
    if trials < 1:
        raise ValueError(f"trial count must be >= 1, got {trials}")
    if jobs is None:
        jobs = default_jobs()
    if training is None:
        training = build_training_set(n, seed=base_seed)
    seeds = [base_seed + i for i in range(trials)]
    if jobs == 1:
        runs = [_run_trial(cfg, n, training, s) for s in seeds]
    else:
        runs = Parallel(n_jobs=jobs)(delayed(_run_trial)(cfg, n, training, s) for s in seeds)
    return TrialEnsemble(n=n, cfg=cfg, runs=runs, trial_count=trials, base_seed=base_seed)


def mean_best_fitness_curve(ensemble: TrialEnsemble) -> np.ndarray:
    """Per-iteration mean of best fitness over trials.

    Traces of early-completed runs are extended at their final value, so
    the curve is as long as the longest trace and non-decreasing.
    """
    if not ensemble.runs:
        raise ValueError("ensemble is empty")
    length = max(len(r.trace) for r in ensemble.runs)
    total = np.zeros(length)
    for r in ensemble.runs:
        trace = np.asarray(r.trace, dtype=float)
        total[: len(trace)] += trace
        total[len(trace):] += trace[-1]
    return total / len(ensemble.runs)


def learning_probability(ensemble: TrialEnsemble) -> np.ndarray:
    """Empirical probability that learning completed by iteration r.

    Runs that never reached the halting fitness are never counted, so the
    curve saturates below 1 when any trial hit the iteration cap.
    """
    if not ensemble.runs:
        raise ValueError("ensemble is empty")
    length = max(len(r.trace) for r in ensemble.runs)
    counts = np.zeros(length)
    for r_star in ensemble.completions():
        counts[r_star:] += 1
    return counts / len(ensemble.runs)


def completion_fraction(ensemble: TrialEnsemble) -> float:
    return len(ensemble.completions()) / len(ensemble.runs)


def gaussian_fit(ensemble: TrialEnsemble):
    """Moment estimates (r_c, delta_r) of the completion-iteration spread.

    The completion-probability curve is an integrated Gaussian to good
    approximation, so the sample mean and standard deviation (ddof=1) of
    the completion iterations estimate its two parameters directly.
    """
    completions = ensemble.completions()
    if len(completions) < 2:
        raise ValueError(f"need at least 2 completed runs, got {len(completions)}")
    arr = np.asarray(completions, dtype=float)
    return float(np.mean(arr)), float(np.std(arr, ddof=1))


def gaussian_cdf_fit(ensemble: TrialEnsemble):
    """Least-squares fit of an integrated Gaussian to P(r); diagnostic only.

    Cross-checks :func:`gaussian_fit`; uncompleted trials flatten the tail
    of P(r) and bias this estimate, so the moment estimator stays primary.
    """
    from scipy.optimize import curve_fit
    from scipy.special import ndtr

    p = learning_probability(ensemble)
    r_c0, delta0 = gaussian_fit(ensemble)
    r = np.arange(len(p), dtype=float)

    def integrated_gaussian(x, mu, sigma):
        return ndtr((x - mu) / max(sigma, 1e-9))

    popt, _ = curve_fit(integrated_gaussian, r, p, p0=[r_c0, max(delta0, 1.0)])
    return float(popt[0]), float(abs(popt[1]))


@dataclass
class ScalingFit:
    """Least-squares line r_c = A * sqrt(D) + B over problem sizes."""

    points: list  # dicts: n, D, sqrt_D, r_c, delta_r
    A: float
    B: float
    residuals: list
    r_squared: float

    def to_dict(self) -> dict:
        return {
            "points": self.points,
            "A": self.A,
            "B": self.B,
            "residuals": self.residuals,
            "r_squared": self.r_squared,
        }


def scaling_fit(ensembles) -> ScalingFit:
    """Fit mean completion iteration against sqrt(parameter count).

    Takes one ensemble per problem size (at least two sizes) and performs
    ordinary least squares of r_c on sqrt(D) with D = 2 * (4**n - 1).
    """
    points = []
    for e in sorted(ensembles, key=lambda e: e.n):
        r_c, delta_r = gaussian_fit(e)
        D = parameter_count(e.n)
        points.append(
            {"n": e.n, "D": D, "sqrt_D": float(np.sqrt(D)), "r_c": r_c, "delta_r": delta_r}
        )
    if len({pt["n"] for pt in points}) < 2:
        raise ValueError("scaling fit needs ensembles for at least two distinct sizes")
    x = np.array([pt["sqrt_D"] for pt in points])
    y = np.array([pt["r_c"] for pt in points])
    A, B = np.polyfit(x, y, 1)
    predicted = A * x + B
    residuals = y - predicted
    ss_res = float(np.sum(residuals**2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return ScalingFit(
        points=points,
        A=float(A),
        B=float(B),
        residuals=[float(v) for v in residuals],
        r_squared=r_squared,
    )


def verify_learned(pair, n, holdout, stages=1) -> FitnessReport:
    """Re-score a learned pair on held-out balanced functions.

    Builds a fresh evaluation set from the two constants plus ``holdout``
    and returns its exact-probability fitness report.
    """
    if not holdout:
        raise ValueError("holdout set is empty")
    from .oracles import constant_functions

    c0, c1 = constant_functions(n)
    training = TrainingSet(
        n=n, constants=[c0, c1], balanced=list(holdout), policy="holdout", seed=None
    )
    return fitness(pair, training, stages=stages)
