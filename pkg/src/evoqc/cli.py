"""Command-line interface: learn, sweep, fit-scaling, verify.

All outputs are flat files: JSON documents carry a ``spec_version`` tag and
a full configuration echo; CSV files are UTF-8 with a header row.  Given
the same seeds, repeated invocations produce byte-identical files
regardless of the worker-pool size.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .circuit import CandidatePair
from .evolve import DEConfig, learn
from .experiment import (
    TrialEnsemble,
    completion_fraction,
    default_jobs,
    gaussian_cdf_fit,
    gaussian_fit,
    learning_probability,
    mean_best_fitness_curve,
    run_ensemble,
    scaling_fit,
)
from .oracles import build_training_set, enumerate_balanced
from .su_basis import parameter_count

SPEC_VERSION = "1"


def _write_json(path, obj):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _add_optimizer_args(parser, defaults: DEConfig):
    parser.add_argument("--npop", type=int, default=defaults.n_pop, help="population size")
    parser.add_argument("--weight", type=float, default=defaults.weight, help="differential weight")
    parser.add_argument(
        "--crossover", type=float, default=defaults.crossover_rate, help="crossover rate"
    )
    parser.add_argument(
        "--halt", type=float, default=defaults.halt_fitness, help="halting fitness threshold"
    )
    parser.add_argument(
        "--max-iter", type=int, default=defaults.max_iterations, help="iteration cap"
    )
    parser.add_argument(
        "--stages-max", type=int, default=defaults.max_stages, help="maximum stage count"
    )
    parser.add_argument(
        "--stagnation-window",
        type=int,
        default=defaults.stagnation_window,
        help="iterations without improvement before stage escalation",
    )


def _config_from_args(args, seed) -> DEConfig:
    return DEConfig(
        n_pop=args.npop,
        weight=args.weight,
        crossover_rate=args.crossover,
        halt_fitness=args.halt,
        max_iterations=args.max_iter,
        max_stages=args.stages_max,
        stagnation_window=args.stagnation_window,
        seed=seed,
    )


def _cmd_learn(args) -> int:
    cfg = _config_from_args(args, args.seed)
    training = build_training_set(args.n, seed=args.seed)
    run = learn(cfg, args.n, training)
    doc = {"spec_version": SPEC_VERSION, **run.to_dict()}
    _write_json(args.out, doc)
    return 0


def _ensemble_doc(ensemble: TrialEnsemble) -> dict:
    cfg = ensemble.cfg.to_dict()
    cfg.pop("seed")  # per-trial seeds are base_seed + index
    completions = ensemble.completions()
    doc = {
        "spec_version": SPEC_VERSION,
        "n": ensemble.n,
        "D": parameter_count(ensemble.n),
        "sqrt_D": float(np.sqrt(parameter_count(ensemble.n))),
        "config": cfg,
        "base_seed": ensemble.base_seed,
        "trial_count": ensemble.trial_count,
        "completion_fraction": completion_fraction(ensemble),
        "completion_iterations": completions,
        "stages_used": [r.stages_used for r in ensemble.runs],
        "final_fitness": [float(r.trace[-1]) for r in ensemble.runs],
    }
    if len(completions) >= 2:
        r_c, delta_r = gaussian_fit(ensemble)
        doc["r_c"] = r_c
        doc["delta_r"] = delta_r
        try:
            cdf_r_c, cdf_delta_r = gaussian_cdf_fit(ensemble)
            doc["r_c_cdf_fit"] = cdf_r_c
            doc["delta_r_cdf_fit"] = cdf_delta_r
        except Exception:
            doc["r_c_cdf_fit"] = None
            doc["delta_r_cdf_fit"] = None
    else:
        doc["r_c"] = None
        doc["delta_r"] = None
        doc["r_c_cdf_fit"] = None
        doc["delta_r_cdf_fit"] = None
    return doc


def _cmd_sweep(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = args.jobs if args.jobs is not None else default_jobs()
    for n in range(args.n_min, args.n_max + 1):
        cfg = _config_from_args(args, args.base_seed)
        ensemble = run_ensemble(n, cfg, args.trials, args.base_seed, jobs=jobs)
        _write_json(out_dir / f"ensemble_n{n}.json", _ensemble_doc(ensemble))
        curve = mean_best_fitness_curve(ensemble)
        _write_csv(
            out_dir / f"trace_n{n}.csv",
            ["iteration", "mean_best_fitness"],
            [(i, float(v)) for i, v in enumerate(curve)],
        )
        prob = learning_probability(ensemble)
        _write_csv(
            out_dir / f"cdf_n{n}.csv",
            ["iteration", "learning_probability"],
            [(i, float(v)) for i, v in enumerate(prob)],
        )
    return 0


class _EnsembleStats:
    """Minimal stand-in for TrialEnsemble built from a sweep JSON document."""

    def __init__(self, doc):
        self.n = int(doc["n"])
        self._completions = list(doc["completion_iterations"])
        self.runs = [None] * int(doc["trial_count"])

    def completions(self):
        return self._completions


def _cmd_fit_scaling(args) -> int:
    in_dir = Path(args.in_dir)
    docs = []
    for path in sorted(in_dir.glob("ensemble_n*.json")):
        docs.append(json.loads(path.read_text(encoding="utf-8")))
    if len(docs) < 2:
        raise SystemExit(f"need at least two ensemble files in {in_dir}, found {len(docs)}")
    fit = scaling_fit([_EnsembleStats(doc) for doc in docs])
    inputs = [
        {
            "n": doc["n"],
            "base_seed": doc.get("base_seed"),
            "trial_count": doc.get("trial_count"),
            "config": doc.get("config"),
        }
        for doc in docs
    ]
    _write_json(args.out, {"spec_version": SPEC_VERSION, "inputs": inputs, **fit.to_dict()})
    if args.out != "-":
        csv_path = Path(args.out).with_suffix(".csv")
        _write_csv(
            csv_path,
            ["n", "D", "sqrtD", "r_c", "delta_r"],
            [
                (pt["n"], pt["D"], pt["sqrt_D"], pt["r_c"], pt["delta_r"])
                for pt in fit.points
            ],
        )
    return 0


def _load_pair(path) -> CandidatePair:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if "final_pair" in doc:
        doc = doc["final_pair"]
    return CandidatePair.from_dict(doc)


def _cmd_verify(args) -> int:
    from .experiment import verify_learned

    pair = _load_pair(args.params)
    if pair.n != args.n:
        raise SystemExit(f"parameter file is for n = {pair.n}, not n = {args.n}")
    if args.n <= 3:
        holdout = enumerate_balanced(args.n)
    else:
        training = build_training_set(args.n, policy="sample", seed=args.holdout_seed)
        holdout = training.holdout_balanced
    report = verify_learned(pair, args.n, holdout, stages=args.stages)
    doc = {
        "spec_version": SPEC_VERSION,
        "n": args.n,
        "holdout_seed": args.holdout_seed,
        "holdout_size": len(holdout),
        **report.to_dict(),
    }
    _write_json(args.out, doc)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="evoqc",
        description="Learn constant-vs-balanced decision circuits by differential evolution.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    defaults = DEConfig()

    p_learn = sub.add_parser("learn", help="run one learning trial, write a run JSON")
    p_learn.add_argument("--n", type=int, required=True, help="number of input bits")
    _add_optimizer_args(p_learn, defaults)
    p_learn.add_argument("--seed", type=int, default=0)
    p_learn.add_argument("--out", default="-", help="output path, or - for stdout")
    p_learn.set_defaults(func=_cmd_learn)

    p_sweep = sub.add_parser("sweep", help="run trial ensembles over a range of sizes")
    p_sweep.add_argument("--n-min", type=int, required=True)
    p_sweep.add_argument("--n-max", type=int, required=True)
    p_sweep.add_argument("--trials", type=int, required=True)
    p_sweep.add_argument("--base-seed", type=int, default=0)
    p_sweep.add_argument("--out-dir", required=True)
    p_sweep.add_argument(
        "--jobs", type=int, default=None, help=f"worker pool size (default: $EVOQC_JOBS or 1)"
    )
    _add_optimizer_args(p_sweep, defaults)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_fit = sub.add_parser("fit-scaling", help="fit r_c = A*sqrt(D) + B over sweep outputs")
    p_fit.add_argument("--in-dir", required=True, help="directory holding ensemble_n*.json")
    p_fit.add_argument("--out", default="-", help="output JSON path (CSV written alongside)")
    p_fit.set_defaults(func=_cmd_fit_scaling)

    p_verify = sub.add_parser("verify", help="re-score learned parameters on held-out functions")
    p_verify.add_argument("--params", required=True, help="run JSON or bare pair JSON")
    p_verify.add_argument("--n", type=int, required=True)
    p_verify.add_argument("--holdout-seed", type=int, default=0)
    p_verify.add_argument("--stages", type=int, default=1)
    p_verify.add_argument("--out", default="-")
    p_verify.set_defaults(func=_cmd_verify)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
