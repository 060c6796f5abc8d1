"""Command line front end: run experiments, infer posteriors, inspect files.

Subcommands: run, infer, validate, show.  Exit codes: 0 success, 1 usage,
2 configuration error, 3 data error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .baselines import imitator
from .bench import EXPERIMENTS, l1_loss, run_experiment
from .config import ConfigError, load_config
from .io import DataError, read_demonstrations
from .mdp import DegeneratePosteriorError, Mdp, RewardFunction
from .mtpo import MtpoResult, mtpo_mc, posterior_value_estimate
from .mtpp import PosteriorEnsemble, mtpp_mc, mtpp_mh, posterior_policy
from .priors import (
    DirichletRewardPrior,
    GammaHyperprior,
    OptimalityPrior,
    PolicyDirichletPrior,
)
from .tasks import ChainSpec, chain_transition

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

MODELS = ("mtpp-mc", "mtpp-mh", "mtpo-mc")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; route through main instead
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="multitask-irl",
                     description="Multitask reward inference from demonstrations.")
    commands = parser.add_subparsers(dest="command", metavar="command")

    run = commands.add_parser("run", help="run an experiment template", add_help=True)
    run.add_argument("--config", required=True, help="experiment configuration file")
    run.add_argument("--seed", type=int, default=None, help="override the config seed")
    run.add_argument("--out", default=None, help="override the config output directory")

    infer = commands.add_parser("infer", help="fit a posterior to demonstrations")
    infer.add_argument("--demos", required=True, help="demonstrations text file")
    infer.add_argument("--model", required=True, choices=MODELS, help="sampler to run")
    infer.add_argument("--config", default=None, help="optional parameter file")
    infer.add_argument("--seed", type=int, default=None, help="override the config seed")
    infer.add_argument("--out", default=".", help="output directory")

    validate = commands.add_parser("validate", help="check a configuration file")
    validate.add_argument("--config", required=True, help="configuration file to check")

    show = commands.add_parser("show", help="summarize a posterior file")
    show.add_argument("path", help="posterior JSON-lines file")
    return parser


def _cmd_run(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    if args.out is not None:
        config["out_dir"] = args.out
    if "experiment" not in config:
        raise ConfigError("config must set 'experiment' to one of: " + ", ".join(EXPERIMENTS))
    if not config.get("out_dir"):
        raise ConfigError("no output directory: pass --out or set out_dir in the config")
    result = run_experiment(config)
    out_dir = config["out_dir"]
    print(f"{result.name}: {len(result.rows)} rows -> "
          f"{os.path.join(out_dir, result.name + '-runs.csv')} "
          f"({result.metadata['wall_clock_seconds']:.2f}s)")
    return EXIT_OK


def _infer_environment(config, n_states: int, n_actions: int):
    if n_states < 2:
        raise DataError("inference needs at least 2 states in the demonstrations header")
    if n_actions != 2:
        raise DataError(
            f"demonstrations use {n_actions} actions; the chain environment has 2"
        )
    declared = config.get("chain_states")
    if declared is not None and declared != n_states:
        raise ConfigError(
            f"chain_states = {declared} but the demonstrations header says {n_states}"
        )
    spec = ChainSpec(
        n_states=n_states,
        slip=config.get("chain_slip", 0.2),
        rewards=config.get("chain_rewards"),
        discount=config.get("discount", 0.95),
    )
    return chain_transition(spec.n_states, spec.slip), spec


def _cmd_infer(args) -> int:
    config = load_config(args.config) if args.config else {}
    seed = args.seed if args.seed is not None else config.get("seed", 0)
    n_states, n_actions, demos = read_demonstrations(args.demos)
    cmp, spec = _infer_environment(config, n_states, n_actions)
    discount = spec.discount
    tolerance = config.get("tolerance", 1e-9)
    os.makedirs(args.out, exist_ok=True)
    posterior_path = os.path.join(args.out, "posterior.jsonl")
    truth = Mdp(cmp, RewardFunction(spec.reward_values()), discount)
    policy_prior = PolicyDirichletPrior.uniform(
        n_states, n_actions, config.get("policy_prior_strength", 1.0)
    )
    task_ids = sorted({demo.task_id for demo in demos})
    summary = {"model": args.model, "seed": int(seed), "task_ids": [int(t) for t in task_ids],
               "posterior_file": posterior_path, "tasks": {}}

    if args.model in ("mtpp-mc", "mtpp-mh"):
        hyper = GammaHyperprior(n_states, concentration_law=(1.0, config.get("hyper_rate", 10.0)))
        if args.model == "mtpp-mc":
            ensemble = mtpp_mc(cmp, demos, hyper, config.get("mc_samples", 1000),
                               discount, seed, tolerance=tolerance)
        else:
            ensemble = mtpp_mh(
                cmp, demos, hyper,
                config.get("mh_iterations", 2000), config.get("mh_chains", 1),
                discount, seed,
                burn_in_fraction=config.get("burn_in_fraction", 0.1),
                reward_step=config.get("reward_step", 50.0),
                temperature_step=config.get("temperature_step", 0.25),
                hyper_step=config.get("hyper_step", 0.25),
                tolerance=tolerance,
            )
        ensemble.to_jsonl(posterior_path)
        for tid in task_ids:
            policy = posterior_policy(ensemble, tid, cmp, discount, tolerance)
            summary["tasks"][str(tid)] = _task_summary(
                ensemble.posterior_mean_reward(tid).values, policy, truth, demos, tid,
                policy_prior, tolerance,
            )
    else:
        result = mtpo_mc(
            cmp, demos, policy_prior,
            optimality_prior=OptimalityPrior(config.get("optimality_rate", 1.0)),
            n_policy_samples=config.get("mc_samples", 1000),
            reward_prior=DirichletRewardPrior(np.ones(n_states)),
            n_hypotheses=config.get("n_hypotheses", 64),
            discount=discount, seed=seed, tolerance=tolerance,
        )
        result.to_jsonl(posterior_path)
        for tid in task_ids:
            posterior = result.posterior(tid)
            mean_reward = posterior.probabilities @ result.hypotheses.values
            _, policy = posterior_value_estimate(
                posterior, result.hypotheses, cmp, discount, tolerance
            )
            summary["tasks"][str(tid)] = _task_summary(
                mean_reward, policy, truth, demos, tid, policy_prior, tolerance,
            )

    summary_path = os.path.join(args.out, "summary.json")
    with open(summary_path, "w", encoding="utf-8") as handle:
        json.dump(summary, handle, indent=2)
        handle.write("\n")
    for tid in task_ids:
        entry = summary["tasks"][str(tid)]
        print(f"task {tid}: loss {entry['loss_vs_config_env']:.4f} "
              f"(imitator {entry['imitator_loss_vs_config_env']:.4f})")
    print(f"wrote {posterior_path} and {summary_path}")
    return EXIT_OK


def _task_summary(mean_reward, policy, truth, demos, task_id, policy_prior, tolerance):
    task_demos = [d for d in demos if d.task_id == task_id]
    baseline = imitator(task_demos, policy_prior)
    return {
        "posterior_mean_reward": [float(v) for v in mean_reward],
        "greedy_actions": [int(a) for a in policy.greedy_actions()],
        "loss_vs_config_env": l1_loss(truth, policy, tolerance),
        "imitator_loss_vs_config_env": l1_loss(truth, baseline, tolerance),
    }


def _cmd_validate(args) -> int:
    config = load_config(args.config)
    name = config.get("experiment")
    if name is not None and name not in EXPERIMENTS:
        raise ConfigError(
            f"unknown experiment template {name!r}; expected one of {', '.join(EXPERIMENTS)}"
        )
    print(f"{args.config}: ok ({len(config)} keys)")
    return EXIT_OK


def _cmd_show(args) -> int:
    try:
        with open(args.path, "r", encoding="utf-8") as handle:
            first = handle.readline()
        header = json.loads(first)
    except (OSError, json.JSONDecodeError) as error:
        raise DataError(f"cannot read posterior file {args.path}: {error}")
    kind = header.get("format")
    if kind == "mtpp-ensemble":
        ensemble = PosteriorEnsemble.from_jsonl(args.path)
        print(f"reward-and-temperature posterior: {ensemble.n_samples} samples, "
              f"tasks {list(ensemble.task_ids)}")
        for tid in ensemble.task_ids:
            reward = ensemble.posterior_mean_reward(tid).values
            print(f"  task {tid} mean reward: "
                  + " ".join(f"{v:.4f}" for v in reward))
    elif kind == "mtpo-posterior":
        result = MtpoResult.from_jsonl(args.path)
        print(f"policy-optimality posterior: {result.hypotheses.n_hypotheses} hypotheses, "
              f"tasks {list(result.task_ids)}")
        for tid in result.task_ids:
            posterior = result.posterior(tid)
            mean_reward = posterior.probabilities @ result.hypotheses.values
            print(f"  task {tid} mean reward: "
                  + " ".join(f"{v:.4f}" for v in mean_reward))
    else:
        raise DataError(f"{args.path}: unrecognized posterior format {kind!r}")
    return EXIT_OK


_COMMANDS = {
    "run": _cmd_run,
    "infer": _cmd_infer,
    "validate": _cmd_validate,
    "show": _cmd_show,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as error:
        print(f"usage error: {error}", file=sys.stderr)
        return EXIT_USAGE
    if args.command is None:
        parser.print_help()
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as error:
        print(f"config error: {error}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as error:
        print(f"data error: {error}", file=sys.stderr)
        return EXIT_DATA
    except DegeneratePosteriorError as error:
        print(f"numeric failure: {error}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as error:
        print(f"data error: {error}", file=sys.stderr)
        return EXIT_DATA


def console_entry() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    console_entry()
