"""Multitask Bayesian inverse reinforcement learning.

Several demonstrators, each solving its own task, are explained jointly: a
shared population prior ties the per-task reward functions and softmax
temperatures together, so evidence about one task sharpens inference about
the others.  Two model families are provided, a reward-and-temperature
posterior with Monte Carlo and Metropolis-Hastings samplers, and a
policy-optimality posterior over a finite reward hypothesis set, plus
single-task baselines, benchmark environments, and a seeded experiment
harness.
"""

from .baselines import (
    FeatureMap,
    MixedPolicy,
    demo_feature_expectations,
    discounted_state_occupancy,
    feature_expectations,
    imitator,
    mwal,
)
from .bench import (
    EXPERIMENTS,
    ExperimentResult,
    ResultRow,
    bound_check,
    l1_loss,
    run_experiment,
    value_error_bound,
    write_aggregate_csv,
    write_runs_csv,
)
from .config import CONFIG_KEYS, ConfigError, describe_keys, load_config, parse_config
from .io import DataError, read_demonstrations, write_demonstrations
from .mdp import (
    LOG_ZERO,
    Cmp,
    DegeneratePosteriorError,
    Demonstration,
    Mdp,
    RewardFunction,
    StationaryPolicy,
    batch_policy_values,
    batch_solve_optimal,
    log_likelihood,
    policy_evaluation,
    policy_transition,
    q_from_v,
    simulate,
    softmax_policy,
    value_iteration,
)
from .mtpo import (
    LossMatrix,
    MtpoResult,
    RewardHypothesisSet,
    RewardPosterior,
    build_loss_matrix,
    eps_optimal_conditional,
    mtpo_mc,
    posterior_value_estimate,
    reward_posterior,
    sample_hypotheses,
)
from .mtpp import (
    MtppSample,
    PosteriorEnsemble,
    importance_weights,
    metropolis_accept,
    mtpp_mc,
    mtpp_mh,
    posterior_policy,
)
from .priors import (
    BetaProductRewardPrior,
    DirichletRewardPrior,
    DiscreteRewardPrior,
    FixedHyperprior,
    FixedTemperature,
    GammaHyperprior,
    OptimalityPrior,
    PolicyDirichletPrior,
    TemperaturePrior,
    exp_interval_mass,
    policy_posterior,
    sample_hyper,
    sample_policies,
    sample_policy,
    sample_reward,
)
from .seeding import as_generator, subseed, substream
from .tasks import (
    ADVANCE,
    RESET,
    ChainSpec,
    RandomMdpPopulation,
    RandomMdpSpec,
    chain_transition,
    make_chain,
    make_demonstrator,
    make_generalized_chain,
    make_random_mdp_population,
)

__version__ = "0.1.0"

__all__ = [
    "ADVANCE",
    "BetaProductRewardPrior",
    "CONFIG_KEYS",
    "ChainSpec",
    "Cmp",
    "ConfigError",
    "DataError",
    "DegeneratePosteriorError",
    "Demonstration",
    "DirichletRewardPrior",
    "DiscreteRewardPrior",
    "EXPERIMENTS",
    "ExperimentResult",
    "FeatureMap",
    "FixedHyperprior",
    "FixedTemperature",
    "GammaHyperprior",
    "LOG_ZERO",
    "LossMatrix",
    "Mdp",
    "MixedPolicy",
    "MtpoResult",
    "MtppSample",
    "OptimalityPrior",
    "PolicyDirichletPrior",
    "PosteriorEnsemble",
    "RESET",
    "RandomMdpPopulation",
    "RandomMdpSpec",
    "ResultRow",
    "RewardFunction",
    "RewardHypothesisSet",
    "RewardPosterior",
    "StationaryPolicy",
    "TemperaturePrior",
    "as_generator",
    "batch_policy_values",
    "batch_solve_optimal",
    "bound_check",
    "build_loss_matrix",
    "chain_transition",
    "demo_feature_expectations",
    "describe_keys",
    "discounted_state_occupancy",
    "eps_optimal_conditional",
    "exp_interval_mass",
    "feature_expectations",
    "imitator",
    "importance_weights",
    "l1_loss",
    "load_config",
    "log_likelihood",
    "make_chain",
    "make_demonstrator",
    "make_generalized_chain",
    "make_random_mdp_population",
    "metropolis_accept",
    "mtpo_mc",
    "mtpp_mc",
    "mtpp_mh",
    "mwal",
    "parse_config",
    "policy_evaluation",
    "policy_posterior",
    "policy_transition",
    "posterior_policy",
    "posterior_value_estimate",
    "q_from_v",
    "read_demonstrations",
    "reward_posterior",
    "run_experiment",
    "sample_hypotheses",
    "sample_hyper",
    "sample_policies",
    "sample_policy",
    "sample_reward",
    "simulate",
    "softmax_policy",
    "subseed",
    "substream",
    "value_error_bound",
    "value_iteration",
    "write_aggregate_csv",
    "write_demonstrations",
    "write_runs_csv",
]
