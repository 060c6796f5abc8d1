"""Hierarchical reward-and-temperature posterior samplers for task populations.

Model: a population-level hyperprior emits a reward prior and a temperature
prior; each task m independently draws a reward ``rho_m`` and a softmax
temperature ``eta_m``; the demonstrator for task m follows the Boltzmann
policy of the optimal action values for ``rho_m``.  Given one demonstration
set per task, the posterior factorizes across tasks conditional on the
population draw, which both samplers below exploit:

* :func:`mtpp_mc` - importance sampling from the prior with one global
  normalization over the joint (all-task) likelihoods.
* :func:`mtpp_mh` - random-walk Metropolis-Hastings over the joint state
  (hyperparameters plus every task's reward and temperature).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .mdp import (
    LOG_ZERO,
    Cmp,
    DegeneratePosteriorError,
    Mdp,
    RewardFunction,
    StationaryPolicy,
    batch_solve_optimal,
    value_iteration,
    _batch_softmax,
)
from .priors import (
    BetaProductRewardPrior,
    DirichletRewardPrior,
    DiscreteRewardPrior,
    FixedHyperprior,
    FixedTemperature,
    GammaHyperprior,
    TemperaturePrior,
)
from .seeding import substream

__all__ = [
    "MtppSample",
    "PosteriorEnsemble",
    "mtpp_mc",
    "mtpp_mh",
    "posterior_policy",
    "importance_weights",
    "metropolis_accept",
]

# Totals at or below this are treated as "no sample had usable likelihood".
_DEGENERATE_CUTOFF = LOG_ZERO / 2


def importance_weights(log_likelihoods) -> np.ndarray:
    """Normalize joint log-likelihoods into importance weights.

    ``log_likelihoods`` is either a ``(K,)`` vector of per-sample joint
    log-likelihoods or a ``(K, M)`` matrix of per-sample per-task values
    (summed across tasks here).  Weights are computed in log space, so they
    are invariant under any per-task positive rescaling of the likelihoods
    and underflow to exact zeros gracefully.  Raises
    :class:`DegeneratePosteriorError` if every sample is impossible.
    """
    arr = np.asarray(log_likelihoods, dtype=float)
    if arr.ndim == 2:
        totals = arr.sum(axis=1)
    elif arr.ndim == 1:
        totals = arr.copy()
    else:
        raise ValueError(f"log_likelihoods must be 1-d or 2-d, got shape {arr.shape}")
    if totals.shape[0] < 1:
        raise ValueError("need at least one sample")
    max_total = float(totals.max())
    if max_total <= _DEGENERATE_CUTOFF:
        raise DegeneratePosteriorError("all importance weights underflowed to zero", max_total)
    weights = np.exp(totals - max_total)
    return weights / weights.sum()


def metropolis_accept(log_ratio: float, rng) -> bool:
    """One Metropolis-Hastings accept/reject decision."""
    if log_ratio >= 0:
        return True
    return bool(rng.random() < np.exp(log_ratio))


@dataclass(frozen=True, eq=False)
class MtppSample:
    """One joint posterior sample across all tasks."""

    hyper: tuple
    rewards: np.ndarray            # (M, S)
    temperatures: np.ndarray       # (M,)
    policies: np.ndarray           # (M, S, A) or None after deserialization
    log_likelihoods: np.ndarray    # (M,)
    weight: float


@dataclass(frozen=True, eq=False)
class PosteriorEnsemble:
    """Weighted joint samples over the tasks' rewards and temperatures.

    ``rewards[k, m]`` is sample k's reward vector for the m-th task in
    ``task_ids`` (sorted ascending).  Weights sum to one.
    """

    task_ids: tuple
    weights: np.ndarray                     # (K,)
    rewards: np.ndarray                     # (K, M, S)
    temperatures: np.ndarray                # (K, M)
    log_likelihoods: np.ndarray             # (K, M)
    policies: np.ndarray = None             # (K, M, S, A) or None
    hyper_concentrations: np.ndarray = None  # (K, S) or None
    hyper_temperature_shapes: np.ndarray = None  # (K,) or None
    hyper_temperature_rates: np.ndarray = None   # (K,) or None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float)
        if abs(weights.sum() - 1.0) > 1e-9 or np.any(weights < 0):
            raise ValueError("weights must be non-negative and sum to 1 within 1e-9")

    @property
    def n_samples(self) -> int:
        return self.weights.shape[0]

    @property
    def n_tasks(self) -> int:
        return len(self.task_ids)

    def task_index(self, task_id: int) -> int:
        try:
            return self.task_ids.index(task_id)
        except ValueError:
            raise KeyError(f"task {task_id} is not in this ensemble (tasks: {self.task_ids})")

    def posterior_mean_reward(self, task_id: int) -> RewardFunction:
        """Weighted posterior mean of the task's reward vector."""
        m = self.task_index(task_id)
        mean = self.weights @ self.rewards[:, m, :]
        return RewardFunction(np.clip(mean, 0.0, 1.0))

    def sample(self, k: int) -> MtppSample:
        hyper = None
        if self.hyper_concentrations is not None:
            hyper = (
                DirichletRewardPrior(self.hyper_concentrations[k]),
                TemperaturePrior(
                    self.hyper_temperature_shapes[k], self.hyper_temperature_rates[k]
                ),
            )
        return MtppSample(
            hyper=hyper,
            rewards=self.rewards[k],
            temperatures=self.temperatures[k],
            policies=None if self.policies is None else self.policies[k],
            log_likelihoods=self.log_likelihoods[k],
            weight=float(self.weights[k]),
        )

    @property
    def samples(self):
        return [self.sample(k) for k in range(self.n_samples)]

    def to_jsonl(self, path) -> None:
        """Write the ensemble as JSON lines.

        The first line is a header object; each following line is one sample
        with its weight, per-task reward vectors, temperatures and per-task
        log-likelihoods.  Policies and population-level draws are not stored
        (policies are reconstructable from rewards and temperatures).
        """
        header = {
            "format": "mtpp-ensemble",
            "task_ids": list(self.task_ids),
            "n_samples": int(self.n_samples),
            "n_states": int(self.rewards.shape[2]),
            "metadata": {k: v for k, v in self.metadata.items() if _json_safe(v)},
        }
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(json.dumps(header) + "\n")
            for k in range(self.n_samples):
                record = {
                    "weight": float(self.weights[k]),
                    "rewards": self.rewards[k].tolist(),
                    "temperatures": self.temperatures[k].tolist(),
                    "log_likelihoods": self.log_likelihoods[k].tolist(),
                }
                handle.write(json.dumps(record) + "\n")

    @classmethod
    def from_jsonl(cls, path) -> "PosteriorEnsemble":
        with open(path, "r", encoding="utf-8") as handle:
            header = json.loads(handle.readline())
            if header.get("format") != "mtpp-ensemble":
                raise ValueError(f"{path} is not an mtpp ensemble file")
            records = [json.loads(line) for line in handle if line.strip()]
        if len(records) != header["n_samples"]:
            raise ValueError(
                f"{path}: header promises {header['n_samples']} samples, found {len(records)}"
            )
        return cls(
            task_ids=tuple(header["task_ids"]),
            weights=np.array([r["weight"] for r in records]),
            rewards=np.array([r["rewards"] for r in records]),
            temperatures=np.array([r["temperatures"] for r in records]),
            log_likelihoods=np.array([r["log_likelihoods"] for r in records]),
            metadata=dict(header.get("metadata", {})),
        )


def _json_safe(value) -> bool:
    try:
        json.dumps(value)
        return True
    except TypeError:
        return False


def _group_demos(demos, cmp: Cmp):
    """Validate demos against the CMP and group them by sorted task id."""
    if not demos:
        raise ValueError("need at least one demonstration")
    groups = {}
    for demo in demos:
        demo.check_bounds(cmp.n_states, cmp.n_actions)
        groups.setdefault(demo.task_id, []).append(demo)
    task_ids = tuple(sorted(groups))
    return task_ids, [groups[tid] for tid in task_ids]


def _demo_log_lik(action_probs: np.ndarray, demos) -> float:
    """Joint log-likelihood of one task's demonstrations under one policy."""
    total = 0.0
    for demo in demos:
        probs = action_probs[demo.states, demo.actions]
        if np.any(probs <= 0.0):
            return LOG_ZERO
        total += float(np.log(probs).sum())
    return total


def _demo_log_lik_batch(policies: np.ndarray, demos) -> np.ndarray:
    """Joint log-likelihood of one task's demonstrations under (K, S, A) policies."""
    k = policies.shape[0]
    totals = np.zeros(k)
    dead = np.zeros(k, dtype=bool)
    for demo in demos:
        probs = policies[:, demo.states, demo.actions]  # (K, T)
        dead |= np.any(probs <= 0.0, axis=1)
        totals += np.log(np.maximum(probs, 1e-320)).sum(axis=1)
    totals[dead] = LOG_ZERO
    return totals


def _q_values(transition, rewards, values, discount):
    """Action values for batched (rewards, optimal values): (K, S, A)."""
    return rewards[:, :, None] + discount * np.einsum("sat,kt->ksa", transition, values)


def _solve_q_batch(transition, rewards, discount, tolerance):
    """Optimal action values for (K, S) rewards, sharing solves across
    rewards that agree to 1e-12."""
    rounded = np.round(rewards, 12)
    unique, inverse = np.unique(rounded, axis=0, return_inverse=True)
    values, _ = batch_solve_optimal(transition, unique, discount, tolerance)
    return _q_values(transition, rewards, values[inverse], discount)


def mtpp_mc(cmp: Cmp, demos, hyperprior, n_samples: int, discount: float, seed,
            *, tolerance: float = 1e-9) -> PosteriorEnsemble:
    """Importance-sampling posterior over every task's reward and temperature.

    Draws ``n_samples`` population-level samples, then per task a reward and
    temperature from each, solves the induced MDPs, and weights each joint
    sample by the product over tasks of its demonstration likelihoods, with
    one normalization over all samples.  Per-task randomness comes from
    substreams keyed by task id, so permuting the order of ``demos`` leaves
    all per-task outputs unchanged.
    """
    n_samples = int(n_samples)
    if n_samples < 1:
        raise ValueError(f"n_samples must be at least 1, got {n_samples}")
    if not (0.0 <= discount < 1.0):
        raise ValueError(f"discount must lie in [0, 1), got {discount}")
    task_ids, demo_groups = _group_demos(demos, cmp)
    transition = cmp.transition
    n_tasks = len(task_ids)

    fixed = isinstance(hyperprior, FixedHyperprior)
    if fixed:
        conc = t_shapes = t_rates = None
    elif isinstance(hyperprior, GammaHyperprior):
        if hyperprior.n_states != cmp.n_states:
            raise ValueError("hyperprior n_states does not match the CMP")
        hyper_rng = substream(seed, "mtpp-mc", "hyper")
        conc, t_shapes, t_rates = hyperprior.sample_batch(hyper_rng, n_samples)
    else:
        raise TypeError(
            f"hyperprior must be GammaHyperprior or FixedHyperprior, got {type(hyperprior).__name__}"
        )

    rewards = np.empty((n_samples, n_tasks, cmp.n_states))
    temperatures = np.empty((n_samples, n_tasks))
    policies = np.empty((n_samples, n_tasks, cmp.n_states, cmp.n_actions))
    log_liks = np.empty((n_samples, n_tasks))
    for m, (tid, group) in enumerate(zip(task_ids, demo_groups)):
        rng = substream(seed, "mtpp-mc", "task", tid)
        if fixed:
            rewards_m = hyperprior.reward_prior.sample_batch(rng, n_samples)
            etas_m = hyperprior.temperature_prior.sample_batch(rng, n_samples)
        else:
            # Concentrations vary per sample; rng.dirichlet stays stable for
            # tiny concentrations where normalized gamma draws would 0/0.
            rewards_m = np.stack([rng.dirichlet(conc[k]) for k in range(n_samples)])
            etas_m = rng.gamma(t_shapes) / t_rates
        q = _solve_q_batch(transition, rewards_m, discount, tolerance)
        policies_m = _batch_softmax(q, etas_m)
        rewards[:, m, :] = rewards_m
        temperatures[:, m] = etas_m
        policies[:, m] = policies_m
        log_liks[:, m] = _demo_log_lik_batch(policies_m, group)

    weights = importance_weights(log_liks)
    return PosteriorEnsemble(
        task_ids=task_ids,
        weights=weights,
        rewards=rewards,
        temperatures=temperatures,
        log_likelihoods=log_liks,
        policies=policies,
        hyper_concentrations=conc,
        hyper_temperature_shapes=t_shapes,
        hyper_temperature_rates=t_rates,
        metadata={
            "kind": "mtpp-mc",
            "seed": int(seed) if isinstance(seed, (int, np.integer)) else None,
            "n_samples": n_samples,
            "discount": float(discount),
        },
    )


class _SolveCache:
    """Memoizes optimal values per reward vector, at 1e-12 granularity."""

    def __init__(self, transition, discount, tolerance, max_entries: int = 4096):
        self.transition = transition
        self.discount = discount
        self.tolerance = tolerance
        self.max_entries = max_entries
        self._values = {}

    def q_values_many(self, rewards: np.ndarray) -> np.ndarray:
        """(M, S) rewards -> (M, S, A) optimal action values."""
        keys = [np.round(r, 12).tobytes() for r in rewards]
        missing = [i for i, key in enumerate(keys) if key not in self._values]
        if missing:
            values, _ = batch_solve_optimal(
                self.transition, rewards[missing], self.discount, self.tolerance
            )
            for j, i in enumerate(missing):
                while len(self._values) >= self.max_entries:
                    self._values.pop(next(iter(self._values)))
                self._values[keys[i]] = values[j]
        stacked = np.stack([self._values[key] for key in keys])
        return _q_values(self.transition, rewards, stacked, self.discount)

    def q_values(self, reward: np.ndarray) -> np.ndarray:
        return self.q_values_many(reward[None, :])[0]


def _interior(prior, values: np.ndarray) -> np.ndarray:
    """Nudge an initial reward draw off the boundary of its support.

    Hyper-sampled Dirichlet priors with concentrations below one put mass
    (and unbounded log-density) on the simplex boundary; starting interior
    keeps every Metropolis-Hastings density finite.  Discrete atoms are
    left untouched so they still match their grid exactly.
    """
    if isinstance(prior, DiscreteRewardPrior):
        return values
    if isinstance(prior, BetaProductRewardPrior):
        return np.clip(values, 1e-9, 1.0 - 1e-9)
    eps = 1e-3
    return (1.0 - eps) * values + eps / values.shape[0]


def _dirichlet_log_pdf(values: np.ndarray, concentration: np.ndarray) -> float:
    from scipy.special import gammaln, xlogy

    log_norm = gammaln(concentration.sum()) - gammaln(concentration).sum()
    return float(log_norm + xlogy(concentration - 1.0, values).sum())


_PROPOSAL_FLOOR = 0.1


def _propose_reward(prior, current: np.ndarray, rng, step: float):
    """Propose a new reward for one task; returns (proposal, log_hastings).

    Simplex supports use a Dirichlet proposal centered at the current point
    (precision ``step``, with a small concentration floor so parameters stay
    positive at sparse points) and the exact Hastings correction; box
    supports use a logit-normal random walk of scale ``1/sqrt(step)``;
    discrete grids resample an atom uniformly.
    """
    if isinstance(prior, DiscreteRewardPrior):
        return prior.atoms[rng.integers(prior.n_atoms)], 0.0
    if isinstance(prior, BetaProductRewardPrior):
        scale = 1.0 / np.sqrt(step)
        logit = np.log(current) - np.log1p(-current)
        proposal = 1.0 / (1.0 + np.exp(-(logit + scale * rng.standard_normal(current.shape[0]))))
        proposal = np.clip(proposal, 1e-300, 1.0 - 1e-16)
        log_hastings = float(
            (np.log(proposal) + np.log1p(-proposal) - np.log(current) - np.log1p(-current)).sum()
        )
        return proposal, log_hastings
    forward = step * current + _PROPOSAL_FLOOR
    proposal = rng.dirichlet(forward)
    # Tiny concentrations can underflow a coordinate to exact zero; keep the
    # chain state interior so both Hastings densities stay finite.
    proposal = np.clip(proposal, 1e-300, None)
    proposal = proposal / proposal.sum()
    reverse = step * proposal + _PROPOSAL_FLOOR
    log_hastings = _dirichlet_log_pdf(current, reverse) - _dirichlet_log_pdf(proposal, forward)
    return proposal, log_hastings


def mtpp_mh(cmp: Cmp, demos, hyperprior, n_iterations: int, n_chains: int,
            discount: float, seed, *, burn_in_fraction: float = 0.1,
            reward_step: float = 50.0, temperature_step: float = 0.25,
            hyper_step: float = 0.25, tolerance: float = 1e-9) -> PosteriorEnsemble:
    """Random-walk Metropolis-Hastings over the joint hierarchical state.

    The total iteration budget ``n_iterations`` is split evenly across
    ``n_chains`` independent chains.  Each iteration sweeps: a log-normal
    move on the hyperparameters (skipped for degenerate hyperpriors), a
    reward proposal per task, and a temperature proposal per task (skipped
    for fixed temperatures).  The first ``burn_in_fraction`` of each chain
    is discarded and the remainder pooled with uniform weights.
    """
    n_iterations = int(n_iterations)
    n_chains = int(n_chains)
    if n_chains < 1:
        raise ValueError(f"n_chains must be at least 1, got {n_chains}")
    per_chain = n_iterations // n_chains
    if per_chain < 1:
        raise ValueError(
            f"n_iterations={n_iterations} leaves no iterations for {n_chains} chains"
        )
    if not (0.0 <= burn_in_fraction < 1.0):
        raise ValueError(f"burn_in_fraction must lie in [0, 1), got {burn_in_fraction}")
    if not (0.0 <= discount < 1.0):
        raise ValueError(f"discount must lie in [0, 1), got {discount}")
    if reward_step <= 0 or temperature_step <= 0 or hyper_step <= 0:
        raise ValueError("proposal step parameters must be positive")
    task_ids, demo_groups = _group_demos(demos, cmp)
    if not isinstance(hyperprior, (GammaHyperprior, FixedHyperprior)):
        raise TypeError(
            f"hyperprior must be GammaHyperprior or FixedHyperprior, got {type(hyperprior).__name__}"
        )
    if isinstance(hyperprior, GammaHyperprior) and hyperprior.n_states != cmp.n_states:
        raise ValueError("hyperprior n_states does not match the CMP")
    n_tasks = len(task_ids)
    n_states, n_actions = cmp.n_states, cmp.n_actions
    burn = int(np.floor(burn_in_fraction * per_chain))
    kept_per_chain = per_chain - burn
    track_hyper = isinstance(hyperprior, GammaHyperprior)

    chains_rewards, chains_temps, chains_pols, chains_lls = [], [], [], []
    chains_conc, chains_tsh, chains_trt = [], [], []
    acceptance = []
    for chain in range(n_chains):
        rng = substream(seed, "mtpp-mh", "chain", chain)
        cache = _SolveCache(cmp.transition, discount, tolerance)
        reward_prior, temp_prior = hyperprior.sample(rng)
        rho = np.empty((n_tasks, n_states))
        eta = np.empty(n_tasks)
        for m in range(n_tasks):
            rho[m] = _interior(reward_prior, reward_prior.sample(rng).values)
            # A tiny temperature shape can underflow the draw to exact zero,
            # where the log prior is -inf and multiplicative moves are stuck.
            eta[m] = max(temp_prior.sample(rng), 1e-12)
        q = cache.q_values_many(rho)
        pols = _batch_softmax(q, eta)
        log_lik = np.array(
            [_demo_log_lik(pols[m], demo_groups[m]) for m in range(n_tasks)]
        )
        log_prior_rho = np.array([reward_prior.log_pdf(rho[m]) for m in range(n_tasks)])
        log_prior_eta = np.array([temp_prior.log_pdf(eta[m]) for m in range(n_tasks)])

        rec_rewards = np.empty((per_chain, n_tasks, n_states))
        rec_temps = np.empty((per_chain, n_tasks))
        rec_pols = np.empty((per_chain, n_tasks, n_states, n_actions))
        rec_lls = np.empty((per_chain, n_tasks))
        rec_conc = np.empty((per_chain, n_states)) if track_hyper else None
        rec_tsh = np.empty(per_chain) if track_hyper else None
        rec_trt = np.empty(per_chain) if track_hyper else None
        counts = {"hyper": [0, 0], "reward": [0, 0], "temperature": [0, 0]}

        temp_moves = not isinstance(temp_prior, FixedTemperature)
        for it in range(per_chain):
            move = hyperprior.propose((reward_prior, temp_prior), rng, hyper_step)
            if move is not None:
                (new_rp, new_tp), log_hastings = move
                new_prior_rho = np.array([new_rp.log_pdf(rho[m]) for m in range(n_tasks)])
                new_prior_eta = np.array([new_tp.log_pdf(eta[m]) for m in range(n_tasks)])
                delta = (
                    hyperprior.log_pdf(new_rp, new_tp)
                    - hyperprior.log_pdf(reward_prior, temp_prior)
                    + new_prior_rho.sum() - log_prior_rho.sum()
                    + new_prior_eta.sum() - log_prior_eta.sum()
                    + log_hastings
                )
                counts["hyper"][1] += 1
                if metropolis_accept(delta, rng):
                    counts["hyper"][0] += 1
                    reward_prior, temp_prior = new_rp, new_tp
                    log_prior_rho, log_prior_eta = new_prior_rho, new_prior_eta

            proposals = np.empty_like(rho)
            hastings = np.empty(n_tasks)
            for m in range(n_tasks):
                proposals[m], hastings[m] = _propose_reward(
                    reward_prior, rho[m], rng, reward_step
                )
            q_prop = cache.q_values_many(proposals)
            pols_prop = _batch_softmax(q_prop, eta)
            for m in range(n_tasks):
                new_ll = _demo_log_lik(pols_prop[m], demo_groups[m])
                new_lp = reward_prior.log_pdf(proposals[m])
                delta = new_lp - log_prior_rho[m] + new_ll - log_lik[m] + hastings[m]
                counts["reward"][1] += 1
                if metropolis_accept(delta, rng):
                    counts["reward"][0] += 1
                    rho[m] = proposals[m]
                    q[m] = q_prop[m]
                    pols[m] = pols_prop[m]
                    log_lik[m] = new_ll
                    log_prior_rho[m] = new_lp

            if temp_moves:
                for m in range(n_tasks):
                    new_eta = eta[m] * np.exp(temperature_step * rng.standard_normal())
                    if not (np.isfinite(new_eta) and new_eta > 0.0):
                        counts["temperature"][1] += 1
                        continue
                    new_pol = _batch_softmax(q[m][None], np.asarray(new_eta))[0]
                    new_ll = _demo_log_lik(new_pol, demo_groups[m])
                    new_lp = temp_prior.log_pdf(new_eta)
                    delta = (
                        new_lp - log_prior_eta[m]
                        + new_ll - log_lik[m]
                        + np.log(new_eta) - np.log(eta[m])
                    )
                    counts["temperature"][1] += 1
                    if metropolis_accept(delta, rng):
                        counts["temperature"][0] += 1
                        eta[m] = new_eta
                        pols[m] = new_pol
                        log_lik[m] = new_ll
                        log_prior_eta[m] = new_lp

            rec_rewards[it] = rho
            rec_temps[it] = eta
            rec_pols[it] = pols
            rec_lls[it] = log_lik
            if track_hyper:
                rec_conc[it] = reward_prior.concentration
                rec_tsh[it] = temp_prior.shape
                rec_trt[it] = temp_prior.rate

        chains_rewards.append(rec_rewards[burn:])
        chains_temps.append(rec_temps[burn:])
        chains_pols.append(rec_pols[burn:])
        chains_lls.append(rec_lls[burn:])
        if track_hyper:
            chains_conc.append(rec_conc[burn:])
            chains_tsh.append(rec_tsh[burn:])
            chains_trt.append(rec_trt[burn:])
        acceptance.append(
            {
                name: (hits / max(total, 1))
                for name, (hits, total) in counts.items()
                if total > 0
            }
        )

    kept = kept_per_chain * n_chains
    return PosteriorEnsemble(
        task_ids=task_ids,
        weights=np.full(kept, 1.0 / kept),
        rewards=np.concatenate(chains_rewards),
        temperatures=np.concatenate(chains_temps),
        log_likelihoods=np.concatenate(chains_lls),
        policies=np.concatenate(chains_pols),
        hyper_concentrations=np.concatenate(chains_conc) if track_hyper else None,
        hyper_temperature_shapes=np.concatenate(chains_tsh) if track_hyper else None,
        hyper_temperature_rates=np.concatenate(chains_trt) if track_hyper else None,
        metadata={
            "kind": "mtpp-mh",
            "seed": int(seed) if isinstance(seed, (int, np.integer)) else None,
            "n_iterations": n_iterations,
            "n_chains": n_chains,
            "burn_in_fraction": float(burn_in_fraction),
            "reward_step": float(reward_step),
            "temperature_step": float(temperature_step),
            "hyper_step": float(hyper_step),
            "discount": float(discount),
            "acceptance_rates": acceptance,
        },
    )


def posterior_policy(ensemble: PosteriorEnsemble, task_id: int, cmp: Cmp,
                     discount: float, tolerance: float = 1e-9) -> StationaryPolicy:
    """Greedy policy for the task's posterior-mean reward."""
    mean_reward = ensemble.posterior_mean_reward(task_id)
    _, policy = value_iteration(Mdp(cmp, mean_reward, discount), tolerance)
    return policy
