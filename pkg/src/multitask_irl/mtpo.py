"""Reward inference through a prior on how close to optimal the agent plays.

Instead of modelling the demonstrator's temperature, this model scores every
reward hypothesis by the demonstrator's optimality slack: for a policy pi and
slack eps, the candidate set holds the hypotheses under which pi loses
strictly less than eps of optimal value (sup norm).  Averaging the normalized
candidate sets over an exponential prior on eps, and over policies sampled
from a conjugate posterior around the demonstration, yields a posterior over
the hypothesis set.  The averaging is exact: the integrand is constant
between consecutive distinct loss values, so the eps integral reduces to a
weighted sum over intervals with exponential interval masses.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .mdp import (
    Cmp,
    Mdp,
    RewardFunction,
    StationaryPolicy,
    batch_policy_values,
    batch_solve_optimal,
    value_iteration,
)
from .priors import OptimalityPrior, PolicyDirichletPrior, policy_posterior, sample_policies
from .seeding import substream

__all__ = [
    "RewardHypothesisSet",
    "LossMatrix",
    "RewardPosterior",
    "MtpoResult",
    "sample_hypotheses",
    "build_loss_matrix",
    "eps_optimal_conditional",
    "reward_posterior",
    "posterior_value_estimate",
    "mtpo_mc",
]

@dataclass(frozen=True, eq=False)
class RewardHypothesisSet:
    """Finite set of reward vectors with a base measure over them."""

    values: np.ndarray            # (N, S)
    measure: np.ndarray = None    # (N,) positive; defaults to counting measure

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] < 1:
            raise ValueError(f"values must have shape (n_hypotheses, n_states), got {values.shape}")
        if not np.all(np.isfinite(values)) or np.any(values < 0) or np.any(values > 1):
            raise ValueError("hypothesis rewards must be finite and lie in [0, 1]")
        values.setflags(write=False)
        if self.measure is None:
            measure = np.ones(values.shape[0])
        else:
            measure = np.array(self.measure, dtype=float)
            if measure.shape != (values.shape[0],) or np.any(measure <= 0):
                raise ValueError("measure must assign a positive mass to every hypothesis")
        measure.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "measure", measure)

    @property
    def n_hypotheses(self) -> int:
        return self.values.shape[0]

    @property
    def n_states(self) -> int:
        return self.values.shape[1]

    @classmethod
    def from_rewards(cls, rewards, measure=None) -> "RewardHypothesisSet":
        return cls(np.stack([r.values for r in rewards]), measure)

    def reward(self, index: int) -> RewardFunction:
        return RewardFunction(self.values[index])


def sample_hypotheses(reward_prior, n: int, rng) -> RewardHypothesisSet:
    """Draw a hypothesis set of ``n`` rewards i.i.d. from a reward prior."""
    if n < 1:
        raise ValueError(f"need at least one hypothesis, got {n}")
    return RewardHypothesisSet(reward_prior.sample_batch(rng, n))


@dataclass(frozen=True, eq=False)
class LossMatrix:
    """``losses[i, j]``: sup-norm value loss of policy i under hypothesis j."""

    losses: np.ndarray          # (K, N), non-negative
    optimal_values: np.ndarray  # (N, S)

    def __post_init__(self):
        losses = np.array(self.losses, dtype=float)
        optimal = np.array(self.optimal_values, dtype=float)
        if losses.ndim != 2:
            raise ValueError(
                f"losses must have shape (n_policies, n_hypotheses), got {losses.shape}"
            )
        if not np.all(np.isfinite(losses)) or np.any(losses < 0):
            raise ValueError("losses must be finite and non-negative")
        if optimal.ndim != 2 or optimal.shape[0] != losses.shape[1]:
            raise ValueError("optimal_values must carry one row per hypothesis")
        losses.setflags(write=False)
        optimal.setflags(write=False)
        object.__setattr__(self, "losses", losses)
        object.__setattr__(self, "optimal_values", optimal)

    @property
    def n_policies(self) -> int:
        return self.losses.shape[0]

    @property
    def n_hypotheses(self) -> int:
        return self.losses.shape[1]


def _policies_to_array(policies, cmp: Cmp) -> np.ndarray:
    if isinstance(policies, np.ndarray):
        arr = policies
        if arr.ndim == 2:
            arr = arr[None]
    else:
        arr = np.stack([
            p.action_probs if isinstance(p, StationaryPolicy) else np.asarray(p, dtype=float)
            for p in policies
        ])
    if arr.shape[1:] != (cmp.n_states, cmp.n_actions):
        raise ValueError(
            f"policies must have shape (*, {cmp.n_states}, {cmp.n_actions}), got {arr.shape}"
        )
    return arr


def build_loss_matrix(cmp: Cmp, discount: float, policies, hypotheses: RewardHypothesisSet,
                      tolerance: float = 1e-9) -> LossMatrix:
    """Sup-norm value losses of each policy under each hypothesis.

    Entry (i, j) is ``max_s V*_j(s) - V^{pi_i}_j(s)``, clamped at zero (the
    gap can dip a hair negative at solver tolerance).
    """
    if hypotheses.n_states != cmp.n_states:
        raise ValueError("hypothesis set does not match the CMP's state count")
    arr = _policies_to_array(policies, cmp)
    optimal, _ = batch_solve_optimal(cmp.transition, hypotheses.values, discount, tolerance)
    policy_values = batch_policy_values(cmp.transition, hypotheses.values, arr, discount)
    gaps = optimal[None, :, :] - policy_values  # (K, N, S)
    losses = np.maximum(gaps.max(axis=2), 0.0)
    return LossMatrix(losses=losses, optimal_values=optimal)


def eps_optimal_conditional(losses_for_policy: np.ndarray, eps: float,
                            hypotheses: RewardHypothesisSet) -> np.ndarray:
    """Normalized measure over hypotheses whose loss is strictly below ``eps``.

    Returns the zero vector when no hypothesis qualifies (the conditional is
    undefined there and contributes nothing downstream).
    """
    losses = np.asarray(losses_for_policy, dtype=float)
    if losses.shape != (hypotheses.n_hypotheses,):
        raise ValueError("loss vector length does not match the hypothesis set")
    mask = losses < eps
    weighted = np.where(mask, hypotheses.measure, 0.0)
    total = weighted.sum()
    if total == 0.0:
        return np.zeros(hypotheses.n_hypotheses)
    return weighted / total


@dataclass(frozen=True, eq=False)
class RewardPosterior:
    """Probability vector over a hypothesis set, optionally tagged by task."""

    probabilities: np.ndarray
    task_id: int = None

    def __post_init__(self):
        probs = np.array(self.probabilities, dtype=float)
        if probs.ndim != 1 or np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
            raise ValueError("probabilities must be non-negative and sum to 1 within 1e-9")
        probs.setflags(write=False)
        object.__setattr__(self, "probabilities", probs)


def reward_posterior(loss_matrix: LossMatrix, prior: OptimalityPrior,
                     hypotheses: RewardHypothesisSet) -> RewardPosterior:
    """Posterior over hypotheses, averaging candidate sets over slack and policies.

    For each policy, the candidate-set conditional is piecewise constant in
    eps between consecutive sorted losses, so the exponential-prior integral
    is a finite sum: hypothesis h collects, from every interval whose lower
    edge is at or above its own loss, (prior mass on the interval) divided by
    (cumulative measure admitted so far).  Suffix sums over each policy's
    sorted row give all hypotheses at once; the slice below the smallest
    loss admits nothing and contributes zero.  Tied losses produce
    zero-width, zero-mass intervals, so no merging is needed.  Policies are
    averaged uniformly and the result renormalized.
    """
    losses = loss_matrix.losses
    if losses.shape[1] != hypotheses.n_hypotheses:
        raise ValueError("loss matrix does not match the hypothesis set")
    order = np.argsort(losses, axis=1, kind="stable")
    sorted_losses = np.take_along_axis(losses, order, axis=1)
    sorted_measure = hypotheses.measure[order]
    admitted = np.cumsum(sorted_measure, axis=1)
    upper = np.concatenate(
        [sorted_losses[:, 1:], np.full((losses.shape[0], 1), np.inf)], axis=1
    )
    interval_mass = prior.interval_mass(sorted_losses, upper)
    ratio = interval_mass / admitted
    suffix = np.flip(np.cumsum(np.flip(ratio, axis=1), axis=1), axis=1)
    contribution = np.empty_like(losses)
    np.put_along_axis(contribution, order, sorted_measure * suffix, axis=1)
    accumulated = contribution.sum(axis=0) / losses.shape[0]
    total = accumulated.sum()
    if total <= 0:
        raise ValueError("posterior collapsed to zero mass; loss matrix is malformed")
    return RewardPosterior(accumulated / total)


def posterior_value_estimate(posterior: RewardPosterior, hypotheses: RewardHypothesisSet,
                             cmp: Cmp, discount: float, tolerance: float = 1e-9):
    """Optimal values and greedy policy for the posterior-mean reward."""
    probs = posterior.probabilities
    if probs.shape[0] != hypotheses.n_hypotheses:
        raise ValueError("posterior length does not match the hypothesis set")
    mean_reward = RewardFunction(np.clip(probs @ hypotheses.values, 0.0, 1.0))
    values, policy = value_iteration(Mdp(cmp, mean_reward, discount), tolerance)
    return values, policy


@dataclass(frozen=True, eq=False)
class MtpoResult:
    """Per-task reward posteriors over one shared hypothesis set."""

    task_ids: tuple
    posteriors: tuple              # one RewardPosterior per task id
    hypotheses: RewardHypothesisSet
    metadata: dict = field(default_factory=dict)

    def posterior(self, task_id: int) -> RewardPosterior:
        try:
            index = self.task_ids.index(task_id)
        except ValueError:
            raise KeyError(f"task {task_id} is not in this result (tasks: {self.task_ids})")
        return self.posteriors[index]

    def to_jsonl(self, path) -> None:
        """Write hypothesis set plus one posterior line per task."""
        header = {
            "format": "mtpo-posterior",
            "task_ids": list(self.task_ids),
            "hypotheses": self.hypotheses.values.tolist(),
            "measure": self.hypotheses.measure.tolist(),
            "metadata": {k: v for k, v in self.metadata.items() if _json_safe(v)},
        }
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(json.dumps(header) + "\n")
            for tid, post in zip(self.task_ids, self.posteriors):
                record = {"task_id": int(tid), "probabilities": post.probabilities.tolist()}
                handle.write(json.dumps(record) + "\n")

    @classmethod
    def from_jsonl(cls, path) -> "MtpoResult":
        with open(path, "r", encoding="utf-8") as handle:
            header = json.loads(handle.readline())
            if header.get("format") != "mtpo-posterior":
                raise ValueError(f"{path} is not an mtpo posterior file")
            records = [json.loads(line) for line in handle if line.strip()]
        hypotheses = RewardHypothesisSet(
            np.array(header["hypotheses"]), np.array(header["measure"])
        )
        posteriors = tuple(
            RewardPosterior(np.array(r["probabilities"]), task_id=int(r["task_id"]))
            for r in records
        )
        return cls(
            task_ids=tuple(header["task_ids"]),
            posteriors=posteriors,
            hypotheses=hypotheses,
            metadata=dict(header.get("metadata", {})),
        )


def _json_safe(value) -> bool:
    try:
        json.dumps(value)
        return True
    except TypeError:
        return False


def mtpo_mc(cmp: Cmp, demos, policy_prior: PolicyDirichletPrior, *,
            optimality_prior: OptimalityPrior = None, n_policy_samples: int = 100,
            hypotheses: RewardHypothesisSet = None, reward_prior=None,
            n_hypotheses: int = None, discount: float = 0.95, seed=0,
            task_ids=None, tolerance: float = 1e-9) -> MtpoResult:
    """Monte Carlo posterior over a reward hypothesis set, one per task.

    Either pass a ready ``hypotheses`` set, or a ``reward_prior`` plus
    ``n_hypotheses`` to sample one (shared across tasks).  For each task,
    ``n_policy_samples`` policies are drawn from the conjugate policy
    posterior around that task's demonstrations (the prior itself for tasks
    listed in ``task_ids`` with no demonstrations), their loss matrix against
    the hypothesis set is built, and the slack-averaged posterior computed.
    """
    if optimality_prior is None:
        optimality_prior = OptimalityPrior(1.0)
    if (hypotheses is None) == (reward_prior is None):
        raise ValueError("pass exactly one of `hypotheses` or `reward_prior`")
    if int(n_policy_samples) < 1:
        raise ValueError(f"n_policy_samples must be at least 1, got {n_policy_samples}")
    if policy_prior.n_states != cmp.n_states or policy_prior.n_actions != cmp.n_actions:
        raise ValueError("policy prior shape does not match the CMP")
    if hypotheses is None:
        if n_hypotheses is None or int(n_hypotheses) < 1:
            raise ValueError("reward_prior requires a positive n_hypotheses")
        hyp_rng = substream(seed, "mtpo-mc", "hypotheses")
        hypotheses = sample_hypotheses(reward_prior, int(n_hypotheses), hyp_rng)
    if hypotheses.n_states != cmp.n_states:
        raise ValueError("hypothesis set does not match the CMP's state count")

    groups = {}
    for demo in demos:
        demo.check_bounds(cmp.n_states, cmp.n_actions)
        groups.setdefault(demo.task_id, []).append(demo)
    if task_ids is None:
        resolved = tuple(sorted(groups))
        if not resolved:
            raise ValueError("no demonstrations and no explicit task_ids")
    else:
        resolved = tuple(sorted(int(t) for t in task_ids))
        missing = set(groups) - set(resolved)
        if missing:
            raise ValueError(f"demonstrations reference tasks outside task_ids: {sorted(missing)}")

    posteriors = []
    for tid in resolved:
        rng = substream(seed, "mtpo-mc", "task", tid)
        task_posterior = policy_posterior(policy_prior, groups.get(tid, []))
        sampled = sample_policies(task_posterior, int(n_policy_samples), rng)
        loss_matrix = build_loss_matrix(cmp, discount, sampled, hypotheses, tolerance)
        result = reward_posterior(loss_matrix, optimality_prior, hypotheses)
        posteriors.append(RewardPosterior(result.probabilities, task_id=tid))
    return MtpoResult(
        task_ids=resolved,
        posteriors=tuple(posteriors),
        hypotheses=hypotheses,
        metadata={
            "kind": "mtpo-mc",
            "seed": int(seed) if isinstance(seed, (int, np.integer)) else None,
            "n_policy_samples": int(n_policy_samples),
            "optimality_rate": float(optimality_prior.rate),
            "discount": float(discount),
        },
    )
