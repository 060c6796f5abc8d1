"""Finite controlled Markov processes: kernels, policies, planning, simulation.

Conventions used throughout the package:

* ``transition[s, a, s']`` is the probability of landing in ``s'`` after
  taking action ``a`` in state ``s``; every ``(s, a)`` row is a distribution.
* Rewards are state-based with values in ``[0, 1]``; the return collects
  ``rho(s_t)`` at each visited state before the transition, so the optimal
  values satisfy ``V = rho + gamma * max_a T V``.
* Greedy policies break ties toward the lowest action index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .seeding import as_generator

__all__ = [
    "LOG_ZERO",
    "Cmp",
    "RewardFunction",
    "Mdp",
    "StationaryPolicy",
    "Demonstration",
    "value_iteration",
    "policy_evaluation",
    "q_from_v",
    "softmax_policy",
    "simulate",
    "log_likelihood",
    "batch_solve_optimal",
    "batch_policy_values",
    "policy_transition",
    "DegeneratePosteriorError",
]

# Sentinel for log(0): large negative but finite, so importance weights built
# from impossible trajectories underflow to exactly 0 instead of producing nan.
LOG_ZERO = -1.0e300

_ROW_ATOL = 1e-12


class DegeneratePosteriorError(RuntimeError):
    """Raised when every posterior sample has zero usable weight."""

    def __init__(self, message: str, max_log_likelihood: float):
        super().__init__(f"{message} (max log-likelihood seen: {max_log_likelihood:.6g})")
        self.max_log_likelihood = max_log_likelihood


def _readonly(values, dtype=float) -> np.ndarray:
    out = np.array(values, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Cmp:
    """Controlled Markov process: a finite transition kernel, no reward."""

    transition: np.ndarray

    def __post_init__(self):
        kernel = _readonly(self.transition)
        if kernel.ndim != 3 or kernel.shape[0] != kernel.shape[2]:
            raise ValueError(
                f"transition must have shape (n_states, n_actions, n_states), got {kernel.shape}"
            )
        if not np.all(np.isfinite(kernel)) or np.any(kernel < 0):
            raise ValueError("transition probabilities must be finite and non-negative")
        row_sums = kernel.sum(axis=2)
        if np.max(np.abs(row_sums - 1.0)) > _ROW_ATOL:
            worst = float(np.max(np.abs(row_sums - 1.0)))
            raise ValueError(f"each (state, action) row must sum to 1, worst deviation {worst:.3g}")
        object.__setattr__(self, "transition", kernel)

    @property
    def n_states(self) -> int:
        return self.transition.shape[0]

    @property
    def n_actions(self) -> int:
        return self.transition.shape[1]


@dataclass(frozen=True)
class RewardFunction:
    """State-based reward with entries in [0, 1]."""

    values: np.ndarray

    def __post_init__(self):
        values = _readonly(self.values)
        if values.ndim != 1 or values.shape[0] < 1:
            raise ValueError(f"reward must be a non-empty vector, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("reward entries must be finite")
        if np.any(values < 0) or np.any(values > 1):
            raise ValueError("reward entries must lie in [0, 1]")
        object.__setattr__(self, "values", values)

    @property
    def n_states(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class Mdp:
    """A CMP paired with a reward function and a discount factor in [0, 1)."""

    cmp: Cmp
    reward: RewardFunction
    discount: float

    def __post_init__(self):
        if self.reward.n_states != self.cmp.n_states:
            raise ValueError(
                f"reward has {self.reward.n_states} states but the CMP has {self.cmp.n_states}"
            )
        if not (0.0 <= self.discount < 1.0):
            raise ValueError(f"discount must lie in [0, 1), got {self.discount}")


@dataclass(frozen=True)
class StationaryPolicy:
    """Stochastic stationary policy: ``action_probs[s, a] = pi(a | s)``."""

    action_probs: np.ndarray

    def __post_init__(self):
        probs = _readonly(self.action_probs)
        if probs.ndim != 2:
            raise ValueError(f"action_probs must be 2-d, got shape {probs.shape}")
        if not np.all(np.isfinite(probs)) or np.any(probs < 0):
            raise ValueError("action probabilities must be finite and non-negative")
        row_sums = probs.sum(axis=1)
        if np.max(np.abs(row_sums - 1.0)) > _ROW_ATOL:
            worst = float(np.max(np.abs(row_sums - 1.0)))
            raise ValueError(f"each state's action row must sum to 1, worst deviation {worst:.3g}")
        object.__setattr__(self, "action_probs", probs)

    @property
    def n_states(self) -> int:
        return self.action_probs.shape[0]

    @property
    def n_actions(self) -> int:
        return self.action_probs.shape[1]

    @classmethod
    def from_actions(cls, actions, n_actions: int) -> "StationaryPolicy":
        """Deterministic policy taking ``actions[s]`` in state ``s``."""
        actions = np.asarray(actions, dtype=int)
        probs = np.zeros((actions.shape[0], n_actions))
        probs[np.arange(actions.shape[0]), actions] = 1.0
        return cls(probs)

    @classmethod
    def uniform(cls, n_states: int, n_actions: int) -> "StationaryPolicy":
        return cls(np.full((n_states, n_actions), 1.0 / n_actions))

    def greedy_actions(self) -> np.ndarray:
        return self.action_probs.argmax(axis=1)


@dataclass(frozen=True)
class Demonstration:
    """One task's state-action trajectory."""

    task_id: int
    states: np.ndarray
    actions: np.ndarray

    def __post_init__(self):
        states = _readonly(self.states, dtype=np.int64)
        actions = _readonly(self.actions, dtype=np.int64)
        if states.ndim != 1 or actions.ndim != 1 or states.shape != actions.shape:
            raise ValueError("states and actions must be 1-d arrays of equal length")
        if states.shape[0] < 1:
            raise ValueError("a demonstration must contain at least one step")
        if np.any(states < 0) or np.any(actions < 0):
            raise ValueError("state and action indices must be non-negative")
        if int(self.task_id) < 0:
            raise ValueError(f"task_id must be non-negative, got {self.task_id}")
        object.__setattr__(self, "task_id", int(self.task_id))
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "actions", actions)

    def __len__(self) -> int:
        return self.states.shape[0]

    def check_bounds(self, n_states: int, n_actions: int) -> None:
        if np.any(self.states >= n_states) or np.any(self.actions >= n_actions):
            raise ValueError(
                f"demonstration for task {self.task_id} has indices outside "
                f"({n_states} states, {n_actions} actions)"
            )


def _expected_next_values(transition: np.ndarray, v: np.ndarray) -> np.ndarray:
    # (S, A, S') @ (S',) -> (S, A)
    return transition @ v


def value_iteration(mdp: Mdp, tolerance: float = 1e-9):
    """Solve for optimal values and a greedy policy by Bellman sweeps.

    Returns ``(values, policy)`` with the sup-norm Bellman residual of
    ``values`` at most ``tolerance`` and ``values`` within ``tolerance`` of
    the fixed point.  The greedy policy is deterministic, ties broken toward
    the lowest action index.
    """
    if tolerance <= 0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")
    rewards = mdp.reward.values
    if not np.all(np.isfinite(rewards)):
        raise ValueError("reward entries must be finite")
    transition = mdp.cmp.transition
    gamma = mdp.discount
    if gamma == 0.0:
        q = np.repeat(rewards[:, None], mdp.cmp.n_actions, axis=1)
        return rewards.copy(), StationaryPolicy.from_actions(q.argmax(axis=1), mdp.cmp.n_actions)
    # Stopping at delta <= tolerance*(1-gamma)/gamma bounds both the Bellman
    # residual and the distance to the fixed point by ``tolerance``.
    stop = tolerance * (1.0 - gamma) / gamma
    v = np.zeros(mdp.cmp.n_states)
    while True:
        v_next = (rewards[:, None] + gamma * _expected_next_values(transition, v)).max(axis=1)
        delta = float(np.max(np.abs(v_next - v)))
        v = v_next
        if delta <= stop:
            break
    q = rewards[:, None] + gamma * _expected_next_values(transition, v)
    return v, StationaryPolicy.from_actions(q.argmax(axis=1), mdp.cmp.n_actions)


def policy_transition(cmp: Cmp, policy: StationaryPolicy) -> np.ndarray:
    """State-to-state kernel induced by following ``policy``."""
    if policy.n_states != cmp.n_states or policy.n_actions != cmp.n_actions:
        raise ValueError("policy shape does not match the CMP")
    return np.einsum("sa,sat->st", policy.action_probs, cmp.transition)


def policy_evaluation(mdp: Mdp, policy: StationaryPolicy, tolerance: float = 1e-9) -> np.ndarray:
    """Value of a stochastic policy by iterating the expectation backup.

    The returned vector is within ``tolerance`` (sup norm) of the true fixed
    point of ``V = rho + gamma * P_pi V``.
    """
    if tolerance <= 0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")
    kernel = policy_transition(mdp.cmp, policy)
    rewards = mdp.reward.values
    gamma = mdp.discount
    if gamma == 0.0:
        return rewards.copy()
    stop = tolerance * (1.0 - gamma) / gamma
    v = np.zeros(mdp.cmp.n_states)
    while True:
        v_next = rewards + gamma * kernel @ v
        delta = float(np.max(np.abs(v_next - v)))
        v = v_next
        if delta <= stop:
            break
    return v


def q_from_v(mdp: Mdp, values: np.ndarray) -> np.ndarray:
    """Action values ``Q(s, a) = rho(s) + gamma * sum_s' T(s'|s,a) V(s')``."""
    values = np.asarray(values, dtype=float)
    if values.shape != (mdp.cmp.n_states,):
        raise ValueError(f"values must have shape ({mdp.cmp.n_states},), got {values.shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError("values must be finite")
    return mdp.reward.values[:, None] + mdp.discount * _expected_next_values(
        mdp.cmp.transition, values
    )


def softmax_policy(q: np.ndarray, eta: float) -> StationaryPolicy:
    """Boltzmann policy ``pi(a|s) proportional to exp(eta * Q(s, a))``.

    Rows are shifted by their maximum before exponentiation, so the result
    is invariant to per-state constant shifts of ``q`` and safe for large
    ``eta``.  ``eta = 0`` yields the uniform policy.
    """
    q = np.asarray(q, dtype=float)
    if q.ndim != 2:
        raise ValueError(f"q must be 2-d, got shape {q.shape}")
    if not np.all(np.isfinite(q)):
        raise ValueError("q entries must be finite")
    if not (eta >= 0.0 and np.isfinite(eta)):
        raise ValueError(f"eta must be finite and non-negative, got {eta}")
    shifted = eta * (q - q.max(axis=1, keepdims=True))
    probs = np.exp(shifted)
    return StationaryPolicy(probs / probs.sum(axis=1, keepdims=True))


def _batch_softmax(q: np.ndarray, eta) -> np.ndarray:
    """Row-shifted softmax over the last axis; ``eta`` broadcasts over batches."""
    shifted = np.asarray(eta)[..., None, None] * (q - q.max(axis=-1, keepdims=True))
    probs = np.exp(shifted)
    return probs / probs.sum(axis=-1, keepdims=True)


def simulate(
    model,
    policy: StationaryPolicy,
    horizon: int,
    rng,
    *,
    task_id: int = 0,
    initial_state_probs=None,
) -> Demonstration:
    """Roll out ``policy`` for ``horizon`` steps and record the trajectory.

    ``model`` may be an ``Mdp`` or a bare ``Cmp``.  The initial state is drawn
    from ``initial_state_probs`` (default: point mass on state 0).  A fixed
    seed produces a bit-identical trajectory.
    """
    cmp = model.cmp if isinstance(model, Mdp) else model
    if not isinstance(cmp, Cmp):
        raise TypeError(f"model must be an Mdp or Cmp, got {type(model).__name__}")
    if policy.n_states != cmp.n_states or policy.n_actions != cmp.n_actions:
        raise ValueError("policy shape does not match the CMP")
    if horizon < 1:
        raise ValueError(f"horizon must be at least 1, got {horizon}")
    rng = as_generator(rng)
    if initial_state_probs is None:
        state = 0
    else:
        p0 = np.asarray(initial_state_probs, dtype=float)
        if p0.shape != (cmp.n_states,) or np.any(p0 < 0) or abs(p0.sum() - 1.0) > _ROW_ATOL:
            raise ValueError("initial_state_probs must be a distribution over states")
        state = int(np.searchsorted(np.cumsum(p0), rng.random(), side="right"))
        state = min(state, cmp.n_states - 1)
    cum_policy = np.cumsum(policy.action_probs, axis=1)
    cum_kernel = np.cumsum(cmp.transition, axis=2)
    draws = rng.random((horizon, 2))
    states = np.empty(horizon, dtype=np.int64)
    actions = np.empty(horizon, dtype=np.int64)
    last_action = cmp.n_actions - 1
    last_state = cmp.n_states - 1
    for t in range(horizon):
        states[t] = state
        action = int(np.searchsorted(cum_policy[state], draws[t, 0], side="right"))
        action = min(action, last_action)
        actions[t] = action
        state = int(np.searchsorted(cum_kernel[state, action], draws[t, 1], side="right"))
        state = min(state, last_state)
    return Demonstration(task_id=task_id, states=states, actions=actions)


def log_likelihood(policy: StationaryPolicy, demo: Demonstration) -> float:
    """``sum_t log pi(a_t | s_t)``; ``LOG_ZERO`` if any step is impossible."""
    demo.check_bounds(policy.n_states, policy.n_actions)
    probs = policy.action_probs[demo.states, demo.actions]
    if np.any(probs <= 0.0):
        return LOG_ZERO
    return float(np.log(probs).sum())


# ---------------------------------------------------------------------------
# Fast planners used by the samplers and the benchmark harness.  They satisfy
# the same contracts as value_iteration / policy_evaluation (tests cross-check
# them) but solve many reward vectors or policies in one batched call.
# ---------------------------------------------------------------------------


def batch_solve_optimal(transition: np.ndarray, rewards: np.ndarray, discount: float,
                        tolerance: float = 1e-9):
    """Optimal values and greedy actions for a batch of reward vectors.

    ``rewards`` has shape (K, S); returns ``(values, actions)`` with shapes
    (K, S) and (K, S).  Uses policy iteration with exact linear evaluation,
    finishing with Bellman sweeps in the rare case the residual target is
    not yet met.  Ties in the greedy step go to the lowest action index.
    """
    rewards = np.asarray(rewards, dtype=float)
    squeeze = rewards.ndim == 1
    if squeeze:
        rewards = rewards[None, :]
    n_states = transition.shape[0]
    if rewards.shape[1] != n_states:
        raise ValueError(f"rewards must have {n_states} columns, got {rewards.shape}")
    if not np.all(np.isfinite(rewards)):
        raise ValueError("reward entries must be finite")
    k = rewards.shape[0]
    if discount == 0.0:
        values = rewards.copy()
        actions = np.zeros((k, n_states), dtype=np.int64)
        return (values[0], actions[0]) if squeeze else (values, actions)
    eye = np.eye(n_states)
    values = np.zeros((k, n_states))
    prev_actions = None
    for _ in range(200):
        q = rewards[:, :, None] + discount * np.einsum("sat,kt->ksa", transition, values)
        actions = q.argmax(axis=2)
        if prev_actions is not None and np.array_equal(actions, prev_actions):
            break
        rows = transition[np.arange(n_states)[None, :], actions]  # (K, S, S')
        values = np.linalg.solve(eye[None] - discount * rows, rewards[:, :, None])[:, :, 0]
        prev_actions = actions
    # Safety net: polish with Bellman sweeps if any batch member still misses
    # the residual target (exact policy iteration normally lands at ~1e-13).
    stop = tolerance * (1.0 - discount)
    while True:
        bellman = (rewards[:, :, None]
                   + discount * np.einsum("sat,kt->ksa", transition, values)).max(axis=2)
        residual = float(np.max(np.abs(bellman - values)))
        values = bellman
        if residual <= stop:
            break
    q = rewards[:, :, None] + discount * np.einsum("sat,kt->ksa", transition, values)
    actions = q.argmax(axis=2)
    return (values[0], actions[0]) if squeeze else (values, actions)


def batch_policy_values(transition: np.ndarray, rewards: np.ndarray,
                        action_probs: np.ndarray, discount: float) -> np.ndarray:
    """Exact values of many policies under many reward vectors.

    ``rewards``: (N, S); ``action_probs``: (K, S, A).  Returns (K, N, S) where
    ``out[k, n]`` is the value of policy ``k`` under reward ``n``, solved as a
    dense linear system per policy (one factorization, N right-hand sides).
    """
    rewards = np.asarray(rewards, dtype=float)
    action_probs = np.asarray(action_probs, dtype=float)
    if rewards.ndim == 1:
        rewards = rewards[None, :]
    if action_probs.ndim == 2:
        action_probs = action_probs[None]
    n_states = transition.shape[0]
    kernels = np.einsum("ksa,sat->kst", action_probs, transition)  # (K, S, S')
    systems = np.eye(n_states)[None] - discount * kernels
    rhs = np.broadcast_to(rewards.T[None], (action_probs.shape[0], n_states, rewards.shape[0]))
    solved = np.linalg.solve(systems, np.ascontiguousarray(rhs))  # (K, S, N)
    return np.moveaxis(solved, 2, 1)
