"""Prior families over rewards, softmax temperatures, policies and optimality.

The reward priors share a small duck-typed surface used by the samplers:
``sample(rng)`` returning a :class:`~multitask_irl.mdp.RewardFunction`,
``sample_batch(rng, k)`` returning a ``(k, n_states)`` array, and
``log_pdf(values)`` for the Metropolis-Hastings target.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import betaln, gammaln, xlogy

from .mdp import Demonstration, RewardFunction, StationaryPolicy

__all__ = [
    "DirichletRewardPrior",
    "BetaProductRewardPrior",
    "DiscreteRewardPrior",
    "TemperaturePrior",
    "FixedTemperature",
    "GammaHyperprior",
    "FixedHyperprior",
    "PolicyDirichletPrior",
    "OptimalityPrior",
    "sample_reward",
    "sample_hyper",
    "policy_posterior",
    "sample_policy",
    "sample_policies",
    "exp_interval_mass",
]


def _positive_vector(values, name: str) -> np.ndarray:
    out = np.array(values, dtype=float)
    out.setflags(write=False)
    if out.ndim != 1 or out.shape[0] < 1:
        raise ValueError(f"{name} must be a non-empty vector, got shape {out.shape}")
    if not np.all(np.isfinite(out)) or np.any(out <= 0):
        raise ValueError(f"{name} entries must be finite and strictly positive")
    return out


def _gamma_log_pdf(x, shape: float, rate: float):
    x = np.asarray(x, dtype=float)
    return shape * np.log(rate) - gammaln(shape) + xlogy(shape - 1.0, x) - rate * x


@dataclass(frozen=True)
class DirichletRewardPrior:
    """Dirichlet distribution over reward vectors on the probability simplex."""

    concentration: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "concentration", _positive_vector(self.concentration, "concentration")
        )

    @property
    def n_states(self) -> int:
        return self.concentration.shape[0]

    def sample(self, rng) -> RewardFunction:
        return RewardFunction(rng.dirichlet(self.concentration))

    def sample_batch(self, rng, k: int) -> np.ndarray:
        return rng.dirichlet(self.concentration, size=k)

    def mean(self) -> np.ndarray:
        return self.concentration / self.concentration.sum()

    def log_pdf(self, values) -> float:
        values = np.asarray(values, dtype=float)
        if values.shape != self.concentration.shape:
            raise ValueError("reward vector has the wrong length for this prior")
        # xlogy keeps alpha = 1 coordinates finite at the simplex boundary.
        log_norm = gammaln(self.concentration.sum()) - gammaln(self.concentration).sum()
        return float(log_norm + xlogy(self.concentration - 1.0, values).sum())


@dataclass(frozen=True)
class BetaProductRewardPrior:
    """Independent Beta(alpha_s, beta_s) reward per state, on [0, 1]^S."""

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        alpha = _positive_vector(self.alpha, "alpha")
        beta = _positive_vector(self.beta, "beta")
        if alpha.shape != beta.shape:
            raise ValueError("alpha and beta must have the same length")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def n_states(self) -> int:
        return self.alpha.shape[0]

    def sample(self, rng) -> RewardFunction:
        return RewardFunction(rng.beta(self.alpha, self.beta))

    def sample_batch(self, rng, k: int) -> np.ndarray:
        return rng.beta(self.alpha, self.beta, size=(k, self.n_states))

    def mean(self) -> np.ndarray:
        return self.alpha / (self.alpha + self.beta)

    def log_pdf(self, values) -> float:
        values = np.asarray(values, dtype=float)
        if values.shape != self.alpha.shape:
            raise ValueError("reward vector has the wrong length for this prior")
        terms = (
            xlogy(self.alpha - 1.0, values)
            + xlogy(self.beta - 1.0, 1.0 - values)
            - betaln(self.alpha, self.beta)
        )
        return float(terms.sum())


@dataclass(frozen=True)
class DiscreteRewardPrior:
    """Finite grid of reward vectors with atom probabilities.

    Used wherever the reward space is deliberately discretized, e.g. the
    two-point hypothesis setups whose posteriors can be enumerated exactly.
    """

    atoms: np.ndarray
    weights: np.ndarray = None

    def __post_init__(self):
        atoms = np.array(self.atoms, dtype=float)
        if atoms.ndim != 2 or atoms.shape[0] < 1:
            raise ValueError(f"atoms must have shape (n_atoms, n_states), got {atoms.shape}")
        if np.any(atoms < 0) or np.any(atoms > 1) or not np.all(np.isfinite(atoms)):
            raise ValueError("atom rewards must be finite and lie in [0, 1]")
        atoms.setflags(write=False)
        if self.weights is None:
            weights = np.full(atoms.shape[0], 1.0 / atoms.shape[0])
        else:
            weights = np.array(self.weights, dtype=float)
            if weights.shape != (atoms.shape[0],) or np.any(weights <= 0):
                raise ValueError("weights must be one positive value per atom")
            weights = weights / weights.sum()
        weights.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @property
    def n_states(self) -> int:
        return self.atoms.shape[1]

    @property
    def n_atoms(self) -> int:
        return self.atoms.shape[0]

    def sample(self, rng) -> RewardFunction:
        return RewardFunction(self.atoms[rng.choice(self.n_atoms, p=self.weights)])

    def sample_batch(self, rng, k: int) -> np.ndarray:
        return self.atoms[rng.choice(self.n_atoms, size=k, p=self.weights)]

    def atom_index(self, values) -> int:
        """Index of the atom matching ``values`` within 1e-12, or -1."""
        values = np.asarray(values, dtype=float)
        hits = np.nonzero(np.all(np.abs(self.atoms - values[None, :]) <= 1e-12, axis=1))[0]
        return int(hits[0]) if hits.size else -1

    def log_pdf(self, values) -> float:
        index = self.atom_index(values)
        return float(np.log(self.weights[index])) if index >= 0 else -np.inf


@dataclass(frozen=True)
class TemperaturePrior:
    """Gamma(shape, rate) prior over the softmax temperature (mean shape/rate)."""

    shape: float
    rate: float

    def __post_init__(self):
        for name in ("shape", "rate"):
            value = float(getattr(self, name))
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and positive, got {value}")
            object.__setattr__(self, name, value)

    def sample(self, rng) -> float:
        return float(rng.gamma(self.shape) / self.rate)

    def sample_batch(self, rng, k: int) -> np.ndarray:
        return rng.gamma(self.shape, size=k) / self.rate

    def mean(self) -> float:
        return self.shape / self.rate

    def log_pdf(self, eta: float) -> float:
        if eta <= 0:
            return -np.inf
        return float(_gamma_log_pdf(eta, self.shape, self.rate))


@dataclass(frozen=True)
class FixedTemperature:
    """Point mass at a known temperature (degenerate prior)."""

    value: float

    def __post_init__(self):
        value = float(self.value)
        if not (np.isfinite(value) and value >= 0):
            raise ValueError(f"temperature must be finite and non-negative, got {value}")
        object.__setattr__(self, "value", value)

    def sample(self, rng) -> float:
        return self.value

    def sample_batch(self, rng, k: int) -> np.ndarray:
        return np.full(k, self.value)

    def mean(self) -> float:
        return self.value

    def log_pdf(self, eta: float) -> float:
        # Density w.r.t. counting measure on the single atom; only ever
        # evaluated at the atom itself because the value is never moved.
        return 0.0


@dataclass(frozen=True)
class GammaHyperprior:
    """Independent Gamma laws over the population-level parameters.

    Draws a Dirichlet reward-prior concentration (one Gamma per state) and
    the (shape, rate) pair of the temperature prior.  ``*_law`` fields are
    (shape, rate) pairs of the generating Gamma distributions.
    """

    n_states: int
    concentration_law: tuple = (1.0, 10.0)
    temperature_shape_law: tuple = (1.0, 1.0)
    temperature_rate_law: tuple = (1.0, 1.0)

    def __post_init__(self):
        if int(self.n_states) < 1:
            raise ValueError("n_states must be at least 1")
        object.__setattr__(self, "n_states", int(self.n_states))
        for name in ("concentration_law", "temperature_shape_law", "temperature_rate_law"):
            shape, rate = (float(v) for v in getattr(self, name))
            if not (shape > 0 and rate > 0 and np.isfinite(shape) and np.isfinite(rate)):
                raise ValueError(f"{name} must be a positive (shape, rate) pair")
            object.__setattr__(self, name, (shape, rate))

    def sample(self, rng):
        concentration = rng.gamma(self.concentration_law[0], size=self.n_states)
        concentration /= self.concentration_law[1]
        t_shape = rng.gamma(self.temperature_shape_law[0]) / self.temperature_shape_law[1]
        t_rate = rng.gamma(self.temperature_rate_law[0]) / self.temperature_rate_law[1]
        return DirichletRewardPrior(concentration), TemperaturePrior(t_shape, t_rate)

    def sample_batch(self, rng, k: int):
        """Vectorized hyper draws: (concentrations (k, S), shapes (k,), rates (k,))."""
        conc = rng.gamma(self.concentration_law[0], size=(k, self.n_states))
        conc /= self.concentration_law[1]
        shapes = rng.gamma(self.temperature_shape_law[0], size=k) / self.temperature_shape_law[1]
        rates = rng.gamma(self.temperature_rate_law[0], size=k) / self.temperature_rate_law[1]
        return conc, shapes, rates

    def log_pdf(self, reward_prior: DirichletRewardPrior, temp_prior: TemperaturePrior) -> float:
        total = _gamma_log_pdf(reward_prior.concentration, *self.concentration_law).sum()
        total += _gamma_log_pdf(temp_prior.shape, *self.temperature_shape_law)
        total += _gamma_log_pdf(temp_prior.rate, *self.temperature_rate_law)
        return float(total)

    def propose(self, pair, rng, step: float):
        """Multiplicative log-normal step on every hyper coordinate.

        Returns ``(new_pair, log_hastings)`` where the correction is the sum
        of ``log(new) - log(old)`` over coordinates.
        """
        reward_prior, temp_prior = pair
        old = np.concatenate([reward_prior.concentration, [temp_prior.shape, temp_prior.rate]])
        new = old * np.exp(step * rng.standard_normal(old.shape[0]))
        proposal = (DirichletRewardPrior(new[:-2]), TemperaturePrior(new[-2], new[-1]))
        return proposal, float(np.log(new).sum() - np.log(old).sum())


@dataclass(frozen=True)
class FixedHyperprior:
    """Degenerate hyperprior: a known reward prior and temperature prior."""

    reward_prior: object
    temperature_prior: object

    def sample(self, rng):
        return self.reward_prior, self.temperature_prior

    def log_pdf(self, reward_prior, temp_prior) -> float:
        return 0.0

    def propose(self, pair, rng, step: float):
        return None  # nothing to move


@dataclass(frozen=True)
class PolicyDirichletPrior:
    """Independent Dirichlet prior over each state's action distribution."""

    concentration: np.ndarray

    def __post_init__(self):
        conc = np.array(self.concentration, dtype=float)
        if conc.ndim != 2:
            raise ValueError(f"concentration must be (n_states, n_actions), got {conc.shape}")
        if not np.all(np.isfinite(conc)) or np.any(conc <= 0):
            raise ValueError("concentration entries must be finite and strictly positive")
        conc.setflags(write=False)
        object.__setattr__(self, "concentration", conc)

    @property
    def n_states(self) -> int:
        return self.concentration.shape[0]

    @property
    def n_actions(self) -> int:
        return self.concentration.shape[1]

    @classmethod
    def uniform(cls, n_states: int, n_actions: int, strength: float = 1.0) -> "PolicyDirichletPrior":
        return cls(np.full((n_states, n_actions), strength))

    def mean(self) -> StationaryPolicy:
        probs = self.concentration / self.concentration.sum(axis=1, keepdims=True)
        return StationaryPolicy(probs)


def policy_posterior(prior: PolicyDirichletPrior, demos) -> PolicyDirichletPrior:
    """Conjugate update: add observed (state, action) counts to the prior.

    Rows of states never visited keep the prior concentration; an empty
    demonstration list returns the prior unchanged.
    """
    counts = np.zeros_like(prior.concentration)
    for demo in demos:
        if not isinstance(demo, Demonstration):
            raise TypeError(f"expected Demonstration, got {type(demo).__name__}")
        demo.check_bounds(prior.n_states, prior.n_actions)
        np.add.at(counts, (demo.states, demo.actions), 1.0)
    return PolicyDirichletPrior(prior.concentration + counts)


def sample_policy(posterior: PolicyDirichletPrior, rng) -> StationaryPolicy:
    """Draw one policy: each state's action row from its Dirichlet."""
    rows = np.stack([rng.dirichlet(row) for row in posterior.concentration])
    return StationaryPolicy(rows)


def sample_policies(posterior: PolicyDirichletPrior, k: int, rng) -> np.ndarray:
    """Draw ``k`` policies at once; returns a ``(k, S, A)`` array."""
    out = np.empty((k, posterior.n_states, posterior.n_actions))
    for s, row in enumerate(posterior.concentration):
        out[:, s, :] = rng.dirichlet(row, size=k)
    return out


@dataclass(frozen=True)
class OptimalityPrior:
    """Exponential prior with rate ``c`` over the optimality slack epsilon."""

    rate: float = 1.0

    def __post_init__(self):
        rate = float(self.rate)
        if not (np.isfinite(rate) and rate > 0):
            raise ValueError(f"rate must be finite and positive, got {rate}")
        object.__setattr__(self, "rate", rate)

    def interval_mass(self, a, b) -> float:
        return exp_interval_mass(self.rate, a, b)


def exp_interval_mass(rate: float, a, b):
    """Mass the Exponential(rate) law places on ``[a, b)``; ``b`` may be inf."""
    if not (np.isfinite(rate) and rate > 0):
        raise ValueError(f"rate must be finite and positive, got {rate}")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a < 0) or np.any(np.isnan(b)) or np.any(b < a):
        raise ValueError("interval must satisfy 0 <= a <= b")
    result = np.exp(-rate * a) - np.exp(-rate * b)  # exp(-inf) is exactly 0
    return float(result) if result.ndim == 0 else result


def sample_reward(prior, rng) -> RewardFunction:
    """Draw one reward function from any reward prior."""
    return prior.sample(rng)


def sample_hyper(hyperprior, rng):
    """Draw (reward prior, temperature prior) from a hyperprior."""
    return hyperprior.sample(rng)
