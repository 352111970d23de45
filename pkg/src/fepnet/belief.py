"""Gaussian variational free energy for a single slope belief.

The agent holds a Gaussian prior over the resource-gradient slope ``b`` and a
Gaussian recognition density ``Q(b)``.  Observations are a scalar detection
statistic ``D`` with likelihood ``N(D; alpha*b + beta, var_d)``.

Free energy is ``KL[Q || prior] + E_Q[-ln L]`` with every term that does not
depend on the belief mean dropped from the likelihood part.  Only differences
and gradients in ``mu`` are meaningful under that convention.

All functions accept scalars or numpy arrays for the statistic so that the
spatial simulation can update a whole population in one call.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class GaussianBelief:
    mu: float
    var: float

    def __post_init__(self):
        if not (self.var > 0):
            raise DomainError(f"belief variance must be positive, got {self.var}")
        if not math.isfinite(self.mu):
            raise DomainError(f"belief mean must be finite, got {self.mu}")

    @property
    def sd(self) -> float:
        return math.sqrt(self.var)


@dataclass(frozen=True)
class LikelihoodModel:
    """Detection statistic model ``D ~ N(alpha*b + beta, var_d)``.

    ``alpha == 0`` is allowed and describes a sensor that carries no
    information about the slope.
    """

    alpha: float
    beta: float = 0.0
    var_d: float = 1.0

    def __post_init__(self):
        if not (self.var_d > 0):
            raise DomainError(f"sensory noise variance must be positive, got {self.var_d}")
        if not math.isfinite(self.alpha):
            raise DomainError(f"alpha must be finite, got {self.alpha}")

    def mean(self, b):
        return self.alpha * b + self.beta


@dataclass(frozen=True)
class Observation:
    d_stat: float

    def __post_init__(self):
        if not math.isfinite(self.d_stat):
            raise DomainError(f"detection statistic must be finite, got {self.d_stat}")


def _stat(obs):
    return obs.d_stat if isinstance(obs, Observation) else obs


def kl_gaussians(q: GaussianBelief, p: GaussianBelief) -> float:
    """KL[q || p] for two univariate Gaussians."""
    if q.var <= 0 or p.var <= 0:
        raise DomainError("KL divergence needs positive variances")
    return 0.5 * (math.log(p.var / q.var) + (q.var + (q.mu - p.mu) ** 2) / p.var - 1.0)


def expected_nll(q: GaussianBelief, lik: LikelihoodModel, obs):
    """``E_Q[(D - alpha*b - beta)^2] / (2 var_d)``; normalisation constants dropped."""
    r = _stat(obs) - lik.beta
    a = lik.alpha
    return (r * r - 2.0 * a * r * q.mu + a * a * (q.mu * q.mu + q.var)) / (2.0 * lik.var_d)


def free_energy(q: GaussianBelief, prior: GaussianBelief, lik: LikelihoodModel, obs):
    return kl_gaussians(q, prior) + expected_nll(q, lik, obs)


def grad_f_mu(mu_b, q_var: float, prior: GaussianBelief, lik: LikelihoodModel, obs):
    """dF/dmu of the free energy at fixed recognition variance.

    ``q_var`` does not enter the derivative; it is accepted so the call mirrors
    the state the gradient is taken at.
    """
    if not (q_var > 0):
        raise DomainError(f"recognition variance must be positive, got {q_var}")
    r = _stat(obs) - lik.beta
    a = lik.alpha
    return (mu_b - prior.mu) / prior.var + (-a * r + a * a * mu_b) / lik.var_d


def posterior_mean(prior: GaussianBelief, lik: LikelihoodModel, obs):
    """Stationary point of the free energy in mu: a precision-weighted average
    of the prior mean and the evidence ``(D - beta) / alpha``."""
    a = lik.alpha
    num = (a / lik.var_d) * (_stat(obs) - lik.beta) + prior.mu / prior.var
    den = a * a / lik.var_d + 1.0 / prior.var
    return num / den


def posterior_var(prior: GaussianBelief, lik: LikelihoodModel) -> float:
    return 1.0 / (1.0 / prior.var + lik.alpha ** 2 / lik.var_d)


def coupling_c(prior: GaussianBelief, lik: LikelihoodModel) -> float:
    """Slope of belief strength against cluster size, ``mu_b ~ C * d``."""
    s = lik.alpha ** 2 * prior.var
    return s / (s + lik.var_d)


def velocity_from_belief(mu_b, gain: float, v_max: float):
    if gain <= 0 or v_max <= 0:
        raise DomainError("gain and v_max must be positive")
    if isinstance(mu_b, np.ndarray):
        return np.clip(gain * mu_b, -v_max, v_max)
    return max(-v_max, min(v_max, gain * mu_b))
