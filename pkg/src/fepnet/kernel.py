"""Attachment kernels and the characteristic scales that bound their regimes.

Two kernels are provided:

* ``mechanistic_kernel`` -- the inverse of the time an agent needs to detect
  and reach a cluster of size ``d`` under capped sensing and motion;
* ``phenomenological_kernel`` -- flat below the noise scale, a power law
  ``(d/d_noise)**nu`` up to the saturation scale ``k_star`` and an exponential
  cutoff beyond it.

Kernel functions accept integer arrays as well as scalars.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .belief import GaussianBelief, LikelihoodModel, coupling_c
from .errors import ConfigError, DegenerateSpecError, DomainError

Kernel = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class AgentLimits:
    k_max: float = math.inf
    b_max: float = math.inf
    v_max: float = math.inf

    def __post_init__(self):
        for name in ("k_max", "b_max", "v_max"):
            if not (getattr(self, name) > 0):
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")


def default_b_max(prior: GaussianBelief, lik: LikelihoodModel) -> float:
    """Belief cap ``sigma_pi / alpha``.

    Under this choice ``b_max / C`` equals the expanded form
    ``(sigma_pi/alpha) * (1 + var_d / (alpha^2 var_pi))``.
    """
    if lik.alpha == 0:
        return math.inf
    return prior.sd / abs(lik.alpha)


@dataclass(frozen=True)
class KernelSpec:
    lik: LikelihoodModel
    prior: GaussianBelief
    limits: AgentLimits = field(default_factory=AgentLimits)
    gain: float = 1.0
    eta: float = 1.0
    beta_det: float = 2.0
    l_char: float = 1.0
    t0: float = 1.0
    decay_s: float | None = None
    nu: float | None = None

    def __post_init__(self):
        problems = []
        if not (self.gain > 0):
            problems.append(f"gain must be positive, got {self.gain}")
        if not (self.eta > 0):
            problems.append(f"eta must be positive, got {self.eta}")
        if not (self.beta_det >= 0):
            problems.append(f"beta_det must be >= 0, got {self.beta_det}")
        if not (self.l_char > 0):
            problems.append(f"l_char must be positive, got {self.l_char}")
        if not (self.t0 >= 0):
            problems.append(f"t0 must be >= 0, got {self.t0}")
        if self.decay_s is not None and not (self.decay_s > 0):
            problems.append(f"decay_s must be positive, got {self.decay_s}")
        if self.nu is not None and not math.isfinite(self.nu):
            problems.append(f"nu must be finite, got {self.nu}")
        if problems:
            raise ConfigError(problems)

    @classmethod
    def from_flat(cls, alpha=1.0, beta=0.0, var_d=1.0, prior_mu=0.0, prior_var=1.0,
                  k_max=math.inf, b_max=None, v_max=math.inf, **rest) -> "KernelSpec":
        lik = LikelihoodModel(alpha, beta, var_d)
        prior = GaussianBelief(prior_mu, prior_var)
        if b_max is None:
            b_max = default_b_max(prior, lik)
        return cls(lik=lik, prior=prior, limits=AgentLimits(k_max, b_max, v_max), **rest)


@dataclass(frozen=True)
class CharacteristicScales:
    d_belief: float
    d_sensory: float
    d_ability: float
    d_noise: float
    k_star: float


class Regime(enum.Enum):
    NOISE_DOMINATED = "noise-dominated"
    OPTIMAL_DETECTION = "optimal-detection"
    SATURATED = "saturated"


def characteristic_scales(spec: KernelSpec) -> CharacteristicScales:
    c = coupling_c(spec.prior, spec.lik)
    if c == 0:
        raise DegenerateSpecError("alpha = 0 gives zero coupling; all characteristic scales diverge")
    d_belief = spec.limits.b_max / c
    d_sensory = float(spec.limits.k_max)
    d_ability = spec.limits.v_max / (spec.gain * c)
    return CharacteristicScales(
        d_belief=d_belief,
        d_sensory=d_sensory,
        d_ability=d_ability,
        d_noise=spec.eta / abs(spec.lik.alpha),
        k_star=min(d_belief, d_sensory, d_ability),
    )


def _check_scales(scales: CharacteristicScales):
    if scales.d_noise >= scales.k_star:
        raise ConfigError(
            f"noise scale d_noise={scales.d_noise:g} must lie below saturation scale "
            f"k_star={scales.k_star:g}")


def classify_regime(d: float, scales: CharacteristicScales) -> Regime:
    _check_scales(scales)
    if d < 0:
        raise DomainError("cluster size must be non-negative")
    if d <= scales.d_noise:
        return Regime.NOISE_DOMINATED
    if d >= scales.k_star:
        return Regime.SATURATED
    return Regime.OPTIMAL_DETECTION


def attachment_time(d, spec: KernelSpec):
    """Detection time plus travel time for a cluster of size ``d``.

    Returns ``inf`` where the capped velocity is zero.
    """
    d = np.asarray(d, dtype=float)
    if np.any(d < 1):
        raise DomainError("attachment time is defined for d >= 1")
    lim = spec.limits
    c = coupling_c(spec.prior, spec.lik)
    d_eff = np.minimum(d, lim.k_max)
    mu = np.minimum(c * d_eff, lim.b_max)
    v = np.minimum(spec.gain * mu, lim.v_max)
    with np.errstate(divide="ignore"):
        t_move = np.where(v > 0, spec.l_char / np.where(v > 0, v, 1.0), np.inf)
    t = spec.t0 * d_eff ** (-spec.beta_det / 2.0) + t_move
    return t if t.ndim else float(t)


def mechanistic_kernel(d, spec: KernelSpec):
    return 1.0 / attachment_time(d, spec)


def resolve_nu(spec: KernelSpec, scales: CharacteristicScales) -> float:
    """``spec.nu`` if set, else the local slope of the mechanistic kernel at the
    geometric midpoint of the optimal-detection band."""
    if spec.nu is not None:
        return spec.nu
    d_mid = max(2, round(math.sqrt(scales.d_noise * scales.k_star)))
    return local_log_slope(lambda x: mechanistic_kernel(x, spec), d_mid)


def resolve_decay(spec: KernelSpec, scales: CharacteristicScales) -> float:
    return spec.decay_s if spec.decay_s is not None else scales.k_star / 4.0


def phenomenological_kernel(d, scales: CharacteristicScales, spec: KernelSpec):
    _check_scales(scales)
    nu = resolve_nu(spec, scales)
    decay = resolve_decay(spec, scales)
    return _piecewise(d, scales.d_noise, scales.k_star, nu, decay)


def _piecewise(d, d_noise, k_star, nu, decay):
    d = np.asarray(d, dtype=float)
    if np.any(d < 1):
        raise DomainError("kernel is defined for d >= 1")
    k_top = (k_star / d_noise) ** nu
    out = np.where(
        d <= d_noise, 1.0,
        np.where(d <= k_star, (d / d_noise) ** nu, k_top * np.exp(-(d - k_star) / decay)))
    return out if out.ndim else float(out)


def piecewise_kernel(d_noise: float, k_star: float, nu: float, decay_s: float) -> Kernel:
    """Phenomenological kernel with its scales given directly."""
    if d_noise >= k_star:
        raise ConfigError(f"d_noise={d_noise:g} must lie below k_star={k_star:g}")
    return lambda d: _piecewise(d, d_noise, k_star, nu, decay_s)


def local_log_slope(kernel, d: int) -> float:
    """Centred log-log slope ``dlnK/dln d`` at ``d`` from its integer neighbours."""
    if d < 2:
        raise DomainError("local slope needs d >= 2")
    lo, hi = float(kernel(d - 1)), float(kernel(d + 1))
    if not (lo > 0 and hi > 0):
        raise DomainError(f"kernel must be positive around d={d} (got {lo}, {hi})")
    return (math.log(hi) - math.log(lo)) / (math.log(d + 1) - math.log(d - 1))


def linear_kernel(d):
    return np.asarray(d, dtype=float)


def uniform_kernel(d):
    return np.ones_like(np.asarray(d, dtype=float))


def make_kernel(choice: str, spec: KernelSpec | None = None) -> Kernel:
    """Kernel callable for a growth config choice."""
    if choice == "linear-BA":
        return linear_kernel
    if choice == "uniform":
        return uniform_kernel
    if spec is None:
        raise ConfigError(f"kernel choice {choice!r} needs kernel parameters")
    if choice == "mechanistic":
        return lambda d: mechanistic_kernel(d, spec)
    if choice == "phenomenological":
        scales = characteristic_scales(spec)
        return piecewise_kernel(scales.d_noise, scales.k_star,
                                resolve_nu(spec, scales), resolve_decay(spec, scales))
    raise ConfigError(f"unknown kernel choice {choice!r}")


def kernel_table(spec: KernelSpec, d_max: int) -> list[dict]:
    """Rows ``d, mechanistic, phenomenological, regime, local_slope`` for ``d = 1..d_max``.

    ``local_slope`` is that of the mechanistic kernel and is blank at ``d = 1``.
    """
    scales = characteristic_scales(spec)
    mech = lambda x: mechanistic_kernel(x, spec)
    ds = np.arange(1, d_max + 1)
    m = mech(ds)
    p = phenomenological_kernel(ds, scales, spec)
    rows = []
    for d, mv, pv in zip(ds.tolist(), np.atleast_1d(m).tolist(), np.atleast_1d(p).tolist()):
        rows.append({
            "d": d,
            "mechanistic": mv,
            "phenomenological": pv,
            "regime": classify_regime(d, scales).value,
            "local_slope": local_log_slope(mech, d) if d >= 2 else None,
        })
    return rows
