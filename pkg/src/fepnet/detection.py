"""Neighbour detection: binomial counts, the signed statistic and its Gaussian limit."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

DEFAULT_D_REF = 10


@dataclass(frozen=True)
class DetectionParams:
    """Per-window detection model.

    ``eta`` is the noise scale of the Gaussian approximation ``D ~ N(alpha*d, eta^2)``.
    It is a free parameter; when omitted it defaults to the binomial spread of a
    reference cluster of ``DEFAULT_D_REF`` members, ``sqrt(d_ref p (1-p)) / tau``.
    """

    p_detect: float
    tau: float = 1.0
    eta: float | None = None

    def __post_init__(self):
        if not (0.0 < self.p_detect <= 1.0):
            raise DomainError(f"p_detect must lie in (0, 1], got {self.p_detect}")
        if not (self.tau > 0):
            raise DomainError(f"tau must be positive, got {self.tau}")
        if self.eta is None:
            object.__setattr__(self, "eta", default_eta(self.p_detect, self.tau))
        if not (self.eta > 0):
            raise DomainError(
                f"eta must be positive, got {self.eta} (p_detect=1 needs an explicit eta)")

    @property
    def alpha(self) -> float:
        return alpha_rate(self)


@dataclass(frozen=True)
class ClusterScene:
    d_right: int
    d_left: int = 0

    def __post_init__(self):
        if self.d_right < 0 or self.d_left < 0:
            raise DomainError("cluster counts must be non-negative")


def default_eta(p_detect: float, tau: float, d_ref: int = DEFAULT_D_REF) -> float:
    return math.sqrt(d_ref * p_detect * (1.0 - p_detect)) / tau


def alpha_rate(params: DetectionParams) -> float:
    return params.p_detect / params.tau


def sample_detection_statistic(scene: ClusterScene, params: DetectionParams,
                               rng: np.random.Generator, size=None):
    """Right-minus-left detection count per unit time.

    Each member is detected independently with probability ``p_detect`` during
    the window, so the statistic has mean ``alpha * (d_right - d_left)``.
    """
    right = rng.binomial(scene.d_right, params.p_detect, size=size)
    left = rng.binomial(scene.d_left, params.p_detect, size=size)
    return (right - left) / params.tau


def gaussian_stat_params(d: int, params: DetectionParams) -> tuple[float, float]:
    if d < 0:
        raise DomainError("cluster size must be non-negative")
    return alpha_rate(params) * d, params.eta ** 2


def snr(d: int, params: DetectionParams) -> float:
    if d < 0:
        raise DomainError("cluster size must be non-negative")
    return alpha_rate(params) * d / params.eta


def split_seed(master: int, index: int) -> int:
    """Seed for task ``index`` derived from a master seed (XOR rule)."""
    return (int(master) ^ int(index)) & 0xFFFFFFFFFFFFFFFF
