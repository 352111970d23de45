"""Degree-distribution statistics, from CCDFs and log bins to tail fits and knees."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import zeta

from .errors import DomainError, InsufficientDataError

MIN_TAIL = 50


@dataclass(frozen=True)
class DegreeHistogram:
    degrees: np.ndarray  # distinct degree values, ascending
    counts: np.ndarray

    @classmethod
    def from_degrees(cls, degrees) -> "DegreeHistogram":
        degrees = np.asarray(degrees, dtype=np.int64)
        if degrees.size == 0:
            raise DomainError("empty degree sequence")
        k, c = np.unique(degrees, return_counts=True)
        return cls(k, c)

    @classmethod
    def from_dict(cls, mapping: dict) -> "DegreeHistogram":
        items = sorted((int(k), int(v)) for k, v in mapping.items() if v > 0)
        if not items:
            raise DomainError("empty histogram")
        k, c = zip(*items)
        return cls(np.array(k, dtype=np.int64), np.array(c, dtype=np.int64))

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.degrees.tolist(), self.counts.tolist()))

    def tail(self, k_min: int) -> "DegreeHistogram":
        keep = self.degrees >= k_min
        return DegreeHistogram(self.degrees[keep], self.counts[keep])

    def expand(self) -> np.ndarray:
        return np.repeat(self.degrees, self.counts)

    def fraction(self, k: int) -> float:
        return float(self.counts[self.degrees == k].sum()) / self.total


@dataclass(frozen=True)
class TailFit:
    model: str  # "power-law" | "exponential"
    parameter: float  # gamma_deg for power-law, rate for exponential
    k_min: int
    log_likelihood: float
    ks: float
    n_tail: int
    degenerate: bool = False


def degree_histogram(graph) -> DegreeHistogram:
    if graph.n_nodes == 0:
        raise DomainError("degree histogram of an empty graph")
    return DegreeHistogram.from_degrees(graph.degree)


def ccdf(hist: DegreeHistogram) -> list[tuple[int, float]]:
    """``(k, P(K >= k))`` at every observed degree."""
    above = np.cumsum(hist.counts[::-1])[::-1]
    return list(zip(hist.degrees.tolist(), (above / hist.total).tolist()))


@dataclass(frozen=True)
class LogBins:
    edges: np.ndarray  # integer edges; bin i holds degrees edges[i] .. edges[i+1]-1
    centers: np.ndarray  # geometric centres
    width: np.ndarray  # number of integers per bin
    density: np.ndarray  # probability per unit degree


def log_binned(hist: DegreeHistogram, bins_per_decade: int = 10) -> LogBins:
    """Logarithmic bins with integer edges; empty-width bins are merged away.

    Degree-0 nodes cannot be placed on a log axis and are excluded; densities
    are normalised over ``k >= 1``.
    """
    if bins_per_decade < 1:
        raise DomainError("bins_per_decade must be >= 1")
    h = hist.tail(1)
    if h.total == 0:
        raise DomainError("no nodes with degree >= 1")
    k_top = int(h.degrees[-1])
    n_edges = int(math.ceil(math.log10(k_top + 1) * bins_per_decade)) + 1
    raw = np.ceil(10.0 ** (np.arange(n_edges + 1) / bins_per_decade)).astype(np.int64)
    edges = np.unique(np.concatenate([raw[raw <= k_top], [k_top + 1]]))
    width = np.diff(edges)
    idx = np.searchsorted(edges, h.degrees, side="right") - 1
    mass = np.bincount(idx, weights=h.counts, minlength=len(width)) / h.total
    centers = np.sqrt(edges[:-1] * (edges[1:] - 1.0))
    return LogBins(edges, centers, width, mass / width)


# -- tail fits ----------------------------------------------------------------

def _ks_discrete(hist: DegreeHistogram, k_min: int, model_cdf) -> float:
    ks = np.arange(k_min, int(hist.degrees[-1]) + 1)
    emp = np.zeros(len(ks))
    np.add.at(emp, hist.degrees - k_min, hist.counts)
    emp = np.cumsum(emp) / hist.total
    return float(np.max(np.abs(emp - model_cdf(ks))))


def _power_law_at(hist: DegreeHistogram, k_min: int) -> TailFit:
    t = hist.tail(k_min)
    n = t.total
    sum_log = float(np.sum(t.counts * np.log(t.degrees)))
    approx = 1.0 + n / float(np.sum(t.counts * np.log(t.degrees / (k_min - 0.5))))
    # the closed form is biased for small k_min; polish it on the exact likelihood
    nll = lambda g: g * sum_log + n * math.log(zeta(g, k_min))
    res = minimize_scalar(nll, bounds=(1.0 + 1e-6, max(8.0, 2.0 * approx)), method="bounded",
                          options={"xatol": 1e-10})
    gamma = float(res.x) if res.fun <= nll(approx) else approx
    norm = zeta(gamma, k_min)
    ks = _ks_discrete(t, k_min, lambda k: 1.0 - zeta(gamma, k + 1) / norm)
    return TailFit("power-law", gamma, int(k_min), -nll(gamma), ks, n)


def fit_power_law(hist: DegreeHistogram, k_min: int | None = None) -> TailFit:
    """Discrete power-law fit ``P(k) = k^-gamma / zeta(gamma, k_min)`` for ``k >= k_min``.

    ``gamma`` starts from the closed form ``1 + n / sum(ln(k / (k_min - 1/2)))``
    and is refined by maximising the exact Hurwitz-zeta likelihood.  Without an
    explicit ``k_min`` every observed degree leaving at least ``MIN_TAIL`` nodes
    in the tail is tried and the KS-closest fit is kept.
    """
    h = hist.tail(1)
    if k_min is not None:
        if h.tail(k_min).total < MIN_TAIL:
            raise InsufficientDataError(f"fewer than {MIN_TAIL} nodes with degree >= {k_min}")
        return _power_law_at(h, k_min)
    above = np.cumsum(h.counts[::-1])[::-1]
    candidates = h.degrees[(above >= MIN_TAIL) & (h.degrees < h.degrees[-1])]
    if len(candidates) == 0:
        raise InsufficientDataError(f"no k_min leaves {MIN_TAIL} nodes in a non-trivial tail")
    fits = [_power_law_at(h, int(k)) for k in candidates]
    return min(fits, key=lambda f: f.ks)


def fit_exponential_tail(hist: DegreeHistogram, k_from: int) -> TailFit:
    """MLE of a geometric tail ``P(k) = (1 - q) q^(k - k_from)``; rate is ``-ln q``.

    A tail with no spread (all degrees equal) is returned flagged ``degenerate``
    with an infinite rate.
    """
    t = hist.tail(k_from)
    n = t.total
    if n < MIN_TAIL:
        raise InsufficientDataError(f"fewer than {MIN_TAIL} nodes with degree >= {k_from}")
    excess = float(np.sum(t.counts * (t.degrees - k_from))) / n
    if excess == 0.0:
        return TailFit("exponential", math.inf, int(k_from), 0.0, 0.0, n, degenerate=True)
    q = excess / (1.0 + excess)
    ks = _ks_discrete(t, k_from, lambda k: 1.0 - q ** (k - k_from + 1))
    ll = n * math.log(1.0 - q) + n * excess * math.log(q)
    return TailFit("exponential", -math.log(q), int(k_from), ll, ks, n)


def ks_distance(hist_a: DegreeHistogram, hist_b: DegreeHistogram) -> float:
    support = np.union1d(hist_a.degrees, hist_b.degrees)

    def cdf(h):
        c = np.zeros(len(support))
        c[np.searchsorted(support, h.degrees)] = h.counts
        return np.cumsum(c) / h.total

    return float(np.max(np.abs(cdf(hist_a) - cdf(hist_b))))


# -- knee detection -----------------------------------------------------------

def _hinge_sse(x, y, xb, sse1):
    a = np.column_stack([np.ones_like(x), x, np.maximum(0.0, x - xb)])
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    if coef[2] > 0:
        # slope flattens past xb: not a knee, the constrained optimum is the single line
        return sse1
    r = y - a @ coef
    return float(r @ r)


def detect_knee(points, n_total: int | None = None, min_count: int = 30,
                points_per_decade: int = 20) -> tuple[int, float]:
    """Breakpoint of a continuous two-segment line through the log-log CCDF.

    The CCDF step function is read off on a log-spaced grid of degrees
    (``points_per_decade``).  With ``n_total`` given, grid points whose CCDF
    covers fewer than ``min_count`` nodes are dropped, since the extreme tail
    is mostly sampling noise.  Returns the breakpoint degree and the fraction
    of the single-line squared error removed by the break, in [0, 1].
    """
    pts = sorted((int(k), float(p)) for k, p in points if k >= 1 and p > 0)
    if len(pts) < 2:
        raise InsufficientDataError("CCDF needs at least two points")
    k = np.array([a for a, _ in pts], dtype=float)
    p = np.array([b for _, b in pts])
    if n_total is not None:
        keep = p * n_total >= min_count
        k, p = k[keep], p[keep]
    if len(k) < 2 or math.log10(k[-1] / k[0]) < 1.5:
        raise InsufficientDataError("CCDF spans less than 1.5 decades")
    lo, hi = math.log10(k[0]), math.log10(k[-1])
    grid = 10.0 ** (np.arange(math.floor(lo * points_per_decade),
                              math.floor(hi * points_per_decade) + 1) / points_per_decade)
    grid = grid[(grid >= k[0]) & (grid <= k[-1])]
    # CCDF is P(K >= g): the value at the first observed degree >= g
    idx = np.searchsorted(k, grid, side="left")
    x = np.log10(grid)
    y = np.log10(p[np.minimum(idx, len(p) - 1)])
    a1 = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(a1, y, rcond=None)
    sse1 = float(np.sum((y - a1 @ coef) ** 2))
    if len(x) < 7:
        raise InsufficientDataError("too few grid points for a two-segment fit")
    best = min((_hinge_sse(x, y, xb, sse1), xb) for xb in x[3:-3])
    conf = 0.0 if sse1 == 0 else min(1.0, max(0.0, 1.0 - best[0] / sse1))
    return int(round(10.0 ** best[1])), conf
