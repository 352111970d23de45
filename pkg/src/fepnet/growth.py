"""Kernel-driven network growth and its mean-field oracle.

Growth starts from a ring of ``seed_nodes`` nodes.  Each arriving node links to
``m_links`` distinct existing nodes, picked with probability proportional to
``kernel(degree)``.  Targets are drawn with replacement and duplicates rejected;
weights change only after all links of the arriving node have landed.

Sampling goes through a sum tree, so each draw and each weight update costs
O(log n).  The hot loop is compiled with numba and consumes the caller's
``numpy.random.Generator`` directly, so results depend only on the seed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .errors import ConfigError, GrowthError

KERNEL_CHOICES = ("mechanistic", "phenomenological", "linear-BA", "uniform")


# -- sum tree -----------------------------------------------------------------

@numba.njit(cache=True)
def _tree_set(tree, cap, i, w):
    j = i + cap
    tree[j] = w
    j //= 2
    while j >= 1:
        tree[j] = tree[2 * j] + tree[2 * j + 1]
        j //= 2


@numba.njit(cache=True)
def _tree_find(tree, cap, u):
    j = 1
    while j < cap:
        left = tree[2 * j]
        if u < left:
            j = 2 * j
        else:
            u -= left
            j = 2 * j + 1
    return j - cap


@numba.njit(cache=True)
def _tree_draw(tree, cap, rng):
    # float round-off can land on an empty leaf; redraw
    while True:
        i = _tree_find(tree, cap, rng.random() * tree[1])
        if tree[i + cap] > 0.0:
            return i


@numba.njit(cache=True)
def _tree_sample(tree, cap, rng, size):
    out = np.empty(size, np.int64)
    for s in range(size):
        out[s] = _tree_draw(tree, cap, rng)
    return out


class SumTree:
    """Binary sum tree over non-negative weights with O(log n) update and draw."""

    def __init__(self, capacity: int):
        cap = 1
        while cap < max(capacity, 1):
            cap *= 2
        self.capacity = cap
        self.tree = np.zeros(2 * cap)

    @classmethod
    def from_weights(cls, weights) -> "SumTree":
        weights = np.asarray(weights, dtype=float)
        t = cls(len(weights))
        t.tree[t.capacity:t.capacity + len(weights)] = weights
        for j in range(t.capacity - 1, 0, -1):
            t.tree[j] = t.tree[2 * j] + t.tree[2 * j + 1]
        return t

    @property
    def total(self) -> float:
        return float(self.tree[1])

    def __getitem__(self, i):
        return float(self.tree[self.capacity + i])

    def update(self, i: int, w: float):
        if w < 0:
            raise ValueError("weights must be non-negative")
        _tree_set(self.tree, self.capacity, i, float(w))

    def find(self, u: float) -> int:
        return int(_tree_find(self.tree, self.capacity, u))

    def sample(self, rng: np.random.Generator, size: int = 1) -> np.ndarray:
        if self.total <= 0:
            raise ValueError("cannot sample from an empty tree")
        return _tree_sample(self.tree, self.capacity, rng, size)


# -- graphs -------------------------------------------------------------------

@dataclass
class Graph:
    """Undirected simple graph stored as an edge array plus degrees."""

    n_nodes: int
    src: np.ndarray
    dst: np.ndarray
    degree: np.ndarray

    @classmethod
    def from_edges(cls, n_nodes: int, edges) -> "Graph":
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        deg = np.bincount(e.ravel(), minlength=n_nodes).astype(np.int64)
        return cls(n_nodes, e[:, 0].copy(), e[:, 1].copy(), deg)

    @classmethod
    def ring(cls, n: int) -> "Graph":
        i = np.arange(n)
        return cls.from_edges(n, np.column_stack([i, (i + 1) % n]))

    @property
    def n_edges(self) -> int:
        return len(self.src)

    def edges(self) -> np.ndarray:
        """Edges as ``(u, v)`` rows with ``u < v``, sorted ascending."""
        e = np.column_stack([np.minimum(self.src, self.dst), np.maximum(self.src, self.dst)])
        order = np.lexsort((e[:, 1], e[:, 0]))
        return e[order]

    def check(self):
        """Raise AssertionError if the graph is not simple or degrees are stale."""
        assert np.all(self.src != self.dst), "self-loop"
        e = self.edges()
        if len(e) > 1:
            dup = np.all(e[1:] == e[:-1], axis=1)
            assert not dup.any(), "duplicate edge"
        assert self.degree.sum() == 2 * self.n_edges, "degree sum"
        deg = np.bincount(np.concatenate([self.src, self.dst]), minlength=self.n_nodes)
        assert np.array_equal(deg, self.degree), "degree array out of date"


@dataclass(frozen=True)
class GrowthConfig:
    n_final: int
    m_links: int = 1
    seed_nodes: int | None = None
    kernel: str = "linear-BA"
    seed: int = 0

    def __post_init__(self):
        if self.seed_nodes is None:
            object.__setattr__(self, "seed_nodes", max(3, self.m_links))
        problems = []
        if self.m_links < 1:
            problems.append(f"m_links must be >= 1, got {self.m_links}")
        if self.seed_nodes < max(3, self.m_links):
            problems.append(
                f"seed_nodes={self.seed_nodes} must be >= max(3, m_links={self.m_links})")
        if self.n_final < self.seed_nodes:
            problems.append(f"n_final={self.n_final} is below seed_nodes={self.seed_nodes}")
        if self.kernel not in KERNEL_CHOICES:
            problems.append(f"kernel must be one of {KERNEL_CHOICES}, got {self.kernel!r}")
        if problems:
            raise ConfigError(problems)


def tabulate(kernel, k_max: int) -> np.ndarray:
    """``kernel(k)`` for ``k = 0..k_max``; entry 0 is unused and set to 0."""
    ks = np.arange(1, k_max + 1)
    try:
        vals = np.broadcast_to(np.asarray(kernel(ks), dtype=float), ks.shape)
    except (TypeError, ValueError):
        vals = np.array([float(kernel(int(k))) for k in ks])
    return np.concatenate([[0.0], vals])


@numba.njit(cache=True)
def _grow_loop(rng, table, degree, tree, cap, src, dst, n_seed, n_final, m):
    chosen = np.empty(m, np.int64)
    e = n_seed
    for new in range(n_seed, n_final):
        c = 0
        while c < m:
            i = _tree_draw(tree, cap, rng)
            dup = False
            for j in range(c):
                if chosen[j] == i:
                    dup = True
                    break
            if not dup:
                chosen[c] = i
                c += 1
        for j in range(m):
            t = chosen[j]
            src[e] = t
            dst[e] = new
            e += 1
            degree[t] += 1
            w = table[degree[t]]
            if not (w > 0.0 and w < np.inf):
                return t, degree[t]
            _tree_set(tree, cap, t, w)
        degree[new] = m
        w = table[m]
        if not (w > 0.0 and w < np.inf):
            return new, m
        _tree_set(tree, cap, new, w)
    return -1, -1


def grow(config: GrowthConfig, kernel, rng: np.random.Generator | None = None) -> Graph:
    """Grow a network to ``config.n_final`` nodes under ``kernel``."""
    if rng is None:
        rng = np.random.default_rng(config.seed)
    n, m, s = config.n_final, config.m_links, config.seed_nodes
    table = tabulate(kernel, n)
    if not (table[2] > 0 and np.isfinite(table[2])):
        raise GrowthError(f"kernel(2) = {table[2]} on the seed ring; kernel must be finite and positive")
    n_edges = s + m * (n - s)
    src = np.empty(n_edges, np.int64)
    dst = np.empty(n_edges, np.int64)
    src[:s] = np.arange(s)
    dst[:s] = (np.arange(s) + 1) % s
    degree = np.zeros(n, np.int64)
    degree[:s] = 2
    sampler = SumTree(n)
    sampler.tree[sampler.capacity:sampler.capacity + s] = table[2]
    for j in range(sampler.capacity - 1, 0, -1):
        sampler.tree[j] = sampler.tree[2 * j] + sampler.tree[2 * j + 1]
    node, deg = _grow_loop(rng, table, degree, sampler.tree, sampler.capacity,
                           src, dst, s, n, m)
    if node >= 0:
        raise GrowthError(f"kernel({deg}) = {table[deg]} is not finite and positive "
                          f"(node {node} reached degree {deg})")
    return Graph(n, src, dst, degree)


def grow_ba(config: GrowthConfig, rng: np.random.Generator | None = None) -> Graph:
    """Barabasi-Albert baseline: growth with ``K(k) = k``."""
    return grow(config, lambda k: np.asarray(k, dtype=float), rng)


# -- mean-field oracle --------------------------------------------------------

@numba.njit(cache=True)
def _rate_loop(table, counts, m, n_steps, top):
    k_cap = len(counts) - 1
    expected = counts.sum()
    s = 0.0
    for k in range(1, top + 1):
        s += table[k] * counts[k]
    for step in range(n_steps):
        scale = m / s
        s = 0.0
        total = 0.0
        inflow = 0.0
        for k in range(1, top + 1):
            # the frontier class only advances while it holds non-negligible mass
            if k == k_cap or (k == top and counts[k] < 1e-12 * expected):
                f = 0.0
            else:
                f = scale * table[k] * counts[k]
                if f > counts[k]:
                    f = counts[k]
            counts[k] += inflow - f
            inflow = f
            s += table[k] * counts[k]
            total += counts[k]
        if inflow > 0.0:
            top += 1
            counts[top] += inflow
            s += table[top] * inflow
            total += inflow
        counts[m] += 1.0
        s += table[m]
        total += 1.0
        if m > top:
            top = m
        expected += 1.0
        if abs(total - expected) > 1e-9 * expected:
            return step
    return -1


def rate_equation(kernel, m_links: int, n_steps: int, seed_nodes: int | None = None,
                  k_cap: int | None = None) -> np.ndarray:
    """Expected degree distribution of kernel growth under the mean-field recursion.

    Starts from the same seed ring as :func:`grow`.  Each step a node of degree
    ``m_links`` arrives and ``m_links`` units of attachment flow out of degree
    class ``k`` in proportion to ``kernel(k) * N_k``.  Degrees above ``k_cap``
    accumulate in the top class.  Returns ``p`` with ``p[k] = N_k / N``.
    """
    if seed_nodes is None:
        seed_nodes = max(3, m_links)
    if k_cap is None:
        k_cap = int(min(2 + n_steps, 10_000))
    k_cap = max(k_cap, m_links, 2)
    table = tabulate(kernel, k_cap)
    # a trailing run of underflowed zeros (exponential cutoffs) just lowers the cap
    positive = np.flatnonzero(table > 0)
    if len(positive) and positive[-1] < k_cap and np.all(table[positive[-1] + 1:] == 0):
        k_cap = max(int(positive[-1]), m_links, 2)
        table = table[:k_cap + 1]
    ok = np.isfinite(table[1:]) & (table[1:] > 0)
    if not ok.all():
        bad = int(np.flatnonzero(~ok)[0]) + 1
        raise GrowthError(f"kernel({bad}) = {table[bad]} is not finite and positive")
    counts = np.zeros(k_cap + 1)
    counts[2] = seed_nodes
    bad_step = _rate_loop(table, counts, m_links, n_steps, max(2, m_links))
    if bad_step >= 0:
        raise FloatingPointError(f"rate equation lost normalisation at step {bad_step}")
    p = counts / counts.sum()
    if abs(p.sum() - 1.0) > 1e-9:
        raise FloatingPointError("rate equation lost normalisation")
    return p
