"""Agents on a one-dimensional ring that sense their neighbours and move on their beliefs.

Each step an agent counts neighbours within ``sense_range`` on either side and
turns the right-minus-left detection statistic into a Gaussian belief about
the resource slope.  It then moves with velocity ``gain * mu_b`` plus Gaussian
motor noise of variance ``sigma_b^2``, capped at ``v_max``.  Beliefs are
recomputed from the fixed prior every step.

Agents within ``link_range`` of each other are linked in the proximity graph
that snapshots record.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .belief import (GaussianBelief, LikelihoodModel, Observation, posterior_mean,
                     posterior_var)
from .detection import ClusterScene, DetectionParams, sample_detection_statistic
from .errors import ConfigError
from .kernel import default_b_max

UPDATE_ORDERS = ("synchronous", "sequential")
INITIAL_LAYOUTS = ("uniform", "clustered")


@dataclass(frozen=True)
class WorldConfig:
    domain_length: float = 100.0
    sense_range: float = 5.0
    link_range: float = 1.0
    dt: float = 0.1
    p_detect: float = 0.5
    tau: float = 1.0
    eta: float | None = None
    alpha: float | None = None  # likelihood sensitivity; defaults to p_detect / tau
    beta: float = 0.0
    var_d: float = 4.0
    prior_mu: float = 0.0
    prior_var: float = 1.0
    gain: float = 1.0
    k_max: int | None = None  # per-side sensing cap; None = unlimited
    b_max: float | None = None  # belief cap; None = sigma_pi / alpha
    v_max: float = 2.0
    arrival_rate: float = 0.0
    n_initial: int = 100
    n_steps: int = 100
    snapshot_every: int = 10
    update_order: str = "synchronous"
    initial: str = "uniform"
    seed: int = 0

    def problems(self) -> list[str]:
        out = []
        L, R, r = self.domain_length, self.sense_range, self.link_range
        if not (r > 0):
            out.append(f"link_range must be positive, got {r}")
        if r > R:
            out.append(f"link_range={r} exceeds sense_range={R}")
        if not (R < L / 2):
            out.append(f"sense_range={R} must be below domain_length/2={L / 2}")
        if not (self.dt > 0):
            out.append(f"dt must be positive, got {self.dt}")
        if not (0 < self.p_detect <= 1):
            out.append(f"p_detect must lie in (0, 1], got {self.p_detect}")
        if not (self.tau > 0):
            out.append(f"tau must be positive, got {self.tau}")
        if self.eta is not None and not (self.eta > 0):
            out.append(f"eta must be positive, got {self.eta}")
        if self.p_detect == 1 and self.eta is None:
            out.append("p_detect=1 needs an explicit eta")
        if not (self.var_d > 0):
            out.append(f"var_d must be positive, got {self.var_d}")
        if not (self.prior_var > 0):
            out.append(f"prior_var must be positive, got {self.prior_var}")
        if not (self.gain > 0):
            out.append(f"gain must be positive, got {self.gain}")
        if not (self.v_max > 0):
            out.append(f"v_max must be positive, got {self.v_max}")
        if self.k_max is not None and self.k_max < 1:
            out.append(f"k_max must be >= 1, got {self.k_max}")
        if self.b_max is not None and not (self.b_max > 0):
            out.append(f"b_max must be positive, got {self.b_max}")
        if not (self.arrival_rate >= 0):
            out.append(f"arrival_rate must be >= 0, got {self.arrival_rate}")
        if self.n_initial < 0 or self.n_steps < 0:
            out.append("n_initial and n_steps must be >= 0")
        if self.snapshot_every < 1:
            out.append(f"snapshot_every must be >= 1, got {self.snapshot_every}")
        if self.update_order not in UPDATE_ORDERS:
            out.append(f"update_order must be one of {UPDATE_ORDERS}")
        if self.initial not in INITIAL_LAYOUTS:
            out.append(f"initial must be one of {INITIAL_LAYOUTS}")
        return out

    def validate(self) -> "WorldConfig":
        problems = self.problems()
        if problems:
            raise ConfigError(problems)
        return self

    @property
    def detection(self) -> DetectionParams:
        return DetectionParams(self.p_detect, self.tau, self.eta)

    @property
    def prior(self) -> GaussianBelief:
        return GaussianBelief(self.prior_mu, self.prior_var)

    @property
    def lik(self) -> LikelihoodModel:
        alpha = self.p_detect / self.tau if self.alpha is None else self.alpha
        return LikelihoodModel(alpha, self.beta, self.var_d)

    @property
    def belief_cap(self) -> float:
        return default_b_max(self.prior, self.lik) if self.b_max is None else self.b_max


@dataclass
class Agent:
    position: float
    belief: GaussianBelief
    last_velocity: float = 0.0


@dataclass
class World:
    positions: np.ndarray
    mu: np.ndarray
    var: np.ndarray
    velocity: np.ndarray
    t: int = 0

    @property
    def n_agents(self) -> int:
        return len(self.positions)

    def agent(self, i: int) -> Agent:
        return Agent(float(self.positions[i]), GaussianBelief(float(self.mu[i]), float(self.var[i])),
                     float(self.velocity[i]))

    def set_agent(self, i: int, a: Agent):
        self.positions[i] = a.position
        self.mu[i] = a.belief.mu
        self.var[i] = a.belief.var
        self.velocity[i] = a.last_velocity

    def copy(self) -> "World":
        return World(self.positions.copy(), self.mu.copy(), self.var.copy(),
                     self.velocity.copy(), self.t)


@dataclass
class Snapshot:
    t: int
    edges: np.ndarray  # (E, 2), u < v, ascending
    cluster_sizes: np.ndarray  # descending
    mu: np.ndarray
    var: np.ndarray

    @property
    def n_agents(self) -> int:
        return len(self.mu)


def new_world(config: WorldConfig, positions) -> World:
    positions = np.asarray(positions, dtype=float) % config.domain_length
    n = len(positions)
    return World(positions, np.full(n, config.prior_mu), np.full(n, config.prior_var), np.zeros(n))


def initial_world(config: WorldConfig, rng: np.random.Generator) -> World:
    n, L = config.n_initial, config.domain_length
    if config.initial == "clustered":
        pos = L / 2 + rng.uniform(0.0, config.link_range, n)
    else:
        pos = rng.uniform(0.0, L, n)
    return new_world(config, pos)


def _wrap(x, L):
    x = np.mod(x, L)
    return np.where(x >= L, x - L, x)


# -- sensing ------------------------------------------------------------------

def neighbour_counts(positions: np.ndarray, L: float, R: float,
                     k_max: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Agents ahead within ``(0, R]`` and behind within ``[-R, 0)`` of each agent.

    Co-located agents count on neither side.  With ``k_max`` only the nearest
    ``k_max`` on each side are kept, which for counts is a cap.
    """
    n = len(positions)
    if n == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    order = np.argsort(positions, kind="stable")
    xs = positions[order]
    ext = np.concatenate([xs - L, xs, xs + L])
    right = np.searchsorted(ext, xs + R, "right") - np.searchsorted(ext, xs, "right")
    left = np.searchsorted(ext, xs, "left") - np.searchsorted(ext, xs - R, "left")
    r = np.empty(n, np.int64)
    lft = np.empty(n, np.int64)
    r[order] = right
    lft[order] = left
    if k_max is not None:
        r = np.minimum(r, k_max)
        lft = np.minimum(lft, k_max)
    return r, lft


def scene_for(world: World, i: int, config: WorldConfig) -> ClusterScene:
    L, R = config.domain_length, config.sense_range
    off = np.mod(np.delete(world.positions, i) - world.positions[i], L)
    d_right = int(np.count_nonzero((off > 0) & (off <= R)))
    d_left = int(np.count_nonzero((off > 0) & (off >= L - R)))
    if config.k_max is not None:
        d_right, d_left = min(d_right, config.k_max), min(d_left, config.k_max)
    return ClusterScene(d_right, d_left)


def sense(world: World, i: int, config: WorldConfig, rng: np.random.Generator) -> Observation:
    scene = scene_for(world, i, config)
    return Observation(float(sample_detection_statistic(scene, config.detection, rng)))


def update_belief(agent: Agent, obs: Observation, config: WorldConfig) -> Agent:
    cap = config.belief_cap
    mu = float(np.clip(posterior_mean(config.prior, config.lik, obs), -cap, cap))
    var = posterior_var(config.prior, config.lik)
    return replace(agent, belief=GaussianBelief(mu, var))


def move(agent: Agent, config: WorldConfig, rng: np.random.Generator) -> Agent:
    v = config.gain * agent.belief.mu + rng.normal(0.0, agent.belief.sd)
    v = max(-config.v_max, min(config.v_max, v))
    pos = float(_wrap(agent.position + v * config.dt, config.domain_length))
    return replace(agent, position=pos, last_velocity=v)


# -- dynamics -----------------------------------------------------------------

def _step_synchronous(world: World, config: WorldConfig, rng: np.random.Generator) -> World:
    n = world.n_agents
    d_right, d_left = neighbour_counts(world.positions, config.domain_length,
                                       config.sense_range, config.k_max)
    p, tau = config.p_detect, config.tau
    stat = (rng.binomial(d_right, p) - rng.binomial(d_left, p)) / tau
    cap = config.belief_cap
    mu = np.clip(posterior_mean(config.prior, config.lik, stat), -cap, cap)
    var = np.full(n, posterior_var(config.prior, config.lik))
    v = np.clip(config.gain * mu + rng.normal(0.0, np.sqrt(var)), -config.v_max, config.v_max)
    pos = _wrap(world.positions + v * config.dt, config.domain_length)
    return World(pos, mu, var, v, world.t)


def _step_sequential(world: World, config: WorldConfig, rng: np.random.Generator) -> World:
    w = world.copy()
    for i in range(w.n_agents):
        obs = sense(w, i, config, rng)
        a = move(update_belief(w.agent(i), obs, config), config, rng)
        w.set_agent(i, a)
    return w


def arrive(world: World, config: WorldConfig, rng: np.random.Generator) -> World:
    """Append ``Poisson(arrival_rate * dt)`` agents at uniform positions with prior beliefs."""
    k = int(rng.poisson(config.arrival_rate * config.dt)) if config.arrival_rate > 0 else 0
    if not k:
        return world
    fresh = new_world(config, rng.uniform(0.0, config.domain_length, k))
    return World(np.concatenate([world.positions, fresh.positions]),
                 np.concatenate([world.mu, fresh.mu]),
                 np.concatenate([world.var, fresh.var]),
                 np.concatenate([world.velocity, fresh.velocity]), world.t)


def step(world: World, config: WorldConfig, rng: np.random.Generator) -> World:
    """One perception-action cycle followed by arrivals."""
    if config.update_order == "sequential":
        w = _step_sequential(world, config, rng)
    else:
        w = _step_synchronous(world, config, rng)
    w = arrive(w, config, rng)
    w.t = world.t + 1
    return w


# -- proximity graph ----------------------------------------------------------

def proximity_edges(positions: np.ndarray, L: float, r_link: float) -> np.ndarray:
    """Pairs at periodic distance ``<= r_link`` as sorted ``(u, v)`` rows, ``u < v``."""
    n = len(positions)
    if n < 2:
        return np.zeros((0, 2), np.int64)
    order = np.argsort(positions, kind="stable")
    xs = positions[order]
    ext = np.concatenate([xs, xs + L])
    lo = np.searchsorted(ext, xs, "left")
    hi = np.searchsorted(ext, xs + r_link, "right")
    counts = hi - lo
    src = np.repeat(np.arange(n), counts)
    dst = np.concatenate([np.arange(a, b) for a, b in zip(lo, hi)]) % n
    keep = src != dst
    u, v = order[src[keep]], order[dst[keep]]
    e = np.unique(np.column_stack([np.minimum(u, v), np.maximum(u, v)]), axis=0)
    return e.reshape(-1, 2).astype(np.int64)


def _components(n: int, edges: np.ndarray) -> np.ndarray:
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in edges.tolist():
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    roots = np.array([find(i) for i in range(n)], dtype=np.int64)
    sizes = np.bincount(roots, minlength=n)
    return np.sort(sizes[sizes > 0])[::-1]


def snapshot_graph(world: World, config: WorldConfig) -> Snapshot:
    edges = proximity_edges(world.positions, config.domain_length, config.link_range)
    return Snapshot(world.t, edges, _components(world.n_agents, edges),
                    world.mu.copy(), world.var.copy())


def run(config: WorldConfig, rng: np.random.Generator | None = None) -> list[Snapshot]:
    config.validate()
    if rng is None:
        rng = np.random.default_rng(config.seed)
    world = initial_world(config, rng)
    snaps = [snapshot_graph(world, config)]
    for _ in range(config.n_steps):
        world = step(world, config, rng)
        if world.t % config.snapshot_every == 0:
            snaps.append(snapshot_graph(world, config))
    return snaps


def cluster_size_rows(snapshots: list[Snapshot]) -> list[dict]:
    rows = []
    for s in snapshots:
        size, count = np.unique(s.cluster_sizes, return_counts=True)
        rows.extend({"t": s.t, "size": int(a), "count": int(b)} for a, b in zip(size, count))
    return rows


# -- probes -------------------------------------------------------------------

def probe_velocities(config: WorldConfig, d_right: int, d_left: int, n_trials: int,
                     rng: np.random.Generator) -> np.ndarray:
    """Velocities of a single agent facing fixed clusters on each side.

    The probe sits at the origin with ``d_right`` agents spread over
    ``(0, sense_range]`` ahead and ``d_left`` over ``[-sense_range, 0)`` behind.
    Each trial runs one sense / update / move cycle from the prior.
    """
    R = config.sense_range
    ahead = R * np.arange(1, d_right + 1) / max(d_right, 1)
    behind = -R * np.arange(1, d_left + 1) / max(d_left, 1)
    world = new_world(config, np.concatenate([[0.0], ahead, behind]))
    out = np.empty(n_trials)
    for k in range(n_trials):
        a = update_belief(world.agent(0), sense(world, 0, config, rng), config)
        out[k] = move(a, config, rng).last_velocity
    return out


def clamped_abs_normal_mean(sd: float, cap: float) -> float:
    """``E[min(|X|, cap)]`` for ``X ~ N(0, sd^2)``."""
    z = cap / sd
    return (sd * math.sqrt(2 / math.pi) * (1 - math.exp(-z * z / 2))
            + cap * math.erfc(z / math.sqrt(2)))
