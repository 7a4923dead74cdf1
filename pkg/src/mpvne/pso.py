"""Discrete particle swarm optimisation with random-reset mutation.

A particle's position holds, per virtual node, an index into that node's
candidate list. Velocities are per-dimension change tendencies in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigError, NoFeasibleAssignment
from .global_controller import PseudoTopology
from .substrate import NetworkScales
from .workload import VirtualRequest

INF = float("inf")


@dataclass(frozen=True)
class FitnessWeights:
    """Weights of the cost, delay and load terms.

    ``cost_norm``/``delay_norm`` left as ``None`` are derived per request from
    network-wide price and delay maxima (see :meth:`norms`).
    """

    alpha: float = 0.3
    beta: float = 0.3
    gamma: float = 0.4
    cost_norm: float | None = None
    delay_norm: float | None = None

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            if getattr(self, name) < 0:
                raise ConfigError(name, "must be nonnegative")
        if not math.isclose(self.alpha + self.beta + self.gamma, 1.0, abs_tol=1e-9):
            raise ConfigError("alpha+beta+gamma", "must equal 1")
        for name in ("cost_norm", "delay_norm"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ConfigError(name, "must be positive")

    def norms(self, req: VirtualRequest, scales: NetworkScales | None) -> tuple[float, float]:
        """Cost and delay of ``req`` if every price/delay sat at its network maximum,
        counting each virtual link as a single hop."""
        cpu = sum(n.cpu_demand for n in req.nodes)
        bw = sum(l.bw_demand for l in req.links)
        if self.cost_norm is not None:
            cn = self.cost_norm
        elif scales is not None:
            cn = cpu * scales.max_node_price + bw * scales.max_link_price
        else:
            cn = 1.0
        if self.delay_norm is not None:
            dn = self.delay_norm
        elif scales is not None:
            dn = cpu * scales.max_node_delay + len(req.links) * scales.max_link_delay
        else:
            dn = 1.0
        return float(cn or 1.0), float(dn or 1.0)

    def combine(self, cost: float, delay: float, load: float, cost_norm: float, delay_norm: float) -> float:
        return self.alpha * cost / cost_norm + self.beta * delay / delay_norm + self.gamma * load


@dataclass(frozen=True)
class SwarmConfig:
    particle_count: int = 10
    iterations: int = 50
    c1: float = 1.5
    c2: float = 1.5
    mutation_probability: float = 0.1
    weights: FitnessWeights = field(default_factory=FitnessWeights)
    rng_seed: int = 0

    def __post_init__(self):
        if self.particle_count < 1:
            raise ConfigError("particle_count", "must be >= 1")
        if self.iterations < 1:
            raise ConfigError("iterations", "must be >= 1")
        if not 0 <= self.mutation_probability <= 1:
            raise ConfigError("mutation_probability", "must be in [0, 1]")
        if self.c1 < 0 or self.c2 < 0:
            raise ConfigError("c1/c2", "learning factors must be nonnegative")


@dataclass(frozen=True)
class Fitness:
    value: float
    cost: float
    delay: float
    load: float

    @property
    def feasible(self) -> bool:
        return math.isfinite(self.value)


INFEASIBLE = Fitness(INF, INF, INF, INF)


class FitnessEvaluator:
    """Fitness of node assignments on one pseudo-topology, memoised."""

    def __init__(
        self,
        req: VirtualRequest,
        topo: PseudoTopology,
        weights: FitnessWeights,
        scales: NetworkScales | None = None,
    ):
        self.req = req
        self.topo = topo
        self.weights = weights
        self.cost_norm, self.delay_norm = weights.norms(req, scales)
        self._paths: dict[tuple[int, int, int], tuple[float, float]] = {}
        self._memo: dict[tuple[int, ...], Fitness] = {}

    def _path_terms(self, a: int, b: int, bw: int) -> tuple[float, float]:
        key = (a, b, bw)
        hit = self._paths.get(key)
        if hit is None:
            path = self.topo.routes(bw).path(a, b)
            if path is None:
                hit = (INF, INF)
            else:
                price = delay = 0
                for x, y in zip(path, path[1:]):
                    e = self.topo.edge(x, y)
                    price += e.price
                    delay += e.delay
                hit = (price, delay)
            self._paths[key] = hit
        return hit

    def __call__(self, assignment: Mapping[int, int]) -> Fitness:
        key = tuple(assignment[n.id] for n in self.req.nodes)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._evaluate(assignment)
            self._memo[key] = hit
        return hit

    def _evaluate(self, assignment: Mapping[int, int]) -> Fitness:
        used = [assignment[n.id] for n in self.req.nodes]
        if len(set(used)) != len(used):
            return INFEASIBLE
        cost = 0.0
        delay = 0.0
        load = 0.0
        for n in self.req.nodes:
            info = self.topo.vertices[assignment[n.id]]
            if info.cpu_available < n.cpu_demand:
                return INFEASIBLE
            cost += n.cpu_demand * info.unit_price
            delay += n.cpu_demand * info.delay
            load += n.cpu_demand / info.cpu_available
        load /= max(len(self.req.nodes), 1)
        for l in self.req.links:
            price, d = self._path_terms(assignment[l.u], assignment[l.v], l.bw_demand)
            if not math.isfinite(price):
                return INFEASIBLE
            cost += l.bw_demand * price
            delay += d
        value = self.weights.combine(cost, delay, load, self.cost_norm, self.delay_norm)
        return Fitness(value, cost, delay, load)


def fitness(
    assignment: Mapping[int, int],
    req: VirtualRequest,
    topo: PseudoTopology,
    weights: FitnessWeights,
    scales: NetworkScales | None = None,
) -> Fitness:
    return FitnessEvaluator(req, topo, weights, scales)(assignment)


# -- operators ------------------------------------------------------------


def differs(a: int, b: int) -> int:
    """Discrete minus: 0 for equal operands, 1 otherwise."""
    return 0 if a == b else 1


def threshold(value: float) -> int:
    """Discrete plus: 1 when the sum exceeds 0.5, else 0."""
    return 1 if value > 0.5 else 0


@dataclass
class Particle:
    position: list[int]
    velocity: list[float]
    best_position: list[int]
    best_fitness: float = INF

    @classmethod
    def fresh(cls, position: Sequence[int]) -> "Particle":
        pos = list(position)
        return cls(pos, [0.0] * len(pos), list(pos))


def raw_velocity(
    v: Sequence[float],
    x: Sequence[int],
    pbest: Sequence[int],
    gbest: Sequence[int],
    c1: float,
    c2: float,
    r1: Sequence[float],
    r2: Sequence[float],
) -> list[float]:
    """Unclamped velocity update, one value per dimension."""
    return [
        v[d] + c1 * r1[d] * differs(pbest[d], x[d]) + c2 * r2[d] * differs(gbest[d], x[d])
        for d in range(len(x))
    ]


def step_velocity(p: Particle, gbest: Sequence[int], cfg: SwarmConfig, rng: np.random.Generator) -> list[float]:
    n = len(p.position)
    r1 = rng.random(n)
    r2 = rng.random(n)
    raw = raw_velocity(p.velocity, p.position, p.best_position, gbest, cfg.c1, cfg.c2, r1, r2)
    return [min(1.0, max(0.0, r)) for r in raw]


def step_position(
    p: Particle,
    gbest: Sequence[int],
    sizes: Sequence[int],
    rng: np.random.Generator,
) -> list[int]:
    """Move every dimension whose velocity crosses the threshold.

    A moving coordinate adopts the global best value if that differs from the
    current one, else the personal best value, else a uniformly random other
    candidate.
    """
    new = list(p.position)
    for d, v in enumerate(p.velocity):
        if not threshold(v):
            continue
        if gbest[d] != new[d]:
            new[d] = gbest[d]
        elif p.best_position[d] != new[d]:
            new[d] = p.best_position[d]
        elif sizes[d] > 1:
            pick = int(rng.integers(sizes[d] - 1))
            new[d] = pick if pick < new[d] else pick + 1
    return new


def mutate(p: Particle, cfg: SwarmConfig, sizes: Sequence[int], rng: np.random.Generator) -> bool:
    """Reset the particle's position at random with ``mutation_probability``."""
    if rng.random() >= cfg.mutation_probability:
        return False
    p.position = [int(rng.integers(s)) for s in sizes]
    p.velocity = [0.0] * len(sizes)
    return True


@dataclass
class SolveResult:
    best_position: list[int]
    best_assignment: dict[int, int]
    best_fitness: Fitness
    fitness_trace: list[float]
    resets: int = 0


def solve(
    req: VirtualRequest,
    topo: PseudoTopology,
    cfg: SwarmConfig,
    scales: NetworkScales | None = None,
    evaluator: FitnessEvaluator | None = None,
) -> SolveResult:
    """Search candidate assignments for the lowest fitness.

    ``fitness_trace[0]`` is the best initial particle; entry ``t`` is the global
    best after iteration ``t``.
    """
    vids = [n.id for n in req.nodes]
    cands = [topo.candidates.get(v, []) for v in vids]
    if any(not c for c in cands):
        missing = [v for v, c in zip(vids, cands) if not c]
        raise NoFeasibleAssignment(f"virtual nodes without candidates: {missing}")
    sizes = [len(c) for c in cands]
    ev = evaluator or FitnessEvaluator(req, topo, cfg.weights, scales)
    rng = np.random.default_rng(cfg.rng_seed)

    def assign(pos: Sequence[int]) -> dict[int, int]:
        return {v: cands[d][pos[d]] for d, v in enumerate(vids)}

    swarm = [Particle.fresh([int(rng.integers(s)) for s in sizes]) for _ in range(cfg.particle_count)]
    gbest: list[int] = list(swarm[0].position)
    gfit = INFEASIBLE
    for p in swarm:
        f = ev(assign(p.position))
        p.best_fitness = f.value
        if f.value < gfit.value:
            gfit, gbest = f, list(p.position)
    if not gfit.feasible:
        # keep a defined incumbent even when nothing is feasible yet
        gbest = list(swarm[0].position)
    trace = [gfit.value]
    resets = 0

    for _ in range(cfg.iterations):
        for p in swarm:
            p.velocity = step_velocity(p, gbest, cfg, rng)
            p.position = step_position(p, gbest, sizes, rng)
            if mutate(p, cfg, sizes, rng):
                resets += 1
            f = ev(assign(p.position))
            if f.value < p.best_fitness:
                p.best_fitness = f.value
                p.best_position = list(p.position)
            if f.value < gfit.value:
                gfit, gbest = f, list(p.position)
        trace.append(gfit.value)

    if not gfit.feasible:
        raise NoFeasibleAssignment(f"request {req.id}: no feasible assignment found")
    return SolveResult(gbest, assign(gbest), gfit, trace, resets)
