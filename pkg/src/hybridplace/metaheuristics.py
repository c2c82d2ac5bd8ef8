"""Binary PSO, a binary genetic algorithm and a greedy baseline.

All solvers share the vectorised cost kernel of :mod:`hybridplace.model`
and report through :class:`hybridplace.exact.SolveResult`.

BPSO random draws come from one ``numpy`` generator per run, in a fixed
order: initial positions (swarm x n), initial velocities (swarm x n), then
per iteration one ``(swarm, 3, n)`` block holding, for each particle in
index order, its r1, r2 and r3 vectors.  All draws for an iteration are
made before any cost is evaluated.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from .errors import InfeasibleInstanceError, InvalidInputError
from .exact import SolveResult, make_result
from .model import CostParams, Placement, SbaGraph, evaluate_batch, evaluate_cost, total_hosting

ConstraintMode = Literal["repair", "penalty"]


@dataclass(frozen=True)
class BpsoConfig:
    swarm_size: int = 30
    max_iters: int = 200
    w_start: float = 0.9
    w_end: float = 0.4
    c1: float = 2.0
    c2: float = 2.0
    v_max: float = 4.0
    stagnation_limit: int = 50
    seed: int = 0
    repair: ConstraintMode = "repair"
    penalty_factor: float | None = None  # None means 10 * alpha

    def __post_init__(self):
        if self.swarm_size < 2:
            raise InvalidInputError("swarm_size must be >= 2")
        if self.max_iters < 1:
            raise InvalidInputError("max_iters must be >= 1")
        if not self.v_max > 0:
            raise InvalidInputError("v_max must be > 0")
        if not 0 <= self.w_end <= self.w_start:
            raise InvalidInputError("need 0 <= w_end <= w_start")
        if self.c1 < 0 or self.c2 < 0:
            raise InvalidInputError("acceleration coefficients must be >= 0")
        if self.stagnation_limit < 1:
            raise InvalidInputError("stagnation_limit must be >= 1")
        if self.repair not in ("repair", "penalty"):
            raise InvalidInputError(f"unknown constraint mode {self.repair!r}")

    def inertia(self, iteration: int) -> float:
        """Linear decay from ``w_start`` at iteration 0 to ``w_end`` at the last one."""
        if self.max_iters == 1:
            return self.w_start
        return self.w_start - (self.w_start - self.w_end) * iteration / (self.max_iters - 1)


@dataclass(frozen=True)
class GaConfig:
    population: int = 100
    generations: int = 200
    crossover_rate: float = 0.9
    mutation_rate: float | None = None  # None means 1 / n
    tournament_size: int = 3
    elitism: int = 2
    seed: int = 0
    repair: ConstraintMode = "repair"
    penalty_factor: float | None = None

    def __post_init__(self):
        if self.population < 2:
            raise InvalidInputError("population must be >= 2")
        if self.generations < 1:
            raise InvalidInputError("generations must be >= 1")
        if not 0 <= self.elitism < self.population:
            raise InvalidInputError("need 0 <= elitism < population")
        if not 0 <= self.crossover_rate <= 1:
            raise InvalidInputError("crossover_rate must lie in [0, 1]")
        if self.mutation_rate is not None and not 0 <= self.mutation_rate <= 1:
            raise InvalidInputError("mutation_rate must lie in [0, 1]")
        if self.tournament_size < 1:
            raise InvalidInputError("tournament_size must be >= 1")
        if self.repair not in ("repair", "penalty"):
            raise InvalidInputError(f"unknown constraint mode {self.repair!r}")


@dataclass
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    pbest_position: np.ndarray
    pbest_cost: float = np.inf


def sigmoid(v):
    """Logistic transfer ``1 / (1 + exp(-v))``; accepts scalars or arrays."""
    v = np.asarray(v, dtype=np.float64)
    # exp of a non-positive argument only, so large |v| cannot overflow
    out = np.where(v >= 0, 1.0 / (1.0 + np.exp(-np.abs(v))), np.exp(-np.abs(v)) / (1.0 + np.exp(-np.abs(v))))
    return float(out) if out.ndim == 0 else out


def _velocity(v, x, pbest, gbest, w, c1, c2, v_max, r1, r2):
    raw = w * v + c1 * r1 * (pbest - x) + c2 * r2 * (gbest - x)
    return np.clip(raw, -v_max, v_max)


def velocity_update(particle: Particle, gbest, w: float, cfg: BpsoConfig,
                    rng: np.random.Generator | None = None, r1=None, r2=None) -> np.ndarray:
    """New clamped velocity of one particle.

    ``r1`` and ``r2`` are drawn from ``rng`` (r1 vector first) unless given.
    """
    x = np.asarray(particle.position, dtype=np.float64)
    v = np.asarray(particle.velocity, dtype=np.float64)
    pbest = np.asarray(particle.pbest_position, dtype=np.float64)
    gbest = np.asarray(gbest.bits if isinstance(gbest, Placement) else gbest, dtype=np.float64)
    n = len(x)
    if not (len(v) == len(pbest) == len(gbest) == n):
        raise InvalidInputError("position, velocity, pbest and gbest must have equal length")
    if r1 is None:
        r1 = rng.random(n)
    if r2 is None:
        r2 = rng.random(n)
    return _velocity(v, x, pbest, gbest, w, cfg.c1, cfg.c2, cfg.v_max, np.asarray(r1), np.asarray(r2))


def position_update(velocity, rng: np.random.Generator | None = None, r3=None) -> Placement:
    """Bit ``d`` becomes 1 iff ``sigmoid(velocity[d]) > r3[d]``."""
    velocity = np.asarray(velocity, dtype=np.float64)
    if r3 is None:
        r3 = rng.random(len(velocity))
    return Placement.from_array(sigmoid(velocity) > np.asarray(r3))


class _Repairer:
    """Greedy feasibility fix: flip private nodes to public, largest hosting first."""

    def __init__(self, graph: SbaGraph, hq: float):
        h = graph.hosting
        self.order = np.lexsort((np.arange(graph.n), -h))
        self.h_sorted = h[self.order]
        self.hosting = h
        self.hq = hq

    def __call__(self, x: np.ndarray) -> np.ndarray:
        deficit = self.hq - x @ self.hosting
        needs = deficit > 0
        if not needs.any():
            return x
        xs = x[needs][:, self.order]
        private = xs == 0
        add = private * self.h_sorted
        before = np.cumsum(add, axis=1) - add
        flip = private & (before < deficit[needs, None])
        xs = xs | flip
        out = x.copy()
        rows = out[needs]
        rows[:, self.order] = xs
        out[needs] = rows
        return out


def _check_hq(graph: SbaGraph, params: CostParams):
    if params.hq > total_hosting(graph):
        raise InfeasibleInstanceError(
            f"hq={params.hq} exceeds the graph's total hosting {total_hosting(graph)}"
        )


def repair_placement(graph: SbaGraph, placement: Placement, params: CostParams) -> Placement:
    """Make ``placement`` satisfy the offload threshold; feasible inputs come back unchanged.

    Private services are moved to the public cloud in decreasing order of
    hosting (lowest id first on ties) until the threshold is reached.
    """
    _check_hq(graph, params)
    if len(placement) != graph.n:
        raise InvalidInputError(f"placement has length {len(placement)}, graph has {graph.n} nodes")
    x = placement.as_array()[None, :].astype(np.int8)
    return Placement.from_array(_Repairer(graph, params.hq)(x)[0])


class _Fitness:
    def __init__(self, graph, params, mode, penalty_factor):
        self.graph = graph
        self.params = params
        self.mode = mode
        self.penalty = 10.0 * params.alpha if penalty_factor is None else penalty_factor
        self.repair = _Repairer(graph, params.hq)
        self.evaluations = 0

    def prepare(self, x):
        return self.repair(x) if self.mode == "repair" else x

    def __call__(self, x) -> np.ndarray:
        self.evaluations += len(x)
        cost, hosted = evaluate_batch(self.graph, x, self.params)
        if self.mode == "penalty":
            cost = cost + self.penalty * np.maximum(0.0, self.params.hq - hosted)
        return cost

    def finish(self, best: np.ndarray) -> Placement:
        return Placement.from_array(self.repair(best[None, :])[0])


def bpso_solve(graph: SbaGraph, params: CostParams, cfg: BpsoConfig = BpsoConfig(),
               callback: Callable[[int, np.ndarray, np.ndarray, float], None] | None = None) -> SolveResult:
    """Binary particle swarm search.

    ``callback(iteration, positions, velocities, gbest_cost)`` is invoked
    after the initial swarm (iteration 0) and after every iteration.
    """
    started = time.perf_counter()
    _check_hq(graph, params)
    n, m = graph.n, cfg.swarm_size
    rng = np.random.default_rng(cfg.seed)
    fit = _Fitness(graph, params, cfg.repair, cfg.penalty_factor)

    x = (rng.random((m, n)) < 0.5).astype(np.int8)
    v = rng.uniform(-cfg.v_max, cfg.v_max, size=(m, n))
    x = fit.prepare(x)
    cost = fit(x)
    pbest, pbest_cost = x.copy(), cost.copy()
    g = int(np.argmin(pbest_cost))
    gbest, gbest_cost = pbest[g].copy(), float(pbest_cost[g])
    if callback:
        callback(0, x, v, gbest_cost)

    stagnant = 0
    it = 0
    for it in range(1, cfg.max_iters + 1):
        w = cfg.inertia(it - 1)
        r = rng.random((m, 3, n))
        v = _velocity(v, x, pbest, gbest, w, cfg.c1, cfg.c2, cfg.v_max, r[:, 0], r[:, 1])
        x = (sigmoid(v) > r[:, 2]).astype(np.int8)
        x = fit.prepare(x)
        cost = fit(x)

        improved = cost < pbest_cost
        pbest[improved] = x[improved]
        pbest_cost[improved] = cost[improved]
        g = int(np.argmin(pbest_cost))
        if pbest_cost[g] < gbest_cost:
            gbest, gbest_cost = pbest[g].copy(), float(pbest_cost[g])
            stagnant = 0
        else:
            stagnant += 1
        if callback:
            callback(it, x, v, gbest_cost)
        if stagnant >= cfg.stagnation_limit:
            break

    return make_result(graph, fit.finish(gbest), params, evaluations=fit.evaluations,
                       iterations=it, started=started, solver_name="bpso")


def _tournament(rng, fitness, count, size):
    contenders = rng.integers(0, len(fitness), size=(count, size))
    winners = np.argmin(fitness[contenders], axis=1)
    return contenders[np.arange(count), winners]


def ga_solve(graph: SbaGraph, params: CostParams, cfg: GaConfig = GaConfig()) -> SolveResult:
    """Generational binary GA: tournament selection, uniform crossover,
    bit-flip mutation, elitism, and the same repair policy as BPSO."""
    started = time.perf_counter()
    _check_hq(graph, params)
    n, m = graph.n, cfg.population
    rate = cfg.mutation_rate if cfg.mutation_rate is not None else 1.0 / n
    rng = np.random.default_rng(cfg.seed)
    fit = _Fitness(graph, params, cfg.repair, cfg.penalty_factor)

    pop = fit.prepare((rng.random((m, n)) < 0.5).astype(np.int8))
    cost = fit(pop)
    children = m - cfg.elitism
    for _ in range(cfg.generations):
        elite = np.argsort(cost, kind="stable")[: cfg.elitism]
        mothers = pop[_tournament(rng, cost, children, cfg.tournament_size)]
        fathers = pop[_tournament(rng, cost, children, cfg.tournament_size)]
        cross = rng.random(children) < cfg.crossover_rate
        take_father = (rng.random((children, n)) < 0.5) & cross[:, None]
        kids = np.where(take_father, fathers, mothers)
        kids = kids ^ (rng.random((children, n)) < rate)
        kids = fit.prepare(kids.astype(np.int8))
        pop = np.concatenate([pop[elite], kids])
        cost = np.concatenate([cost[elite], fit(kids)])

    best = pop[int(np.argmin(cost))]
    return make_result(graph, fit.finish(best), params, evaluations=fit.evaluations,
                       iterations=cfg.generations, started=started, solver_name="ga")


def greedy_solve(graph: SbaGraph, params: CostParams) -> SolveResult:
    """Start all-private; repeatedly move the service whose move raises the
    total cost least (lowest id on ties) until the threshold is met."""
    started = time.perf_counter()
    _check_hq(graph, params)
    bits = [0] * graph.n
    hosted = 0.0
    evaluations = 0
    while hosted < params.hq:
        best_node, best_cost = None, np.inf
        for d in range(graph.n):
            if bits[d]:
                continue
            bits[d] = 1
            cost = evaluate_cost(graph, Placement(tuple(bits)), params).total
            evaluations += 1
            bits[d] = 0
            if cost < best_cost:
                best_node, best_cost = d, cost
        bits[best_node] = 1
        hosted += graph.hosting[best_node]
    return make_result(graph, Placement(tuple(bits)), params, evaluations=evaluations,
                       iterations=sum(bits), started=started, solver_name="greedy")


SOLVER_NAMES = ("exact", "exact_bnb", "bpso", "ga", "greedy")
