"""Exact solvers: exhaustive enumeration and a depth-first branch and bound.

Both return the minimum-cost feasible placement.  Among placements whose
cost ties with the optimum (within :func:`tie_tolerance`), the
lexicographically smallest bit vector wins, node 0 being the most
significant position.  Enumerating integer masks with node 0 as the high
bit therefore visits placements in exactly that order.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass

import numpy as np

from .errors import InstanceTooLargeError
from .model import (
    CostBreakdown,
    CostParams,
    Placement,
    SbaGraph,
    evaluate_batch,
    evaluate_cost,
    is_feasible,
    total_hosting,
)

MAX_NODES = 30
CHUNK_BITS = 16


@dataclass(frozen=True)
class SolveResult:
    placement: Placement
    breakdown: CostBreakdown
    feasible: bool
    evaluations: int
    iterations: int
    wall_time: float
    solver_name: str

    @property
    def total(self) -> float:
        return self.breakdown.total


def tie_tolerance(cost: float) -> float:
    return 1e-9 * max(1.0, abs(cost))


def make_result(graph, placement, params, *, evaluations, iterations, started, solver_name) -> SolveResult:
    """Package a solver's answer; the cost is always recomputed on the reference path."""
    return SolveResult(
        placement=placement,
        breakdown=evaluate_cost(graph, placement, params),
        feasible=is_feasible(graph, placement, params),
        evaluations=evaluations,
        iterations=iterations,
        wall_time=time.perf_counter() - started,
        solver_name=solver_name,
    )


def _check_size(graph: SbaGraph, max_nodes: int):
    if graph.n > max_nodes:
        raise InstanceTooLargeError(
            f"exhaustive search is limited to {max_nodes} nodes, graph has {graph.n}"
        )


def _mask_to_placement(mask: int, n: int) -> Placement:
    return Placement(tuple((mask >> (n - 1 - d)) & 1 for d in range(n)))


def _infeasible_result(graph, params, started, name) -> SolveResult:
    return make_result(graph, Placement.ones(graph.n), params,
                       evaluations=0, iterations=0, started=started, solver_name=name)


def exact_solve(graph: SbaGraph, params: CostParams, max_nodes: int = MAX_NODES) -> SolveResult:
    """Evaluate all ``2**n`` placements in chunks and keep the best feasible one."""
    started = time.perf_counter()
    _check_size(graph, max_nodes)
    n = graph.n
    if params.hq > total_hosting(graph):
        return _infeasible_result(graph, params, started, "exact")

    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    chunk = 1 << min(n, CHUNK_BITS)
    best = np.inf
    candidates: list[tuple[int, float]] = []
    for start in range(0, 1 << n, chunk):
        masks = np.arange(start, start + chunk, dtype=np.int64)
        bits = ((masks[:, None] >> shifts) & 1).astype(bool)
        cost, hosted = evaluate_batch(graph, bits, params)
        cost = np.where(hosted >= params.hq, cost, np.inf)
        chunk_min = float(cost.min())
        if chunk_min == np.inf:
            continue
        best = min(best, chunk_min)
        # keep every placement that may still tie with the final optimum
        idx = np.flatnonzero(cost <= best + tie_tolerance(best))
        candidates = [(m, c) for m, c in candidates if c <= best + tie_tolerance(best)]
        candidates.extend((int(masks[i]), float(cost[i])) for i in idx)

    limit = best + tie_tolerance(best)
    mask = next(m for m, c in candidates if c <= limit)
    return make_result(graph, _mask_to_placement(mask, n), params,
                       evaluations=1 << n, iterations=0, started=started, solver_name="exact")


def exact_solve_bnb(graph: SbaGraph, params: CostParams, max_nodes: int = MAX_NODES,
                    upper_bound: float | None = None) -> SolveResult:
    """Depth-first branch and bound over nodes in index order, bit 0 before bit 1.

    The bound of a partial assignment is the cost already committed (public
    hosting plus edges whose both endpoints are decided) plus ``alpha`` times
    the hosting still missing to reach ``hq``.  All terms are non-negative,
    so the bound never overestimates.  ``upper_bound`` may seed the incumbent
    with the cost of any known feasible placement.
    """
    started = time.perf_counter()
    _check_size(graph, max_nodes)
    n = graph.n
    hq = params.hq
    if hq > total_hosting(graph):
        return _infeasible_result(graph, params, started, "exact_bnb")

    alpha, beta1, beta2 = params.alpha, params.beta1, params.beta2
    hosting = [float(h) for h in graph.hosting]
    suffix = [0.0] * (n + 1)
    for d in range(n - 1, -1, -1):
        suffix[d] = suffix[d + 1] + hosting[d]
    earlier: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for e in graph.edges:
        lo, hi = e.key
        earlier[hi].append((lo, e.rate))

    bits = [0] * n
    state = {"bound": np.inf if upper_bound is None else upper_bound, "best": np.inf, "leaves": 0}
    candidates: list[tuple[tuple[int, ...], float]] = []

    def visit(d: int, cost: float, hosted: float):
        if hosted + suffix[d] < hq:
            return
        bound = cost + alpha * max(0.0, hq - hosted)
        if bound > state["bound"] + tie_tolerance(state["bound"]):
            return
        if d == n:
            state["leaves"] += 1
            if cost < state["best"]:
                state["best"] = cost
            if cost < state["bound"]:
                state["bound"] = cost
            if cost <= state["bound"] + tie_tolerance(state["bound"]):
                candidates.append((tuple(bits), cost))
            return
        # private: edges to earlier public nodes become hybrid
        bits[d] = 0
        extra = 0.0
        for j, rate in earlier[d]:
            if bits[j]:
                extra += beta1 * rate
        visit(d + 1, cost + extra, hosted)
        bits[d] = 1
        extra = alpha * hosting[d]
        for j, rate in earlier[d]:
            extra += (beta2 if bits[j] else beta1) * rate
        visit(d + 1, cost + extra, hosted + hosting[d])
        bits[d] = 0

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, n + 100))
    try:
        visit(0, 0.0, 0.0)
    finally:
        sys.setrecursionlimit(limit)

    best = state["best"]
    cutoff = best + tie_tolerance(best)
    chosen = next(b for b, c in candidates if c <= cutoff)
    return make_result(graph, Placement(chosen), params,
                       evaluations=state["leaves"], iterations=0, started=started, solver_name="exact_bnb")
