"""Graph, placement and pricing model for hybrid-cloud service placement.

A service-based application is an undirected weighted graph.  Each node
needs some hosting units, each edge carries a communication rate.  A
placement puts every service either in the private cloud (bit 0) or in
the public cloud (bit 1).  Only public resources are billed:

* hosting: ``alpha`` per hosting unit of every public service,
* public communication: ``beta2`` per rate unit of edges with both ends public,
* hybrid communication: ``beta1`` per rate unit of edges crossing the clouds.

The offload constraint requires the public services to add up to at least
``hq`` hosting units.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInputError


@dataclass(frozen=True)
class ServiceNode:
    id: int
    hosting: float

    def __post_init__(self):
        if self.hosting < 0:
            raise InvalidInputError(f"node {self.id}: hosting must be >= 0, got {self.hosting}")


@dataclass(frozen=True)
class CommEdge:
    a: int
    b: int
    rate: float

    def __post_init__(self):
        if self.a == self.b:
            raise InvalidInputError(f"self-loop on node {self.a}")
        if self.rate < 0:
            raise InvalidInputError(f"edge ({self.a}, {self.b}): rate must be >= 0, got {self.rate}")

    @property
    def key(self) -> tuple[int, int]:
        return (self.a, self.b) if self.a < self.b else (self.b, self.a)


@dataclass(frozen=True)
class SbaGraph:
    """Immutable service graph; node ``d`` owns bit ``d`` of a placement."""

    nodes: tuple[ServiceNode, ...]
    edges: tuple[CommEdge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        for i, node in enumerate(self.nodes):
            if node.id != i:
                raise InvalidInputError(f"node ids must be contiguous from 0; position {i} has id {node.id}")
        n = len(self.nodes)
        seen = set()
        for e in self.edges:
            if not (0 <= e.a < n and 0 <= e.b < n):
                raise InvalidInputError(f"edge ({e.a}, {e.b}) references a missing node (n={n})")
            if e.key in seen:
                raise InvalidInputError(f"duplicate edge {e.key}")
            seen.add(e.key)

    @classmethod
    def from_arrays(cls, hosting: Sequence[float], edges: Iterable[tuple[int, int, float]] = ()) -> "SbaGraph":
        nodes = tuple(ServiceNode(i, float(h)) for i, h in enumerate(hosting))
        return cls(nodes, tuple(CommEdge(int(a), int(b), float(r)) for a, b, r in edges))

    @property
    def n(self) -> int:
        return len(self.nodes)

    @cached_property
    def hosting(self) -> np.ndarray:
        arr = np.array([node.hosting for node in self.nodes], dtype=np.float64)
        arr.flags.writeable = False
        return arr

    @cached_property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Endpoint index arrays and rate array, in edge order."""
        a = np.array([e.a for e in self.edges], dtype=np.intp)
        b = np.array([e.b for e in self.edges], dtype=np.intp)
        r = np.array([e.rate for e in self.edges], dtype=np.float64)
        for arr in (a, b, r):
            arr.flags.writeable = False
        return a, b, r

    def edge_set(self) -> dict[tuple[int, int], float]:
        return {e.key: e.rate for e in self.edges}

    def __eq__(self, other):
        if not isinstance(other, SbaGraph):
            return NotImplemented
        return self.nodes == other.nodes and self.edge_set() == other.edge_set()

    def __hash__(self):
        return hash((self.nodes, frozenset(self.edge_set().items())))


@dataclass(frozen=True)
class Placement:
    """Binary location vector: ``bits[d] == 1`` puts service ``d`` in the public cloud."""

    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise InvalidInputError(f"placement entries must be 0 or 1, got {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def zeros(cls, n: int) -> "Placement":
        return cls((0,) * n)

    @classmethod
    def ones(cls, n: int) -> "Placement":
        return cls((1,) * n)

    @classmethod
    def from_array(cls, arr) -> "Placement":
        return cls(tuple(int(x) for x in np.asarray(arr).ravel()))

    def as_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=np.int8)

    def __len__(self):
        return len(self.bits)

    def __str__(self):
        return "".join(map(str, self.bits))


@dataclass(frozen=True)
class CostParams:
    alpha: float
    beta1: float
    beta2: float
    hq: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta1", "beta2", "hq"):
            value = getattr(self, name)
            if not value >= 0:
                raise InvalidInputError(f"{name} must be >= 0, got {value}")

    def with_hq(self, hq: float) -> "CostParams":
        return CostParams(self.alpha, self.beta1, self.beta2, hq)

    def scaled(self, k: float) -> "CostParams":
        """Multiply the three price coefficients by ``k``; ``hq`` is kept."""
        return CostParams(k * self.alpha, k * self.beta1, k * self.beta2, self.hq)


@dataclass(frozen=True)
class CostBreakdown:
    hosting: float
    public_comm: float
    hybrid_comm: float
    total: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total", self.hosting + self.public_comm + self.hybrid_comm)


def _bits_for(graph: SbaGraph, placement: Placement) -> np.ndarray:
    if len(placement) != graph.n:
        raise InvalidInputError(f"placement has length {len(placement)}, graph has {graph.n} nodes")
    return placement.as_array().astype(bool)


def evaluate_cost(graph: SbaGraph, placement: Placement, params: CostParams) -> CostBreakdown:
    """Hosting, public and hybrid communication cost of ``placement``.

    Every undirected edge is charged once.  The offload constraint is not
    checked here; see :func:`is_feasible`.
    """
    bits = _bits_for(graph, placement)
    a, b, r = graph.edge_arrays
    xa, xb = bits[a], bits[b]
    hosting = params.alpha * float(graph.hosting[bits].sum())
    public = params.beta2 * float(r[xa & xb].sum())
    hybrid = params.beta1 * float(r[xa ^ xb].sum())
    return CostBreakdown(hosting, public, hybrid)


def evaluate_batch(graph: SbaGraph, bits: np.ndarray, params: CostParams) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised cost over many placements.

    ``bits`` is a ``(k, n)`` 0/1 array, one placement per row.  Returns
    ``(total_cost, public_hosting)``, both of shape ``(k,)``.
    """
    bits = np.asarray(bits)
    if bits.ndim != 2 or bits.shape[1] != graph.n:
        raise InvalidInputError(f"expected a (k, {graph.n}) placement matrix, got shape {bits.shape}")
    x = bits.astype(bool, copy=False)
    a, b, r = graph.edge_arrays
    public_hosting = x @ graph.hosting
    xa, xb = x[:, a], x[:, b]
    total = params.alpha * public_hosting
    if len(r):
        total = total + params.beta2 * ((xa & xb) @ r) + params.beta1 * ((xa ^ xb) @ r)
    return total, public_hosting


def public_hosting(graph: SbaGraph, placement: Placement) -> float:
    return float(graph.hosting[_bits_for(graph, placement)].sum())


def is_feasible(graph: SbaGraph, placement: Placement, params: CostParams) -> bool:
    return public_hosting(graph, placement) >= params.hq


def total_hosting(graph: SbaGraph) -> float:
    return float(graph.hosting.sum())


def density_percent(graph: SbaGraph) -> float:
    n = graph.n
    if n < 2:
        raise InvalidInputError(f"density needs at least 2 nodes, got {n}")
    return 100.0 * len(graph.edges) / (n * (n - 1) / 2)


def hq_from_fraction(graph: SbaGraph, fraction: float) -> float:
    if not 0.0 <= fraction <= 1.0:
        raise InvalidInputError(f"hq fraction must lie in [0, 1], got {fraction}")
    return fraction * total_hosting(graph)
