"""Synthetic service graphs with prescribed size, edge count and total hosting."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidInputError
from .model import CommEdge, SbaGraph, ServiceNode

DEFAULT_RATE_MIN = 1.0
DEFAULT_RATE_MAX = 50.0


@dataclass(frozen=True)
class InstanceSpec:
    name: str
    nodes: int
    edges: int
    total_hosting: int
    rate_min: float = DEFAULT_RATE_MIN
    rate_max: float = DEFAULT_RATE_MAX
    seed: int = 0

    def validate(self):
        max_edges = self.nodes * (self.nodes - 1) // 2
        if self.nodes < 1:
            raise InvalidInputError(f"{self.name}: need at least one node")
        if not 0 <= self.edges <= max_edges:
            raise InvalidInputError(f"{self.name}: {self.edges} edges impossible on {self.nodes} nodes (max {max_edges})")
        if self.total_hosting < self.nodes or int(self.total_hosting) != self.total_hosting:
            raise InvalidInputError(f"{self.name}: total_hosting must be an integer >= nodes")
        if not 0 < self.rate_min <= self.rate_max:
            raise InvalidInputError(f"{self.name}: need 0 < rate_min <= rate_max")

    def with_seed(self, seed: int) -> "InstanceSpec":
        return replace(self, seed=seed)


# name, nodes, edges, hosting needed
_TABLE5 = [
    ("G1", 20, 19, 469),
    ("G2", 17, 28, 521),
    ("G3", 18, 46, 418),
    ("G4", 11, 22, 254),
    ("G5", 16, 60, 413),
    ("G6", 14, 55, 332),
    ("G7", 13, 55, 319),
    ("G8", 19, 137, 570),
    ("G9", 15, 95, 363),
    ("G10", 12, 66, 297),
]

# nominal density column of the same table, percent
TABLE5_DENSITY = {name: 10 * (i + 1) for i, (name, *_rest) in enumerate(_TABLE5)}


def table5_specs() -> list[InstanceSpec]:
    """The ten benchmark presets G1..G10; preset ``Gk`` uses seed ``k``."""
    return [InstanceSpec(name, n, m, h, seed=i + 1) for i, (name, n, m, h) in enumerate(_TABLE5)]


def preset(name: str) -> InstanceSpec:
    for spec in table5_specs():
        if spec.name.lower() == name.lower():
            return spec
    raise InvalidInputError(f"unknown preset {name!r}; expected one of G1..G10")


def _pair(index: int, n: int) -> tuple[int, int]:
    # unordered pairs (i, j), i < j, in row-major order
    i = 0
    row = n - 1
    while index >= row:
        index -= row
        i += 1
        row -= 1
    return i, i + 1 + index


def generate_instance(spec: InstanceSpec) -> SbaGraph:
    """Random simple graph matching ``spec`` exactly; deterministic in ``spec.seed``.

    Edges are drawn uniformly without replacement among all unordered
    pairs.  Every node starts with one hosting unit and the remaining
    ``total_hosting - nodes`` units are spread uniformly at random.  Rates
    are uniform in ``[rate_min, rate_max]`` rounded to one decimal.
    Connectivity is not enforced.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    n = spec.nodes
    pairs = n * (n - 1) // 2
    chosen = np.sort(rng.choice(pairs, size=spec.edges, replace=False)) if spec.edges else []
    hosting = 1 + rng.multinomial(int(spec.total_hosting) - n, np.full(n, 1.0 / n))
    rates = np.round(rng.uniform(spec.rate_min, spec.rate_max, size=spec.edges), 1)
    rates = np.clip(rates, spec.rate_min, spec.rate_max)
    nodes = tuple(ServiceNode(i, float(h)) for i, h in enumerate(hosting))
    edges = tuple(CommEdge(*_pair(int(k), n), float(r)) for k, r in zip(chosen, rates))
    return SbaGraph(nodes, edges)


def preset_graph(name: str) -> SbaGraph:
    return generate_instance(preset(name))
