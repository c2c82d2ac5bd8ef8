"""Cost-optimal placement of service-based applications across a private and a public cloud."""

from .errors import GraphFormatError, InfeasibleInstanceError, InstanceTooLargeError, InvalidInputError
from .exact import SolveResult, exact_solve, exact_solve_bnb
from .graphio import read_graph, write_graph
from .instances import InstanceSpec, generate_instance, preset, table5_specs
from .metaheuristics import BpsoConfig, GaConfig, bpso_solve, ga_solve, greedy_solve, repair_placement
from .model import (
    CommEdge,
    CostBreakdown,
    CostParams,
    Placement,
    SbaGraph,
    ServiceNode,
    density_percent,
    evaluate_cost,
    hq_from_fraction,
    is_feasible,
    total_hosting,
)

__version__ = "0.1.0"
