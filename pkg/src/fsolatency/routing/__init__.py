"""Multi-commodity, link-disjoint, terminal-limited minimum-latency routing."""

from .exact import ResourceLimitError, solve_exact
from .greedy import solve_greedy
from .oracle import SizeLimitError, brute_force_oracle, enumerate_paths
from .paths import node_weighted_shortest_path, shortest_path_indices
from .problem import (
    NODE_DEGREE_CAP,
    NODE_DELAY_MS,
    Commodity,
    PathSolution,
    RoutingProblem,
    TotalSolution,
    make_path,
    solution_key,
    total_latency,
)
from .validation import Violation, validate_solution

__all__ = [
    "Commodity", "PathSolution", "RoutingProblem", "TotalSolution", "Violation",
    "NODE_DELAY_MS", "NODE_DEGREE_CAP",
    "node_weighted_shortest_path", "shortest_path_indices",
    "solve_exact", "solve_greedy", "brute_force_oracle", "enumerate_paths",
    "validate_solution", "make_path", "solution_key", "total_latency",
    "ResourceLimitError", "SizeLimitError",
]
