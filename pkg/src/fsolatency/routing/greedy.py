from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .paths import shortest_path_indices
from .problem import RoutingProblem, TotalSolution, make_path, path_links, total_latency


def default_order(problem: RoutingProblem) -> list[int]:
    """Commodities by descending great-circle separation of their endpoints."""
    pos = problem.snapshot.positions
    if pos is None:
        return list(range(len(problem.commodities)))

    def angle(k):
        s, t = problem.endpoints(k)
        a, b = pos[s], pos[t]
        cos = float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))
        return math.acos(max(-1.0, min(1.0, cos)))

    return sorted(range(len(problem.commodities)), key=lambda k: (-angle(k), k))


def solve_greedy(problem: RoutingProblem, order: Sequence[int] | None = None) -> TotalSolution:
    """Route commodities one at a time over the residual graph.

    Links taken by earlier commodities are forbidden to later ones, as are
    satellites with no spare terminals.
    """
    k_count = len(problem.commodities)
    order = default_order(problem) if order is None else list(order)
    if sorted(order) != list(range(k_count)):
        raise ValueError("order must be a permutation of commodity positions")
    is_sat = problem.snapshot.is_satellite
    cap = problem.node_degree_cap
    used_links: set[tuple[int, int]] = set()
    degree: dict[int, int] = {}
    blocked: set[int] = set()
    paths = [None] * k_count
    for k in order:
        s, t = problem.endpoints(k)
        if degree.get(s, 0) + 1 > cap or degree.get(t, 0) + 1 > cap:
            continue
        found = shortest_path_indices(
            problem.snapshot, s, t, problem.node_delay_ms, used_links, blocked
        )
        if found is None:
            continue
        seq = found[2]
        paths[k] = make_path(problem, k, seq)
        used_links.update(path_links(seq))
        for u, v in zip(seq, seq[1:]):
            for x in (u, v):
                degree[x] = degree.get(x, 0) + 1
                if is_sat[x] and degree[x] + 2 > cap:
                    blocked.add(x)
    total = total_latency(paths)
    status = "heuristic" if math.isfinite(total) else "infeasible"
    return TotalSolution(tuple(paths), total, status)
