"""Exact multi-commodity routing by branch-and-bound.

The bound at each search node is the sum of per-commodity shortest paths
under that node's restrictions, with link sharing and terminal limits
relaxed. A violated link is branched on by reserving it for each current
user in turn plus one child where no current user may take it; an
over-subscribed satellite is branched on by excluding each user in turn.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .greedy import solve_greedy
from .paths import shortest_path_indices
from .problem import RoutingProblem, TotalSolution, make_path, solution_key, undirected
from .validation import link_users, node_degrees


class ResourceLimitError(RuntimeError):
    """Search budget exhausted before any feasible routing was found."""


@dataclass(frozen=True)
class _Restrictions:
    links: tuple[frozenset, ...]
    nodes: tuple[frozenset, ...]

    def add_link(self, ks, link) -> "_Restrictions":
        links = list(self.links)
        for k in ks:
            links[k] = links[k] | {link}
        return _Restrictions(tuple(links), self.nodes)

    def add_node(self, k, v) -> "_Restrictions":
        nodes = list(self.nodes)
        nodes[k] = nodes[k] | {v}
        return _Restrictions(self.links, tuple(nodes))


class _Seq:
    __slots__ = ("indices",)

    def __init__(self, indices):
        self.indices = indices


def solve_exact(
    problem: RoutingProblem,
    node_limit: int = 1_000_000,
    time_limit_s: float | None = None,
) -> TotalSolution:
    k_count = len(problem.commodities)
    if k_count == 0:
        return TotalSolution((), 0.0, "optimal", lower_bound_ms=0.0)
    snap = problem.snapshot
    cap = problem.node_degree_cap
    deadline = None if time_limit_s is None else time.perf_counter() + time_limit_s
    ends = [problem.endpoints(k) for k in range(k_count)]
    cache: dict = {}

    def route(k, links, nodes):
        key = (k, links, nodes)
        if key not in cache:
            s, t = ends[k]
            cache[key] = shortest_path_indices(snap, s, t, problem.node_delay_ms, links, nodes)
        return cache[key]

    greedy = solve_greedy(problem)
    best = greedy.paths if greedy.feasible else None
    best_key = solution_key(best) if best else None

    root = _Restrictions(tuple(frozenset() for _ in range(k_count)), tuple(frozenset() for _ in range(k_count)))
    stack = [root]
    explored = 0
    root_bound = None
    exhausted = False
    while stack:
        if explored >= node_limit or (deadline is not None and time.perf_counter() > deadline):
            exhausted = True
            break
        r = stack.pop()
        explored += 1
        found = [route(k, r.links[k], r.nodes[k]) for k in range(k_count)]
        if any(f is None for f in found):
            if root_bound is None:
                root_bound = float("inf")
            continue
        bound = 0.0
        for f in found:
            bound += f[0]
        if root_bound is None:
            root_bound = bound
        if best_key is not None and bound > best_key[0]:
            continue
        seqs = [_Seq(f[2]) for f in found]
        users = link_users(seqs)
        contested = [(len(ks), link) for link, ks in users.items() if len(ks) > 1]
        if contested:
            most = max(n for n, _ in contested)
            link = min(l for n, l in contested if n == most)
            ks = users[link]
            children = [r.add_link([j for j in range(k_count) if j != k], link) for k in ks]
            children.append(r.add_link(ks, link))
            stack.extend(reversed(children))
            continue
        over = [(d - cap, v) for v, d in node_degrees(seqs).items() if d > cap]
        if over:
            excess = max(e for e, _ in over)
            v = min(x for e, x in over if e == excess)
            ks = sorted({k for k, s in enumerate(seqs) if v in s.indices})
            stack.extend(reversed([r.add_node(k, v) for k in ks]))
            continue
        paths = tuple(make_path(problem, k, f[2]) for k, f in enumerate(found))
        key = solution_key(paths)
        if best_key is None or key < best_key:
            best, best_key = paths, key

    if best is None:
        if exhausted:
            raise ResourceLimitError(f"no feasible routing found within {explored} search nodes")
        return TotalSolution(
            tuple([None] * k_count), float("inf"), "infeasible",
            lower_bound_ms=root_bound, nodes_explored=explored,
        )
    return TotalSolution(
        tuple(best), best_key[0], "heuristic" if exhausted else "optimal",
        lower_bound_ms=root_bound, nodes_explored=explored,
    )
