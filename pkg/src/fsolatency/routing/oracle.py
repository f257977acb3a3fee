"""Exhaustive reference solver for tiny instances (test oracle)."""

from __future__ import annotations

import math

from .problem import RoutingProblem, TotalSolution, make_path, path_links, solution_key


class SizeLimitError(ValueError):
    pass


def enumerate_paths(problem: RoutingProblem, k: int, max_paths: int) -> list[tuple[int, ...]]:
    """Every simple ground -> satellites -> ground path of commodity ``k``."""
    snap = problem.snapshot
    indptr, nbr, _ = snap.adjacency
    is_sat = snap.is_satellite
    s, t = problem.endpoints(k)
    out = []
    path = [s]
    on_path = {s}

    def walk(u):
        for a in range(indptr[u], indptr[u + 1]):
            v = nbr[a]
            if v == t:
                if u != s:  # at least one satellite in between
                    out.append(tuple(path) + (t,))
                    if len(out) > max_paths:
                        raise SizeLimitError(f"more than {max_paths} paths for commodity {k}")
                continue
            if v in on_path or not is_sat[v]:
                continue
            path.append(v)
            on_path.add(v)
            walk(v)
            path.pop()
            on_path.discard(v)

    walk(s)
    return out


def brute_force_oracle(
    problem: RoutingProblem,
    max_satellites: int = 12,
    max_commodities: int = 3,
    max_paths: int = 200_000,
    max_combinations: int = 2_000_000,
) -> TotalSolution:
    """Global optimum by enumerating all simple paths and all their combinations.

    Combinations are pruned only when their partial latency already exceeds
    the best complete one, so the search stays exhaustive.
    """
    snap = problem.snapshot
    n_sat = int(snap.is_satellite.sum())
    k_count = len(problem.commodities)
    if n_sat > max_satellites or k_count > max_commodities:
        raise SizeLimitError(
            f"oracle handles <= {max_satellites} satellites and <= {max_commodities} commodities "
            f"(got {n_sat}, {k_count})"
        )
    if k_count == 0:
        return TotalSolution((), 0.0, "optimal")

    options = []
    for k in range(k_count):
        paths = [make_path(problem, k, seq) for seq in enumerate_paths(problem, k, max_paths)]
        if not paths:
            return TotalSolution(tuple([None] * k_count), float("inf"), "infeasible")
        paths.sort(key=lambda p: (p.latency_ms, p.hop_count, p.indices))
        options.append(paths)
    combos = math.prod(len(p) for p in options)
    if combos > max_combinations:
        raise SizeLimitError(f"{combos} path combinations exceed the limit of {max_combinations}")
    floor = [p[0].latency_ms for p in options]
    rest = [sum(floor[k:]) for k in range(k_count)] + [0.0]
    cap = problem.node_degree_cap

    best = None
    best_key = None
    chosen = []
    links: set = set()
    degree: dict[int, int] = {}

    def search(k, partial):
        nonlocal best, best_key
        if k == k_count:
            key = solution_key(chosen)
            if best_key is None or key < best_key:
                best, best_key = tuple(chosen), key
            return
        for p in options[k]:
            if best_key is not None and partial + p.latency_ms + rest[k + 1] > best_key[0] * (1 + 1e-12):
                break
            plinks = path_links(p.indices)
            if any(l in links for l in plinks):
                continue
            bump = {}
            for u, v in zip(p.indices, p.indices[1:]):
                bump[u] = bump.get(u, 0) + 1
                bump[v] = bump.get(v, 0) + 1
            if any(degree.get(x, 0) + d > cap for x, d in bump.items()):
                continue
            links.update(plinks)
            for x, d in bump.items():
                degree[x] = degree.get(x, 0) + d
            chosen.append(p)
            search(k + 1, partial + p.latency_ms)
            chosen.pop()
            for x, d in bump.items():
                degree[x] -= d
            links.difference_update(plinks)

    search(0, 0.0)
    if best is None:
        return TotalSolution(tuple([None] * k_count), float("inf"), "infeasible")
    return TotalSolution(best, best_key[0], "optimal")
