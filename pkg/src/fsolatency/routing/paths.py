"""Single-commodity node-weighted shortest path.

Cost of a ground -> satellites -> ground path is the sum of its arc
latencies plus a fixed delay per satellite. Only satellites may be interior
nodes. Ties are broken by fewer satellites, then by the lexicographically
smallest node-index sequence.
"""

from __future__ import annotations

import heapq
from typing import Collection

from ..netgraph import NodeRef, Snapshot
from .problem import PathSolution, RoutingProblem, Commodity, make_path, undirected


def _path(pred: list[int], v: int) -> list[int]:
    out = [v]
    while pred[v] >= 0:
        v = pred[v]
        out.append(v)
    out.reverse()
    return out


def shortest_path_indices(
    snapshot: Snapshot,
    source: int,
    target: int,
    node_delay_ms: float,
    forbidden_links: Collection[tuple[int, int]] = (),
    forbidden_nodes: Collection[int] = (),
) -> tuple[float, int, tuple[int, ...]] | None:
    """Return (cost, satellite count, node indices) or None when disconnected.

    ``forbidden_links`` holds undirected (low, high) index pairs.
    """
    indptr, nbr, ms = snapshot.adjacency
    is_sat = snapshot.is_satellite.tolist()
    n = len(indptr) - 1
    if source in forbidden_nodes or target in forbidden_nodes:
        return None
    inf = float("inf")
    cost = [inf] * n
    prop = [0.0] * n
    hops = [0] * n
    pred = [-1] * n
    done = [False] * n
    for v in forbidden_nodes:
        done[v] = True
    cost[source] = 0.0
    heap = [(0.0, 0, source)]
    while heap:
        c, h, u = heapq.heappop(heap)
        if done[u] or c != cost[u] or h != hops[u]:
            continue
        done[u] = True
        if u == target:
            return c, h, tuple(_path(pred, u))
        if u != source and not is_sat[u]:
            continue
        pu, hu = prop[u], hops[u]
        for k in range(indptr[u], indptr[u + 1]):
            v = nbr[k]
            if done[v] or (not is_sat[v] and v != target):
                continue
            if forbidden_links and ((u, v) if u < v else (v, u)) in forbidden_links:
                continue
            pv = pu + ms[k]
            hv = hu + 1 if is_sat[v] else hu
            cv = pv + node_delay_ms * hv
            cur = cost[v]
            if cv > cur:
                continue
            if cv == cur:
                if hv > hops[v]:
                    continue
                if hv == hops[v] and _path(pred, u) + [v] >= _path(pred, v):
                    continue
            cost[v], prop[v], hops[v], pred[v] = cv, pv, hv, u
            heapq.heappush(heap, (cv, hv, v))
    return None


def node_weighted_shortest_path(
    snapshot: Snapshot,
    source: NodeRef,
    destination: NodeRef,
    node_delay_ms: float = 10.0,
    forbidden_edges: Collection[tuple[NodeRef, NodeRef]] = (),
) -> PathSolution | None:
    """Minimum-latency ground-to-ground path, or None if the pair is disconnected."""
    idx = snapshot.index
    links = {undirected(idx[a], idx[b]) for a, b in forbidden_edges if a in idx and b in idx}
    found = shortest_path_indices(snapshot, idx[source], idx[destination], node_delay_ms, links)
    if found is None:
        return None
    problem = RoutingProblem(
        snapshot, (Commodity(f"{source.label}->{destination.label}", source, destination),),
        node_delay_ms=node_delay_ms,
    )
    return make_path(problem, 0, found[2])
