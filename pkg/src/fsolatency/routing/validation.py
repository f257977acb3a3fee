from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass

from .problem import RoutingProblem, TotalSolution, PathSolution, total_latency, undirected


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str
    commodity: str | None = None


def link_users(paths) -> dict[tuple[int, int], list[int]]:
    users = defaultdict(list)
    for k, p in enumerate(paths):
        if p is None:
            continue
        seq = p.indices
        for u, v in zip(seq, seq[1:]):
            users[undirected(u, v)].append(k)
    return users


def node_degrees(paths) -> Counter:
    """Incident path arcs per node index, summed over commodities."""
    deg = Counter()
    for p in paths:
        if p is None:
            continue
        seq = p.indices
        for u, v in zip(seq, seq[1:]):
            deg[u] += 1
            deg[v] += 1
    return deg


def _check_path(problem: RoutingProblem, k: int, p: PathSolution) -> list[Violation]:
    snap = problem.snapshot
    c = problem.commodities[k]
    out = []

    def bad(kind, detail):
        out.append(Violation(kind, detail, c.id))

    if p.commodity != c.id:
        bad("commodity", f"path labelled {p.commodity!r}")
    nodes = p.nodes
    if len(nodes) < 2 or nodes[0] != c.source or nodes[-1] != c.destination:
        bad("endpoints", f"path runs {nodes[0] if nodes else '?'} -> {nodes[-1] if nodes else '?'}")
    if len(set(nodes)) != len(nodes):
        bad("not-simple", "path repeats a node")
    for n in nodes[1:-1]:
        if not n.is_satellite:
            bad("ground-transit", f"{n} used as a relay")
    idx = snap.index
    if any(n not in idx for n in nodes):
        bad("unknown-node", "path names a node absent from the snapshot")
        return out
    seq = [idx[n] for n in nodes]
    if p.indices and tuple(p.indices) != tuple(seq):
        bad("indices", "index sequence disagrees with node sequence")
    _, _, ms = snap.adjacency
    prop = 0.0
    for u, v in zip(seq, seq[1:]):
        a = snap.arc(u, v)
        if a is None:
            bad("missing-arc", f"no link {snap.nodes[u]} -> {snap.nodes[v]}")
            continue
        prop += ms[a]
        if snap.power_limit_w is not None and snap.power_w[a] > snap.power_limit_w:
            bad("power", f"link {snap.nodes[u]} -> {snap.nodes[v]} needs {snap.power_w[a]:.4g} W")
    hops = len(nodes) - 2
    if p.hop_count != hops:
        bad("decomposition", f"hop_count {p.hop_count} != {hops} satellites")
    if p.node_delay_ms != problem.node_delay_ms * p.hop_count:
        bad("decomposition", f"node delay {p.node_delay_ms} != {problem.node_delay_ms} x {p.hop_count}")
    if p.latency_ms != p.propagation_ms + p.node_delay_ms:
        bad("decomposition", f"latency {p.latency_ms} != {p.propagation_ms} + {p.node_delay_ms}")
    elif not math.isclose(p.propagation_ms, prop, rel_tol=1e-12, abs_tol=1e-12):
        bad("decomposition", f"propagation {p.propagation_ms} != link sum {prop}")
    return out


def validate_solution(problem: RoutingProblem, solution: TotalSolution) -> list[Violation]:
    """All constraint violations of ``solution``; an empty list means it is valid."""
    out: list[Violation] = []
    if len(solution.paths) != len(problem.commodities):
        return [Violation("shape", f"{len(solution.paths)} paths for {len(problem.commodities)} commodities")]
    idx = problem.snapshot.index
    fixed = []
    for k, p in enumerate(solution.paths):
        if p is None:
            fixed.append(None)
            continue
        out.extend(_check_path(problem, k, p))
        if all(n in idx for n in p.nodes):
            fixed.append(_Indexed(tuple(idx[n] for n in p.nodes)))
        else:
            fixed.append(None)
    ids = [c.id for c in problem.commodities]
    for link, users in sorted(link_users(fixed).items()):
        if len(users) > 1:
            a, b = (problem.snapshot.nodes[i] for i in link)
            out.append(Violation("link-shared", f"{a} - {b} carries {[ids[k] for k in users]}"))
    for v, d in sorted(node_degrees(fixed).items()):
        if d > problem.node_degree_cap:
            out.append(Violation("degree", f"{problem.snapshot.nodes[v]} terminates {d} links"))
    if solution.status == "infeasible":
        if all(p is not None for p in solution.paths):
            out.append(Violation("status", "every commodity routed but status is infeasible"))
    else:
        if any(p is None for p in solution.paths):
            out.append(Violation("status", f"status {solution.status} with unrouted commodities"))
        elif solution.total_latency_ms != total_latency(solution.paths):
            out.append(Violation("total", f"total {solution.total_latency_ms} != sum of paths"))
    return out


@dataclass(frozen=True)
class _Indexed:
    indices: tuple[int, ...]
