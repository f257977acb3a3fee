from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

from ..netgraph import NodeRef, Snapshot

Status = Literal["optimal", "heuristic", "infeasible"]

NODE_DELAY_MS = 10.0
NODE_DEGREE_CAP = 4


@dataclass(frozen=True)
class Commodity:
    """One source -> destination ground-station demand."""

    id: str
    source: NodeRef
    destination: NodeRef

    def __post_init__(self):
        if self.source == self.destination:
            raise ValueError(f"commodity {self.id}: source equals destination")
        if self.source.is_satellite or self.destination.is_satellite:
            raise ValueError(f"commodity {self.id}: endpoints must be ground stations")


@dataclass(frozen=True, eq=False)
class RoutingProblem:
    snapshot: Snapshot
    commodities: tuple[Commodity, ...]
    node_delay_ms: float = NODE_DELAY_MS
    node_degree_cap: int = NODE_DEGREE_CAP

    def __post_init__(self):
        object.__setattr__(self, "commodities", tuple(self.commodities))
        idx = self.snapshot.index
        for c in self.commodities:
            for end in (c.source, c.destination):
                if end not in idx:
                    raise ValueError(f"commodity {c.id}: {end} is not in the snapshot")
        if len({c.id for c in self.commodities}) != len(self.commodities):
            raise ValueError("commodity ids must be unique")
        if self.node_delay_ms < 0:
            raise ValueError("node delay must be >= 0")
        if self.node_degree_cap < 2:
            raise ValueError("node degree cap must be >= 2")

    def endpoints(self, k: int) -> tuple[int, int]:
        c = self.commodities[k]
        idx = self.snapshot.index
        return idx[c.source], idx[c.destination]


@dataclass(frozen=True)
class PathSolution:
    commodity: str
    nodes: tuple[NodeRef, ...]
    latency_ms: float
    propagation_ms: float
    node_delay_ms: float
    hop_count: int
    indices: tuple[int, ...] = field(default=(), repr=False, compare=False)

    @property
    def label(self) -> str:
        return " > ".join(n.label for n in self.nodes)


@dataclass(frozen=True)
class TotalSolution:
    """Routing of every commodity in one slot.

    ``paths[k]`` is None for a commodity that could not be routed, in which case
    ``status`` is ``infeasible`` and ``total_latency_ms`` is infinite.
    """

    paths: tuple[PathSolution | None, ...]
    total_latency_ms: float
    status: Status
    lower_bound_ms: float | None = None
    nodes_explored: int = 0

    @property
    def total_hops(self) -> int:
        return sum(p.hop_count for p in self.paths if p is not None)

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"


def propagation_ms(snapshot: Snapshot, seq: Sequence[int]) -> float:
    """Sum of arc latencies along ``seq``, accumulated in path order."""
    _, _, ms = snapshot.adjacency
    total = 0.0
    for u, v in zip(seq, seq[1:]):
        k = snapshot.arc(u, v)
        if k is None:
            raise ValueError(f"no arc {snapshot.nodes[u]} -> {snapshot.nodes[v]}")
        total += ms[k]
    return total


def make_path(problem: RoutingProblem, k: int, seq: Sequence[int]) -> PathSolution:
    snap = problem.snapshot
    seq = tuple(seq)
    prop = propagation_ms(snap, seq)
    hops = len(seq) - 2
    delay = problem.node_delay_ms * hops
    return PathSolution(
        commodity=problem.commodities[k].id,
        nodes=tuple(snap.nodes[i] for i in seq),
        latency_ms=prop + delay,
        propagation_ms=prop,
        node_delay_ms=delay,
        hop_count=hops,
        indices=seq,
    )


def total_latency(paths: Sequence[PathSolution | None]) -> float:
    """Sum of path latencies in commodity order; infinite if any is missing."""
    total = 0.0
    for p in paths:
        if p is None:
            return math.inf
        total += p.latency_ms
    return total


def solution_key(paths: Sequence[PathSolution | None]):
    """Tie-break order shared by all solvers: latency, then hops, then node order."""
    return (total_latency(paths), sum(p.hop_count for p in paths if p), tuple(p.indices for p in paths if p))


def undirected(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def path_links(seq: Sequence[int]) -> list[tuple[int, int]]:
    return [undirected(u, v) for u, v in zip(seq, seq[1:])]
