"""Sweep orchestration over LISL ranges x power limits x time slots."""

from __future__ import annotations

import hashlib
import logging
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable

from ..netgraph import NodeRef, Snapshot, constellation_snapshot
from ..orbital import propagate_constellation
from ..routing import (
    Commodity,
    ResourceLimitError,
    RoutingProblem,
    TotalSolution,
    solve_exact,
    solve_greedy,
    validate_solution,
)
from .scenario import Scenario

log = logging.getLogger(__name__)

Cell = tuple[float, "float | None"]


def limit_sort_key(limit: float | None) -> tuple:
    """Unlimited first, then ascending limit."""
    return (0, 0.0) if limit is None else (1, limit)


@dataclass(frozen=True)
class PathRecord:
    lisl_range_km: float
    power_limit_w: float | None
    slot: int
    time_s: float
    connection: int
    label: str
    latency_ms: float | None
    propagation_ms: float | None
    node_delay_ms: float | None
    hops: int | None
    path: str | None

    @property
    def routed(self) -> bool:
        return self.latency_ms is not None


@dataclass(frozen=True)
class SlotRecord:
    lisl_range_km: float
    power_limit_w: float | None
    slot: int
    time_s: float
    total_latency_ms: float
    propagation_ms: float
    node_delay_ms: float
    hops: int
    status: str
    solver: str
    routed: int
    nodes_explored: int

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"


@dataclass(frozen=True)
class SeriesPoint:
    """Averages over the slots in which the quantity was defined."""

    latency_ms: float | None
    propagation_ms: float | None
    node_delay_ms: float | None
    hops: float | None
    feasible_slots: int
    slots: int


@dataclass(frozen=True)
class SweepResult:
    scenario: Scenario | None
    paths: tuple[PathRecord, ...]
    slots: tuple[SlotRecord, ...]

    @property
    def ranges(self) -> list[float]:
        return sorted({s.lisl_range_km for s in self.slots})

    @property
    def limits(self) -> list[float | None]:
        return sorted({s.power_limit_w for s in self.slots}, key=limit_sort_key)

    @property
    def connections(self) -> list[str]:
        seen = {}
        for p in self.paths:
            seen.setdefault(p.connection, p.label)
        return [seen[k] for k in sorted(seen)]

    def slot_series(self, lisl_range_km: float, power_limit_w: float | None) -> list[SlotRecord]:
        return [s for s in self.slots if s.lisl_range_km == lisl_range_km and s.power_limit_w == power_limit_w]

    def total_average(self, lisl_range_km: float, power_limit_w: float | None) -> SeriesPoint:
        rows = self.slot_series(lisl_range_km, power_limit_w)
        ok = [s for s in rows if s.feasible]
        return _average(
            [(s.total_latency_ms, s.propagation_ms, s.node_delay_ms, s.hops) for s in ok], len(rows)
        )

    def connection_average(self, lisl_range_km: float, power_limit_w: float | None, connection: int) -> SeriesPoint:
        rows = [
            p for p in self.paths
            if p.lisl_range_km == lisl_range_km and p.power_limit_w == power_limit_w and p.connection == connection
        ]
        ok = [p for p in rows if p.routed]
        return _average([(p.latency_ms, p.propagation_ms, p.node_delay_ms, p.hops) for p in ok], len(rows))

    @property
    def infeasible_cells(self) -> list[tuple[float, float | None, int]]:
        return [(s.lisl_range_km, s.power_limit_w, s.slot) for s in self.slots if not s.feasible]

    def status_counts(self) -> dict[str, int]:
        out: dict[str, int] = defaultdict(int)
        for s in self.slots:
            out[s.status] += 1
        return dict(sorted(out.items()))

    def solver_counts(self) -> dict[str, int]:
        out: dict[str, int] = defaultdict(int)
        for s in self.slots:
            out[s.solver] += 1
        return dict(sorted(out.items()))


def _average(rows: list[tuple], slots: int) -> SeriesPoint:
    n = len(rows)
    if not n:
        return SeriesPoint(None, None, None, None, 0, slots)
    sums = [0.0, 0.0, 0.0, 0.0]
    for row in rows:
        for i, v in enumerate(row):
            sums[i] += v
    return SeriesPoint(sums[0] / n, sums[1] / n, sums[2] / n, sums[3] / n, n, slots)


def commodities_for(scenario: Scenario) -> tuple[Commodity, ...]:
    return tuple(
        Commodity(label, NodeRef.ground(a), NodeRef.ground(b))
        for label, (a, b) in zip(scenario.connection_labels, scenario.connections)
    )


def choose_solver(scenario: Scenario, snapshot: Snapshot, commodity_count: int) -> str:
    if scenario.solver != "auto":
        return scenario.solver
    n_sat = int(snapshot.is_satellite.sum())
    if commodity_count <= scenario.exact_max_commodities and n_sat <= scenario.exact_max_satellites:
        return "exact"
    return "greedy"


def solve_cell(scenario: Scenario, problem: RoutingProblem) -> tuple[TotalSolution, str]:
    """Solve one cell under the scenario's solver policy; returns (solution, solver used)."""
    solver = choose_solver(scenario, problem.snapshot, len(problem.commodities))
    if solver == "exact":
        try:
            return solve_exact(problem, scenario.exact_node_limit, scenario.exact_time_limit_s), "exact"
        except ResourceLimitError:
            log.warning("exact search budget exhausted at t=%s; using greedy", problem.snapshot.time_s)
            return solve_greedy(problem), "greedy-fallback"
    return solve_greedy(problem), "greedy"


def _fingerprint(snap: Snapshot) -> bytes:
    h = hashlib.blake2b(digest_size=16)
    h.update(snap.src.tobytes())
    h.update(snap.dst.tobytes())
    return h.digest()


def slot_time(scenario: Scenario, slot: int) -> float:
    return slot * scenario.slot_interval_s


def base_snapshot(scenario: Scenario, slot: int) -> Snapshot:
    """Snapshot at the widest configured range with no power limit."""
    t = slot_time(scenario, slot)
    spec = scenario.constellation
    return constellation_snapshot(
        spec, propagate_constellation(spec, t), scenario.sites, max(scenario.lisl_ranges_km),
        time_s=t, optics=scenario.optics, atmosphere=scenario.atmosphere,
        grazing_altitude_km=scenario.grazing_altitude_km,
    )


def cell_snapshot(base: Snapshot, lisl_range_km: float, power_limit_w: float | None) -> Snapshot:
    return base.restrict(lisl_range_km, power_limit_w)


def run_slot(scenario: Scenario, slot: int, cells: Iterable[Cell] | None = None) -> tuple[list[PathRecord], list[SlotRecord]]:
    """Every (range, limit) cell of one time slot.

    Cells whose restricted graphs coincide (typically once a power limit,
    rather than the range, decides which links exist) share one solve.
    """
    if cells is None:
        cells = [(r, p) for r in scenario.lisl_ranges_km for p in scenario.power_limits_w]
    t = slot_time(scenario, slot)
    base = base_snapshot(scenario, slot)
    commodities = commodities_for(scenario)
    solved: dict[bytes, tuple[TotalSolution, str]] = {}
    paths: list[PathRecord] = []
    slots: list[SlotRecord] = []
    for rng, limit in cells:
        snap = cell_snapshot(base, rng, limit)
        problem = RoutingProblem(snap, commodities, scenario.node_delay_ms, scenario.node_degree_cap)
        key = _fingerprint(snap)
        if key not in solved:
            sol, solver = solve_cell(scenario, problem)
            problems = validate_solution(problem, sol)
            if problems:
                raise RuntimeError(
                    f"solver produced an invalid routing at slot {slot}, range {rng}, limit {limit}: "
                    + "; ".join(v.detail for v in problems)
                )
            solved[key] = (sol, solver)
        sol, solver = solved[key]
        prop = nd = 0.0
        for k, c in enumerate(commodities):
            p = sol.paths[k] if sol.paths else None
            if p is None:
                paths.append(PathRecord(rng, limit, slot, t, k, c.id, None, None, None, None, None))
                continue
            prop += p.propagation_ms
            nd += p.node_delay_ms
            paths.append(PathRecord(
                rng, limit, slot, t, k, c.id, p.latency_ms, p.propagation_ms, p.node_delay_ms, p.hop_count, p.label,
            ))
        routed = sum(1 for p in (sol.paths or ()) if p is not None)
        slots.append(SlotRecord(
            rng, limit, slot, t, sol.total_latency_ms, prop, nd, sol.total_hops, sol.status, solver,
            routed, sol.nodes_explored,
        ))
    return paths, slots


def _run_slot_job(args):
    scenario, slot = args
    return run_slot(scenario, slot)


def run_sweep(scenario: Scenario, threads: int = 1, slots: Iterable[int] | None = None) -> SweepResult:
    """Solve every (range, limit, slot) cell; per-cell infeasibility never aborts the run."""
    slot_ids = list(range(scenario.slot_count)) if slots is None else sorted(set(slots))
    if threads < 1:
        raise ValueError("threads must be >= 1")
    if threads == 1 or len(slot_ids) <= 1:
        chunks = [run_slot(scenario, s) for s in slot_ids]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_run_slot_job, [(scenario, s) for s in slot_ids]))
    paths = [p for chunk, _ in chunks for p in chunk]
    slot_rows = [s for _, chunk in chunks for s in chunk]
    paths.sort(key=lambda p: (limit_sort_key(p.power_limit_w), p.lisl_range_km, p.slot, p.connection))
    slot_rows.sort(key=lambda s: (limit_sort_key(s.power_limit_w), s.lisl_range_km, s.slot))
    return SweepResult(scenario, tuple(paths), tuple(slot_rows))
