import dataclasses
import math
from pathlib import Path

import pytest

from fsolatency import linkbudget as lb
from fsolatency.netgraph import NodeRef
from fsolatency.routing import ResourceLimitError, RoutingProblem, node_weighted_shortest_path
from fsolatency.studio import load_scenario, run_slot, run_sweep
from fsolatency.studio import sweep as sweep_mod
from fsolatency.studio.sweep import base_snapshot, choose_solver, commodities_for, solve_cell

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="module")
def small():
    return load_scenario(DATA / "small.yaml")


@pytest.fixture(scope="module")
def small_result(small):
    return run_sweep(small)


def test_shape(small, small_result):
    r = small_result
    cells = len(small.lisl_ranges_km) * len(small.power_limits_w) * small.slot_count
    assert len(r.slots) == cells
    assert len(r.paths) == cells * len(small.connections)
    assert r.ranges == sorted(small.lisl_ranges_km)
    assert r.limits == [None, 3.0]
    assert r.connections == small.connection_labels


def test_auto_uses_exact_on_small_shell(small_result):
    assert set(small_result.solver_counts()) == {"exact"}
    assert set(small_result.status_counts()) <= {"optimal", "infeasible"}


def test_infeasible_cells_recorded_not_fatal(small_result):
    bad = small_result.infeasible_cells
    assert bad, "fixture is expected to contain disconnected cells"
    for rng, limit, slot in bad:
        row = [s for s in small_result.slot_series(rng, limit) if s.slot == slot][0]
        assert math.isinf(row.total_latency_ms) and row.status == "infeasible"


def test_totals_are_sums_and_averages_are_means(small_result):
    r = small_result
    for s in r.slots:
        rows = [p for p in r.paths if (p.lisl_range_km, p.power_limit_w, p.slot) == (s.lisl_range_km, s.power_limit_w, s.slot)]
        if s.feasible:
            assert s.total_latency_ms == pytest.approx(sum(p.latency_ms for p in rows), rel=1e-12)
            assert s.hops == sum(p.hops for p in rows)
    for limit in r.limits:
        for rng in r.ranges:
            ok = [s.total_latency_ms for s in r.slot_series(rng, limit) if s.feasible]
            avg = r.total_average(rng, limit)
            if ok:
                assert avg.latency_ms == pytest.approx(sum(ok) / len(ok), rel=1e-9)
                assert avg.latency_ms == pytest.approx(avg.propagation_ms + avg.node_delay_ms, rel=1e-12)
            else:
                assert avg.latency_ms is None
            assert avg.feasible_slots == len(ok)


def test_exact_optimum_is_monotone_in_range_and_limit(small_result):
    r = small_result
    for limit in r.limits:
        for slot in range(10):
            totals = [
                [s for s in r.slot_series(rng, limit) if s.slot == slot][0].total_latency_ms for rng in r.ranges
            ]
            assert all(b <= a for a, b in zip(totals, totals[1:]))
    for rng in r.ranges:
        for a, b in zip(r.slot_series(rng, 3.0), r.slot_series(rng, None)):
            assert b.total_latency_ms <= a.total_latency_ms


def test_leveling_beyond_model_threshold(small, small_result):
    threshold = lb.max_link_distance_km(3.0)
    beyond = [rng for rng in small_result.ranges if rng >= threshold]
    assert len(beyond) >= 2
    ref = [(p.slot, p.connection, p.latency_ms, p.path) for p in small_result.paths
           if p.power_limit_w == 3.0 and p.lisl_range_km == beyond[0]]
    for rng in beyond[1:]:
        assert ref == [(p.slot, p.connection, p.latency_ms, p.path) for p in small_result.paths
                       if p.power_limit_w == 3.0 and p.lisl_range_km == rng]


def test_cell_order_does_not_matter(small, small_result):
    shuffled = dataclasses.replace(
        small,
        lisl_ranges_km=tuple(reversed(small.lisl_ranges_km)),
        power_limits_w=tuple(reversed(small.power_limits_w)),
    )
    again = run_sweep(shuffled)
    assert again.paths == small_result.paths
    assert again.slots == small_result.slots


def test_threads_do_not_change_results(small, small_result):
    parallel = run_sweep(small, threads=2)
    assert parallel.paths == small_result.paths
    assert parallel.slots == small_result.slots


def test_single_slot_single_connection_matches_shortest_path():
    sc = load_scenario("default")
    sc = dataclasses.replace(sc, connections=(("New York", "London"),), slot_count=1,
                             lisl_ranges_km=(2500.0,), power_limits_w=(None,))
    result = run_sweep(sc)
    snap = base_snapshot(sc, 0)
    direct = node_weighted_shortest_path(snap, NodeRef.ground("New York"), NodeRef.ground("London"))
    (row,) = result.paths
    assert row.latency_ms == direct.latency_ms
    assert row.path == direct.label
    assert result.slots[0].solver == "greedy"  # 1584 satellites exceeds the exact envelope


def test_solver_policy(small):
    snap = base_snapshot(small, 0)
    assert choose_solver(small, snap, 3) == "exact"
    assert choose_solver(small, snap, 6) == "greedy"
    assert choose_solver(dataclasses.replace(small, exact_max_satellites=100), snap, 3) == "greedy"
    assert choose_solver(dataclasses.replace(small, solver="greedy"), snap, 3) == "greedy"


def test_exact_budget_falls_back_to_greedy(small, monkeypatch):
    def exhausted(*a, **k):
        raise ResourceLimitError("budget")

    monkeypatch.setattr(sweep_mod, "solve_exact", exhausted)
    snap = base_snapshot(small, 0)
    prob = RoutingProblem(snap, commodities_for(small))
    sol, solver = solve_cell(small, prob)
    assert solver == "greedy-fallback"


def test_run_slot_subset_of_cells(small):
    paths, slots = run_slot(small, 3, cells=[(2500.0, None)])
    assert len(slots) == 1 and len(paths) == 3
    assert slots[0].time_s == 180.0
