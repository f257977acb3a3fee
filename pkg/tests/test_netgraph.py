import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fsolatency import linkbudget as lb
from fsolatency.constants import SPEED_OF_LIGHT_KM_MS
from fsolatency.netgraph import (
    NodeRef,
    build_snapshot,
    constellation_snapshot,
    latency_ms,
    permanent_neighbor_counts,
    read_snapshot_csv,
    snapshot_stats,
    write_snapshot_csv,
)
from fsolatency.orbital import ConstellationSpec, GroundSite, SatelliteId, propagate_constellation

SPEC = ConstellationSpec()
SITES = [GroundSite("New York", 40.7128, -74.0060), GroundSite("London", 51.5074, -0.1278),
         GroundSite("Tokyo", 35.6762, 139.6503)]


@pytest.fixture(scope="module")
def positions():
    return propagate_constellation(SPEC, 0.0)


@pytest.fixture(scope="module")
def wide(positions):
    return constellation_snapshot(SPEC, positions, SITES, 5016.0)


def arc_set(snap):
    return {(snap.nodes[u], snap.nodes[v]) for u, v in zip(snap.src.tolist(), snap.dst.tolist())}


class TestNodeRef:
    def test_labels_round_trip(self):
        for ref in (NodeRef.sat(3, 14), NodeRef.ground("Cape Town")):
            assert NodeRef.from_label(ref.label) == ref

    def test_ordering_puts_ground_before_satellites(self):
        refs = sorted([NodeRef.sat(0, 1), NodeRef.ground("b"), NodeRef.sat(0, 0), NodeRef.ground("a")])
        assert [r.label for r in refs] == ["GS:a", "GS:b", "SAT-00-00", "SAT-00-01"]


class TestBuild:
    def test_latency_anchor(self):
        assert latency_ms(1575.0) == pytest.approx(5.2536, abs=1e-4)

    def test_invariants(self, wide):
        is_sat = wide.is_satellite
        assert np.all(wide.src != wide.dst)
        assert not np.any(~is_sat[wide.src] & ~is_sat[wide.dst]), "no ground-to-ground arcs"
        isl = wide.isl_mask
        assert wide.distance_km[isl].max() <= 5016.0
        assert np.all(wide.distance_km[~isl] <= 1123.0)
        assert np.all(wide.power_w > 0)
        assert np.allclose(wide.latency_ms * SPEED_OF_LIGHT_KM_MS, wide.distance_km, rtol=1e-9)

    def test_symmetric(self, wide):
        arcs = {}
        for e in wide.edges:
            arcs[(e.source, e.target)] = e
        for (a, b), e in arcs.items():
            back = arcs[(b, a)]
            assert back.distance_km == e.distance_km and back.latency_ms == e.latency_ms
            if a.is_satellite and b.is_satellite:
                assert back.power_w == e.power_w

    def test_isl_power_matches_budget(self, wide):
        isl = wide.isl_mask
        assert np.allclose(wide.power_w[isl], lb.isl_transmit_power_w(lb.DEFAULT_OPTICS, wide.distance_km[isl]), rtol=1e-12)

    def test_deterministic_order(self, positions):
        a = constellation_snapshot(SPEC, positions, SITES, 2000.0)
        b = constellation_snapshot(SPEC, positions, list(reversed(SITES)), 2000.0)
        assert a.nodes == b.nodes
        assert np.array_equal(a.src, b.src) and np.array_equal(a.dst, b.dst)
        assert np.array_equal(a.distance_km, b.distance_km)

    def test_range_zero_keeps_only_ground_links(self, positions):
        snap = constellation_snapshot(SPEC, positions, SITES, 0.0)
        assert not snap.isl_mask.any()
        assert snap.edge_count > 0

    def test_range_beyond_ceiling_rejected(self, positions):
        with pytest.raises(ValueError):
            constellation_snapshot(SPEC, positions, SITES, 5100.0)

    def test_power_filter(self, positions):
        limit = lb.isl_transmit_power_w(lb.DEFAULT_OPTICS, 3000.0)
        snap = constellation_snapshot(SPEC, positions, SITES, 5016.0, limit)
        assert snap.distance_km[snap.isl_mask].max() <= 3000.0 + 1e-9
        assert np.all(snap.power_w <= limit)

    def test_line_of_sight_blocks_through_earth(self):
        r = 6378.14 + 550.0
        sats = np.array([[r, 0, 0], [-r, 0, 0]])
        # diametrically opposite: distance above every range, but also blocked
        snap = build_snapshot(sats, [], 5016.0)
        assert snap.edge_count == 0

    def test_ground_below_horizon_excluded(self):
        r = 6378.14 + 550.0
        site = GroundSite("eq", 0.0, 0.0)
        sats = np.array([[r, 0, 0], [-r, 0, 0]])
        snap = build_snapshot(sats, [site], 0.0)
        assert snap.edge_count == 2  # one link, both directions
        assert {e.target for e in snap.edges if e.source.kind == "ground"} == {NodeRef.sat(0, 0)}

    def test_empty(self):
        snap = build_snapshot(np.zeros((0, 3)), [], 1000.0)
        st_ = snapshot_stats(snap)
        assert (st_.node_count, st_.edge_count, st_.mean_degree, st_.max_edge_km) == (0, 0, 0.0, 0.0)

    def test_duplicate_site_names(self, positions):
        with pytest.raises(ValueError):
            constellation_snapshot(SPEC, positions, SITES + [SITES[0]], 1000.0)


class TestRestrict:
    @settings(max_examples=15, deadline=None)
    @given(st.floats(0, 5016), st.floats(0, 5016))
    def test_matches_rebuild_and_is_monotone(self, r1, r2):
        lo, hi = sorted((r1, r2))
        pos = propagate_constellation(SPEC, 0.0)
        base = constellation_snapshot(SPEC, pos, SITES, 5016.0)
        small = base.restrict(lo)
        rebuilt = constellation_snapshot(SPEC, pos, SITES, lo)
        assert arc_set(small) == arc_set(rebuilt)
        assert arc_set(small) <= arc_set(base.restrict(hi))

    @pytest.mark.parametrize("p1,p2", [(0.1, 0.5), (0.3, 2.0), (1.0, 10.0)])
    def test_power_monotone(self, wide, p1, p2):
        assert arc_set(wide.restrict(power_limit_w=p1)) <= arc_set(wide.restrict(power_limit_w=p2))

    def test_power_matches_rebuild(self, positions, wide):
        a = wide.restrict(3000.0, 2.0)
        b = constellation_snapshot(SPEC, positions, SITES, 3000.0, 2.0)
        assert arc_set(a) == arc_set(b)

    def test_cannot_widen(self, wide):
        narrow = wide.restrict(2000.0, 1.0)
        with pytest.raises(ValueError):
            narrow.restrict(3000.0)
        with pytest.raises(ValueError):
            narrow.restrict(power_limit_w=2.0)


class TestStats:
    def test_counts(self, wide):
        s = snapshot_stats(wide)
        assert s.node_count == 1584 + 3
        assert s.edge_count == len(wide.src)
        assert s.mean_degree == pytest.approx(s.edge_count / s.node_count)
        assert s.max_edge_km <= 5016.0

    def test_permanent_neighbours_intra_plane(self, positions):
        # in-plane spacing is 5 degrees, about 604.6 km at 550 km: two per side at 1575 km
        counts = permanent_neighbor_counts(constellation_snapshot(SPEC, positions, [], 1575.0), SPEC)
        assert min(counts.values()) >= 4
        assert len(counts) == 1584


class TestCsv:
    def test_round_trip(self, positions):
        snap = constellation_snapshot(SPEC, positions, SITES, 700.0, time_s=0.0)
        buf = io.StringIO()
        write_snapshot_csv(snap, buf)
        text = buf.getvalue()
        assert text.splitlines()[0] == "t,from,to,km,ms,W"
        assert "\r" not in text
        back = read_snapshot_csv(io.StringIO(text))
        assert arc_set(back) == arc_set(snap)
        assert np.allclose(back.distance_km, [float(f"{d:.6f}") for d in snap.distance_km], atol=1e-9)

    def test_bad_header(self):
        with pytest.raises(ValueError):
            read_snapshot_csv(io.StringIO("a,b\n"))

    def test_file_path(self, tmp_path, positions):
        snap = constellation_snapshot(SPEC, positions, SITES[:1], 0.0)
        path = tmp_path / "s.csv"
        write_snapshot_csv(snap, path)
        assert read_snapshot_csv(path).edge_count == snap.edge_count


def test_sat_ids_default_and_mismatch():
    pos = np.array([[6928.14, 0, 0], [6928.14 * math.cos(0.1), 6928.14 * math.sin(0.1), 0]])
    snap = build_snapshot(pos, [], 1000.0)
    assert snap.nodes == (NodeRef.sat(0, 0), NodeRef.sat(0, 1))
    with pytest.raises(ValueError):
        build_snapshot(pos, [], 1000.0, sat_ids=[SatelliteId(0, 0)])
