"""Per-time-slot directed cost graphs over satellites and ground stations.

Each feasible optical link appears as two arcs. Every arc carries its
length, a latency cost (propagation delay, ms) and a power cost (required
transmit power, W). Arcs whose power cost exceeds the snapshot's power limit
are absent, which is how the per-link power constraint is enforced.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from . import linkbudget as lb
from .constants import DEFAULT_GRAZING_ALTITUDE_KM, EARTH_RADIUS_KM, SPEED_OF_LIGHT_KM_MS
from .orbital import (
    ConstellationSpec,
    GroundSite,
    SatelliteId,
    elevation_angles_deg,
    ground_to_ecef,
    max_feasible_lisl_range_km,
)

SATELLITE = "satellite"
GROUND = "ground"


@dataclass(frozen=True, order=True)
class NodeRef:
    """A graph node: a satellite (``ident`` is a SatelliteId) or a ground site (``ident`` is its name)."""

    kind: str
    ident: object

    @classmethod
    def sat(cls, plane: int, slot: int) -> "NodeRef":
        return cls(SATELLITE, SatelliteId(plane, slot))

    @classmethod
    def ground(cls, name: str) -> "NodeRef":
        return cls(GROUND, name)

    @property
    def is_satellite(self) -> bool:
        return self.kind == SATELLITE

    @property
    def label(self) -> str:
        return self.ident.label if self.is_satellite else f"GS:{self.ident}"

    @classmethod
    def from_label(cls, label: str) -> "NodeRef":
        if label.startswith("GS:"):
            return cls.ground(label[3:])
        if label.startswith("SAT-"):
            _, plane, slot = label.split("-")
            return cls.sat(int(plane), int(slot))
        raise ValueError(f"unrecognised node label {label!r}")

    def __str__(self):
        return self.label


@dataclass(frozen=True)
class Edge:
    source: NodeRef
    target: NodeRef
    distance_km: float
    latency_ms: float
    power_w: float


@dataclass(frozen=True, eq=False)
class Snapshot:
    """Immutable routing graph for one time slot.

    Arc arrays are index-aligned and sorted by (src, dst); node indices follow
    the total order of :class:`NodeRef`.
    """

    time_s: float
    nodes: tuple[NodeRef, ...]
    src: np.ndarray
    dst: np.ndarray
    distance_km: np.ndarray
    latency_ms: np.ndarray
    power_w: np.ndarray
    lisl_range_km: float
    power_limit_w: float | None = None
    positions: np.ndarray | None = field(default=None, repr=False)

    @cached_property
    def index(self) -> dict[NodeRef, int]:
        return {n: i for i, n in enumerate(self.nodes)}

    @cached_property
    def is_satellite(self) -> np.ndarray:
        return np.array([n.is_satellite for n in self.nodes], dtype=bool)

    @property
    def edge_count(self) -> int:
        return len(self.src)

    @cached_property
    def isl_mask(self) -> np.ndarray:
        sat = self.is_satellite
        return sat[self.src] & sat[self.dst] if self.edge_count else np.zeros(0, dtype=bool)

    @property
    def edges(self) -> list[Edge]:
        nodes = self.nodes
        return [
            Edge(nodes[s], nodes[d], km, ms, w)
            for s, d, km, ms, w in zip(
                self.src.tolist(), self.dst.tolist(), self.distance_km.tolist(),
                self.latency_ms.tolist(), self.power_w.tolist(),
            )
        ]

    @cached_property
    def adjacency(self) -> tuple[list[int], list[int], list[float]]:
        """CSR view (indptr, neighbour, latency_ms) as plain lists for the path solvers."""
        counts = np.bincount(self.src, minlength=len(self.nodes))
        indptr = np.concatenate([[0], np.cumsum(counts)])
        return indptr.tolist(), self.dst.tolist(), self.latency_ms.tolist()

    @cached_property
    def _arc_lookup(self) -> dict[tuple[int, int], int]:
        return {(s, d): k for k, (s, d) in enumerate(zip(self.src.tolist(), self.dst.tolist()))}

    def arc(self, u: int, v: int) -> int | None:
        """Position of arc u->v in the arc arrays, or None."""
        return self._arc_lookup.get((u, v))

    def restrict(self, lisl_range_km: float | None = None, power_limit_w: float | None = None) -> "Snapshot":
        """Tighter range and/or power limit, without re-running geometry.

        Equivalent to rebuilding the snapshot with the tighter settings.
        """
        rng = self.lisl_range_km if lisl_range_km is None else lisl_range_km
        if rng > self.lisl_range_km:
            raise ValueError(f"cannot widen LISL range {self.lisl_range_km} -> {rng}")
        limit = self.power_limit_w if power_limit_w is None else power_limit_w
        if self.power_limit_w is not None and (limit is None or limit > self.power_limit_w):
            raise ValueError(f"cannot loosen power limit {self.power_limit_w} -> {limit}")
        keep = ~self.isl_mask | (self.distance_km <= rng)
        if limit is not None:
            keep &= self.power_w <= limit
        return Snapshot(
            time_s=self.time_s, nodes=self.nodes, src=self.src[keep], dst=self.dst[keep],
            distance_km=self.distance_km[keep], latency_ms=self.latency_ms[keep],
            power_w=self.power_w[keep], lisl_range_km=rng, power_limit_w=limit,
            positions=self.positions,
        )


def latency_ms(distance_km):
    """Propagation delay of a link, ms."""
    return np.asarray(distance_km, dtype=float) / SPEED_OF_LIGHT_KM_MS


def _line_of_sight(a: np.ndarray, b: np.ndarray, min_radius_km: float) -> np.ndarray:
    """True where the segment a-b stays outside the sphere of ``min_radius_km``."""
    ab = b - a
    t = -np.einsum("ij,ij->i", a, ab) / np.maximum(np.einsum("ij,ij->i", ab, ab), 1e-300)
    t = np.clip(t, 0.0, 1.0)
    closest = a + t[:, None] * ab
    return np.linalg.norm(closest, axis=1) >= min_radius_km - 1e-9


def build_snapshot(
    positions: np.ndarray,
    sites: Sequence[GroundSite],
    lisl_range_km: float,
    power_limit_w: float | None = None,
    *,
    sat_ids: Sequence[SatelliteId] | None = None,
    time_s: float = 0.0,
    optics: lb.OpticalParams = lb.DEFAULT_OPTICS,
    atmosphere: lb.AtmosphereParams = lb.DEFAULT_ATMOSPHERE,
    grazing_altitude_km: float = DEFAULT_GRAZING_ALTITUDE_KM,
) -> Snapshot:
    """Feasible-link graph for one slot.

    ``positions`` are Earth-fixed satellite positions (rows aligned with
    ``sat_ids``, defaulting to ``SatelliteId(0, k)``). Satellite pairs are linked
    when within ``lisl_range_km`` and in line of sight above the grazing
    altitude; ground sites link to satellites within their slant range and above
    the horizon. The atmosphere's site altitude is taken from each site.
    """
    positions = np.asarray(positions, dtype=float).reshape(-1, 3)
    n_sat = len(positions)
    if sat_ids is None:
        sat_ids = [SatelliteId(0, k) for k in range(n_sat)]
    if len(sat_ids) != n_sat:
        raise ValueError("sat_ids and positions differ in length")
    if lisl_range_km < 0:
        raise ValueError("LISL range must be >= 0")
    if n_sat:
        altitude = float(np.linalg.norm(positions, axis=1).min()) - EARTH_RADIUS_KM
        ceiling = max_feasible_lisl_range_km(altitude, grazing_altitude_km)
        if lisl_range_km > ceiling + 1e-9:
            raise ValueError(
                f"LISL range {lisl_range_km} km exceeds the maximum feasible {ceiling:.1f} km"
            )
    if power_limit_w is not None and not power_limit_w > 0:
        raise ValueError("power limit must be positive")
    names = [s.name for s in sites]
    if len(set(names)) != len(names):
        raise ValueError("duplicate ground site names")

    refs = [NodeRef(SATELLITE, sid) for sid in sat_ids] + [NodeRef.ground(s.name) for s in sites]
    node_order = np.array(sorted(range(len(refs)), key=refs.__getitem__), dtype=np.int64)
    rank = np.empty(len(refs), dtype=np.int64)
    rank[node_order] = np.arange(len(refs))
    nodes = tuple(refs[k] for k in node_order)
    if len(set(nodes)) != len(nodes):
        raise ValueError("duplicate node identifiers")

    us, vs, dists, powers = [], [], [], []

    if n_sat > 1 and lisl_range_km > 0:
        pairs = cKDTree(positions).query_pairs(lisl_range_km, output_type="ndarray")
        if len(pairs):
            a, b = positions[pairs[:, 0]], positions[pairs[:, 1]]
            keep = _line_of_sight(a, b, EARTH_RADIUS_KM + grazing_altitude_km)
            pairs = pairs[keep]
            d = np.linalg.norm(a[keep] - b[keep], axis=1)
            keep = d <= lisl_range_km
            pairs, d = pairs[keep], d[keep]
            p = lb.isl_transmit_power_w(optics, d) if len(d) else np.zeros(0)
            us.append(pairs[:, 0]); vs.append(pairs[:, 1]); dists.append(d); powers.append(np.asarray(p))

    for k, site in enumerate(sites):
        g = n_sat + k
        site_pos = ground_to_ecef(site)
        if not n_sat:
            continue
        d = np.linalg.norm(positions - site_pos, axis=1)
        el = elevation_angles_deg(site_pos, positions)
        hit = np.flatnonzero((d <= site.max_slant_range_km) & (el > 0) & (d > 0))
        if not len(hit):
            continue
        atm = atmosphere
        if site.altitude_km != atm.site_altitude_km:
            atm = lb.AtmosphereParams(
                atmosphere.cloud_number_concentration, atmosphere.liquid_water_content,
                atmosphere.particle_size_coeff, atmosphere.tropopause_height_km, site.altitude_km,
            )
        p = lb.updown_transmit_power_w(optics, atm, d[hit], el[hit])
        us.append(np.full(len(hit), g)); vs.append(hit); dists.append(d[hit]); powers.append(np.asarray(p))

    if us:
        u = np.concatenate(us).astype(np.int64)
        v = np.concatenate(vs).astype(np.int64)
        dist = np.concatenate(dists)
        pw = np.concatenate(powers)
    else:
        u = v = np.zeros(0, dtype=np.int64)
        dist = pw = np.zeros(0)
    if power_limit_w is not None:
        keep = pw <= power_limit_w
        u, v, dist, pw = u[keep], v[keep], dist[keep], pw[keep]

    # both directions, re-indexed into sorted node order
    src = np.concatenate([rank[u], rank[v]])
    dst = np.concatenate([rank[v], rank[u]])
    dist = np.concatenate([dist, dist])
    pw = np.concatenate([pw, pw])
    order = np.lexsort((dst, src))
    src, dst, dist, pw = src[order], dst[order], dist[order], pw[order]

    all_pos = np.vstack([positions, np.array([ground_to_ecef(s) for s in sites]).reshape(-1, 3)])
    return Snapshot(
        time_s=float(time_s), nodes=nodes, src=src, dst=dst, distance_km=dist,
        latency_ms=latency_ms(dist), power_w=pw, lisl_range_km=float(lisl_range_km),
        power_limit_w=power_limit_w, positions=all_pos[node_order],
    )


def constellation_snapshot(spec: ConstellationSpec, positions: np.ndarray, sites, lisl_range_km, power_limit_w=None, **kw):
    return build_snapshot(positions, sites, lisl_range_km, power_limit_w, sat_ids=spec.satellite_ids(), **kw)


@dataclass(frozen=True)
class SnapshotStats:
    node_count: int
    edge_count: int
    mean_degree: float
    max_edge_km: float


def snapshot_stats(snapshot: Snapshot) -> SnapshotStats:
    """Counts over directed arcs; ``max_edge_km`` covers satellite-satellite arcs only."""
    n = len(snapshot.nodes)
    m = snapshot.edge_count
    isl = snapshot.distance_km[snapshot.isl_mask]
    return SnapshotStats(
        node_count=n,
        edge_count=m,
        mean_degree=m / n if n else 0.0,
        max_edge_km=float(isl.max()) if len(isl) else 0.0,
    )


def permanent_neighbor_counts(snapshot: Snapshot, spec: ConstellationSpec) -> dict[SatelliteId, int]:
    """Linked neighbours per satellite lying in its own or an adjacent orbital plane."""
    counts = {sid: 0 for sid in spec.satellite_ids()}
    nodes = snapshot.nodes
    sel = np.flatnonzero(snapshot.isl_mask)
    for s, d in zip(snapshot.src[sel].tolist(), snapshot.dst[sel].tolist()):
        a, b = nodes[s].ident, nodes[d].ident
        gap = (a.plane - b.plane) % spec.plane_count
        if gap in (0, 1, spec.plane_count - 1):
            counts[a] += 1
    return counts


SNAPSHOT_CSV_HEADER = ["t", "from", "to", "km", "ms", "W"]


def write_snapshot_csv(snapshot: Snapshot, dest: Path | str | io.TextIOBase) -> None:
    """One arc per row: t, from, to, km, ms, W."""
    own = not hasattr(dest, "write")
    fh = open(dest, "w", newline="", encoding="utf-8") if own else dest
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SNAPSHOT_CSV_HEADER)
        for e in snapshot.edges:
            w.writerow([
                f"{snapshot.time_s:.6f}", e.source.label, e.target.label,
                f"{e.distance_km:.6f}", f"{e.latency_ms:.6f}", repr(e.power_w),
            ])
    finally:
        if own:
            fh.close()


def read_snapshot_csv(source: Path | str | Iterable[str], lisl_range_km: float = math.inf,
                      power_limit_w: float | None = None) -> Snapshot:
    """Rebuild a position-free snapshot from :func:`write_snapshot_csv` output.

    Latencies are recomputed from the stored distances.
    """
    own = isinstance(source, (str, Path))
    fh = open(source, newline="", encoding="utf-8") if own else source
    try:
        rows = list(csv.reader(fh))
    finally:
        if own:
            fh.close()
    if not rows or rows[0] != SNAPSHOT_CSV_HEADER:
        raise ValueError(f"snapshot CSV header must be {SNAPSHOT_CSV_HEADER}")
    body = rows[1:]
    refs = sorted({NodeRef.from_label(r[1]) for r in body} | {NodeRef.from_label(r[2]) for r in body})
    index = {n: i for i, n in enumerate(refs)}
    t = float(body[0][0]) if body else 0.0
    src = np.array([index[NodeRef.from_label(r[1])] for r in body], dtype=np.int64)
    dst = np.array([index[NodeRef.from_label(r[2])] for r in body], dtype=np.int64)
    km = np.array([float(r[3]) for r in body])
    pw = np.array([float(r[5]) for r in body])
    order = np.lexsort((dst, src))
    return Snapshot(
        time_s=t, nodes=tuple(refs), src=src[order], dst=dst[order], distance_km=km[order],
        latency_ms=latency_ms(km[order]), power_w=pw[order], lisl_range_km=lisl_range_km,
        power_limit_w=power_limit_w,
    )
