"""Shared builders for small routing instances."""

from __future__ import annotations

import math
import random

import numpy as np

from fsolatency.constants import EARTH_RADIUS_KM
from fsolatency.netgraph import NodeRef, Snapshot, build_snapshot, latency_ms
from fsolatency.orbital import GroundSite, SatelliteId
from fsolatency.routing import Commodity, RoutingProblem

SHELL_KM = EARTH_RADIUS_KM + 550.0


def unit(lat_deg: float, lon_deg: float) -> np.ndarray:
    lat, lon = math.radians(lat_deg), math.radians(lon_deg)
    return np.array([math.cos(lat) * math.cos(lon), math.cos(lat) * math.sin(lon), math.sin(lat)])


def reduced_instance(rng: random.Random, *, n_sat=None, n_commodities=None, lisl_range_km=None,
                     power_limit_w="random", degree_cap=4):
    """Up to 12 satellites scattered over a patch of the 550 km shell, ground sites below them.

    Returns (problem, params) where params records the random draws.
    """
    n_sat = n_sat if n_sat is not None else rng.randint(4, 12)
    k = n_commodities if n_commodities is not None else rng.randint(2, 3)
    lat_span, lon_span = 12.0, 24.0
    where = [(rng.uniform(-lat_span, lat_span), rng.uniform(-lon_span, lon_span)) for _ in range(n_sat)]
    sats = np.array([SHELL_KM * unit(lat, lon) for lat, lon in where])
    # each site sits within a few degrees of some satellite so it has coverage
    # mostly distinct endpoints; sometimes sites shared between commodities
    n_sites = 2 * k if rng.random() < 0.7 else k + 1
    sites = []
    for j in range(n_sites):
        lat, lon = rng.choice(where)
        sites.append(GroundSite(f"G{j}", lat + rng.uniform(-4, 4), lon + rng.uniform(-4, 4)))
    rng_km = lisl_range_km if lisl_range_km is not None else rng.uniform(1575.0, 5016.0)
    if power_limit_w == "random":
        power_limit_w = rng.choice([None, None, None, 1.5, 3.0, 6.0])
    snap = build_snapshot(sats, sites, rng_km, power_limit_w,
                          sat_ids=[SatelliteId(0, i) for i in range(n_sat)])
    if n_sites == 2 * k:
        pairs = [(2 * i, 2 * i + 1) for i in range(k)]
    else:
        pairs = [(a, b) for a in range(n_sites) for b in range(a + 1, n_sites)]
        rng.shuffle(pairs)
    commodities = [
        Commodity(f"c{i}", NodeRef.ground(f"G{a}"), NodeRef.ground(f"G{b}"))
        for i, (a, b) in enumerate(pairs[:k])
    ]
    problem = RoutingProblem(snap, commodities, node_degree_cap=degree_cap)
    return problem, {"n_sat": n_sat, "range": rng_km, "limit": power_limit_w, "sites": sites, "sats": sats}


def graph_snapshot(n_sat: int, grounds: list[str], links: dict[tuple, float]) -> Snapshot:
    """Hand-built snapshot; ``links`` maps (label_a, label_b) -> km, labels like 'S3' or 'GA'."""
    def ref(label):
        return NodeRef.sat(0, int(label[1:])) if label.startswith("S") else NodeRef.ground(label[1:])

    nodes = tuple(sorted([NodeRef.sat(0, i) for i in range(n_sat)] + [NodeRef.ground(g) for g in grounds]))
    index = {n: i for i, n in enumerate(nodes)}
    src, dst, km = [], [], []
    for (a, b), d in links.items():
        u, v = index[ref(a)], index[ref(b)]
        src += [u, v]
        dst += [v, u]
        km += [d, d]
    src, dst, km = np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64), np.array(km, dtype=float)
    order = np.lexsort((dst, src))
    return Snapshot(
        time_s=0.0, nodes=nodes, src=src[order], dst=dst[order], distance_km=km[order],
        latency_ms=latency_ms(km[order]), power_w=np.full(len(km), 0.01), lisl_range_km=math.inf,
        power_limit_w=None,
    )


def ground_commodity(cid: str, a: str, b: str) -> Commodity:
    return Commodity(cid, NodeRef.ground(a), NodeRef.ground(b))
