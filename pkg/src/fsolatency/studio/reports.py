"""CSV and manifest emission for sweep results.

All millisecond columns carry six decimals. Where a total appears beside its
propagation and node-delay parts, the total is the decimal sum of the two
printed parts, so the written rows add up exactly.
"""

from __future__ import annotations

import csv
import json
from decimal import Decimal
from pathlib import Path

from .. import __version__
from .. import linkbudget as lb
from .sweep import SweepResult, limit_sort_key

# Reference ranges at which each ISL power limit is expected to level off.
REFERENCE_LEVELING_KM = {0.1: 1731.0, 0.3: 3000.0, 0.5: 4500.0}
LEVELING_TOLERANCE = 0.15

_Q = Decimal("0.000001")

PATHS_HEADER = ["power_limit_w", "lisl_range_km", "slot", "time_s", "connection", "status",
                "latency_ms", "propagation_ms", "node_delay_ms", "hops", "path"]
TOTALS_HEADER = ["power_limit_w", "lisl_range_km", "slot", "time_s", "total_latency_ms",
                 "propagation_ms", "node_delay_ms", "hops", "routed", "status", "solver"]
CONNECTION_SERIES_HEADER = ["power_limit_w", "connection", "lisl_range_km", "avg_latency_ms",
                            "avg_propagation_ms", "avg_node_delay_ms", "avg_hops", "feasible_slots", "slots"]
TOTAL_SERIES_HEADER = ["power_limit_w", "lisl_range_km", "avg_total_latency_ms", "feasible_slots", "slots"]
DECOMPOSITION_HEADER = ["power_limit_w", "lisl_range_km", "total_ms", "propagation_ms", "node_delay_ms"]

FILES = ("paths.csv", "totals.csv", "connection_series.csv", "total_series.csv", "decomposition.csv")


def fmt_ms(value: float | None) -> str:
    return "" if value is None else str(Decimal(repr(float(value))).quantize(_Q))


def fmt_limit(limit: float | None) -> str:
    return "none" if limit is None else f"{limit:g}"


def fmt_num(value: float) -> str:
    return f"{value:g}"


def split_ms(propagation: float | None, node_delay: float | None) -> tuple[str, str, str]:
    """(total, propagation, node delay) strings with total = sum of the printed parts."""
    if propagation is None or node_delay is None:
        return "", "", ""
    p, d = fmt_ms(propagation), fmt_ms(node_delay)
    return str(Decimal(p) + Decimal(d)), p, d


def _hops(v) -> str:
    if v is None:
        return ""
    return str(v) if isinstance(v, int) else f"{v:.6f}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from None


def _series_keys(result: SweepResult):
    for limit in result.limits:
        for rng in result.ranges:
            yield limit, rng


def path_rows(result: SweepResult):
    for p in result.paths:
        total, prop, nd = split_ms(p.propagation_ms, p.node_delay_ms)
        yield [fmt_limit(p.power_limit_w), fmt_num(p.lisl_range_km), p.slot, fmt_num(p.time_s), p.label,
               "routed" if p.routed else "infeasible", total, prop, nd, _hops(p.hops), p.path or ""]


def total_rows(result: SweepResult):
    for s in result.slots:
        if s.feasible:
            total, prop, nd = split_ms(s.propagation_ms, s.node_delay_ms)
        else:
            total, prop, nd = "inf", "", ""
        yield [fmt_limit(s.power_limit_w), fmt_num(s.lisl_range_km), s.slot, fmt_num(s.time_s), total, prop, nd,
               s.hops, s.routed, s.status, s.solver]


def connection_series_rows(result: SweepResult):
    labels = result.connections
    for limit in result.limits:
        for k, label in enumerate(labels):
            for rng in result.ranges:
                a = result.connection_average(rng, limit, k)
                total, prop, nd = split_ms(a.propagation_ms, a.node_delay_ms)
                yield [fmt_limit(limit), label, fmt_num(rng), total, prop, nd, _hops(a.hops), a.feasible_slots, a.slots]


def total_series_rows(result: SweepResult):
    for limit, rng in _series_keys(result):
        a = result.total_average(rng, limit)
        total, _, _ = split_ms(a.propagation_ms, a.node_delay_ms)
        yield [fmt_limit(limit), fmt_num(rng), total, a.feasible_slots, a.slots]


def decomposition_rows(result: SweepResult):
    for limit, rng in _series_keys(result):
        a = result.total_average(rng, limit)
        yield [fmt_limit(limit), fmt_num(rng), *split_ms(a.propagation_ms, a.node_delay_ms)]


def leveling_report(result: SweepResult) -> list[dict]:
    """Per power limit: model threshold, reference threshold, and whether cells level off."""
    sc = result.scenario
    optics = sc.optics if sc is not None else lb.DEFAULT_OPTICS
    out = []
    for limit in result.limits:
        if limit is None:
            continue
        threshold = lb.max_link_distance_km(limit, "isl", optics)
        ref = REFERENCE_LEVELING_KM.get(limit)
        beyond = [r for r in result.ranges if r >= threshold]
        out.append({
            "power_limit_w": limit,
            "model_threshold_km": round(threshold, 3),
            "reference_threshold_km": ref,
            "diverges": None if ref is None else abs(threshold - ref) > LEVELING_TOLERANCE * ref,
            "ranges_at_or_beyond": beyond,
            "cells_identical_beyond": cells_identical(result, limit, beyond),
        })
    return out


def cells_identical(result: SweepResult, limit: float | None, ranges: list[float]) -> bool:
    """True when every output row is the same across ``ranges`` for this limit."""
    if len(ranges) < 2:
        return True

    def signature(rng):
        paths = [(p.slot, p.connection, p.latency_ms, p.propagation_ms, p.hops, p.path)
                 for p in result.paths if p.power_limit_w == limit and p.lisl_range_km == rng]
        slots = [(s.slot, s.total_latency_ms, s.status) for s in result.slots
                 if s.power_limit_w == limit and s.lisl_range_km == rng]
        return paths, slots

    first = signature(ranges[0])
    return all(signature(r) == first for r in ranges[1:])


def build_manifest(result: SweepResult) -> dict:
    sc = result.scenario
    return {
        "package_version": __version__,
        "scenario_name": sc.name if sc else None,
        "scenario_hash": sc.content_hash() if sc else None,
        "solver_policy": sc.solver if sc else None,
        "slot_count": sc.slot_count if sc else 0,
        "lisl_ranges_km": result.ranges,
        "power_limits_w": result.limits,
        "connections": result.connections,
        "cells": len(result.slots),
        "status_counts": result.status_counts(),
        "solver_counts": result.solver_counts(),
        "infeasible_cells": [
            {"lisl_range_km": r, "power_limit_w": p, "slot": s} for r, p, s in result.infeasible_cells
        ],
        "leveling": leveling_report(result),
        "files": list(FILES),
    }


def emit_reports(result: SweepResult, output_dir: str | Path) -> list[Path]:
    """Write the CSV family and ``manifest.json``; returns the written paths."""
    out = Path(output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot create output directory {out}: {exc.strerror}") from None
    written = []
    for name, header, rows in (
        ("paths.csv", PATHS_HEADER, path_rows(result)),
        ("totals.csv", TOTALS_HEADER, total_rows(result)),
        ("connection_series.csv", CONNECTION_SERIES_HEADER, connection_series_rows(result)),
        ("total_series.csv", TOTAL_SERIES_HEADER, total_series_rows(result)),
        ("decomposition.csv", DECOMPOSITION_HEADER, decomposition_rows(result)),
    ):
        _write_csv(out / name, header, rows)
        written.append(out / name)
    manifest = out / "manifest.json"
    try:
        manifest.write_text(json.dumps(build_manifest(result), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {manifest}: {exc.strerror}") from None
    written.append(manifest)
    return written


__all__ = [
    "emit_reports", "build_manifest", "leveling_report", "cells_identical", "split_ms", "fmt_ms",
    "REFERENCE_LEVELING_KM", "FILES", "limit_sort_key",
]
