"""Command-line entry point: ``fsolatency run|snapshot|linkbudget|validate``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from . import __version__
from . import linkbudget as lb
from .netgraph import snapshot_stats, write_snapshot_csv
from .studio.reports import emit_reports
from .studio.scenario import Scenario, ScenarioError, load_scenario
from .studio.sweep import base_snapshot, cell_snapshot, run_sweep

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_INFEASIBLE = 3

log = logging.getLogger("fsolatency")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output-dir", type=Path, help="where reports are written (overrides the scenario)")
    common.add_argument("--seed", type=int, default=0, help="reserved; has no numeric effect")
    common.add_argument("--threads", type=int, default=1, help="worker processes for the sweep")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="fsolatency", description=__doc__, parents=[common])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common], help="run a sweep and write reports")
    run.add_argument("scenario", help="scenario YAML file, or 'default'")
    run.add_argument("--slot-count", type=int, help="override the scenario's slot count")

    snap = sub.add_parser("snapshot", parents=[common], help="export one slot's link graph as CSV")
    snap.add_argument("scenario")
    snap.add_argument("--slot", type=int, required=True)
    snap.add_argument("--range-km", type=float, help="LISL range (default: widest in the scenario)")
    snap.add_argument("--power-limit-w", type=float, help="transmit power limit (default: none)")

    link = sub.add_parser("linkbudget", parents=[common], help="required transmit power for one link")
    link.add_argument("kind", choices=["isl", "updown"])
    link.add_argument("--distance-km", type=float, required=True)
    link.add_argument("--elevation-deg", type=float, help="elevation angle (updown only)")

    val = sub.add_parser("validate", parents=[common], help="check a scenario file")
    val.add_argument("scenario")
    return p


def _output_dir(args, scenario: Scenario) -> Path:
    if args.output_dir is not None:
        return args.output_dir
    if scenario.output_dir is not None:
        return Path(scenario.output_dir)
    return Path("fsolatency-out")


def cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.slot_count is not None:
        if args.slot_count < 1:
            raise ScenarioError("--slot-count must be >= 1")
        scenario = dataclasses.replace(scenario, slot_count=args.slot_count)
    out = _output_dir(args, scenario)
    result = run_sweep(scenario, threads=args.threads)
    emit_reports(result, out)
    counts = result.status_counts()
    print(f"{len(result.slots)} cells: " + ", ".join(f"{k}={v}" for k, v in counts.items()))
    print(f"reports written to {out}")
    return EXIT_INFEASIBLE if result.infeasible_cells else EXIT_OK


def cmd_snapshot(args) -> int:
    scenario = load_scenario(args.scenario)
    if not 0 <= args.slot < scenario.slot_count:
        raise ScenarioError(f"--slot must be in [0, {scenario.slot_count})")
    widest = max(scenario.lisl_ranges_km)
    rng = widest if args.range_km is None else args.range_km
    if not 0 <= rng <= widest:
        raise ScenarioError(f"--range-km must be in [0, {widest:g}] for this scenario")
    if args.power_limit_w is not None and not args.power_limit_w > 0:
        raise ScenarioError("--power-limit-w must be positive")
    snap = cell_snapshot(base_snapshot(scenario, args.slot), rng, args.power_limit_w)
    out = _output_dir(args, scenario)
    out.mkdir(parents=True, exist_ok=True)
    dest = out / f"snapshot_slot{args.slot}.csv"
    write_snapshot_csv(snap, dest)
    st = snapshot_stats(snap)
    print(f"{st.node_count} nodes, {st.edge_count} arcs, mean degree {st.mean_degree:.3f}, "
          f"longest ISL {st.max_edge_km:.3f} km")
    print(f"written to {dest}")
    return EXIT_OK


def cmd_linkbudget(args) -> int:
    if not args.distance_km > 0:
        raise ScenarioError("--distance-km must be positive")
    if args.kind == "updown":
        if args.elevation_deg is None:
            raise ScenarioError("updown links need --elevation-deg")
        if not 0 < args.elevation_deg <= 90:
            raise ScenarioError("--elevation-deg must be in (0, 90]")
    watts = lb.transmit_power_w(args.kind, args.distance_km, elevation_deg=args.elevation_deg)
    print(f"{float(watts):.6g} W ({lb.watts_to_dbm(float(watts)):.3f} dBm)")
    return EXIT_OK


def cmd_validate(args) -> int:
    sc = load_scenario(args.scenario)
    print(f"ok: {sc.name}: {len(sc.sites)} sites, {len(sc.connections)} connections, "
          f"{len(sc.lisl_ranges_km)} ranges x {len(sc.power_limits_w)} limits x {sc.slot_count} slots "
          f"(hash {sc.content_hash()[:12]})")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "snapshot": cmd_snapshot, "linkbudget": cmd_linkbudget, "validate": cmd_validate}


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return COMMANDS[args.command](args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - top-level reporting
        log.debug("runtime failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
