"""Scenario files: a versioned YAML document describing one sweep.

Every key is optional; omitted keys take the packaged default scenario's
value. Unknown keys are rejected. See ``data/default_scenario.yaml`` and the
README for the full schema.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Literal

import yaml

from .. import linkbudget as lb
from ..constants import DEFAULT_GRAZING_ALTITUDE_KM
from ..orbital import ConstellationSpec, GroundSite, max_feasible_lisl_range_km

SCHEMA_VERSION = 1
SolverPolicy = Literal["exact", "greedy", "auto"]


class ScenarioError(ValueError):
    """Scenario file could not be parsed or violates the schema."""


@dataclass(frozen=True)
class Scenario:
    constellation: ConstellationSpec
    sites: tuple[GroundSite, ...]
    connections: tuple[tuple[str, str], ...]
    lisl_ranges_km: tuple[float, ...]
    power_limits_w: tuple[float | None, ...]
    slot_count: int = 100
    slot_interval_s: float = 1.0
    solver: SolverPolicy = "auto"
    name: str = "scenario"
    node_delay_ms: float = 10.0
    node_degree_cap: int = 4
    grazing_altitude_km: float = DEFAULT_GRAZING_ALTITUDE_KM
    exact_max_commodities: int = 5
    exact_max_satellites: int = 200
    exact_node_limit: int = 1_000_000
    exact_time_limit_s: float | None = None
    optics: lb.OpticalParams = field(default_factory=lb.OpticalParams)
    atmosphere: lb.AtmosphereParams = field(default_factory=lb.AtmosphereParams)
    output_dir: str | None = None

    @property
    def site_map(self) -> dict[str, GroundSite]:
        return {s.name: s for s in self.sites}

    @property
    def connection_labels(self) -> list[str]:
        return [f"{a} - {b}" for a, b in self.connections]

    def to_dict(self) -> dict:
        """Plain-data form; feeding it back through :func:`parse_scenario` round-trips."""
        d = {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "constellation": dataclasses.asdict(self.constellation),
            "sites": [dataclasses.asdict(s) for s in self.sites],
            "connections": [list(c) for c in self.connections],
            "lisl_ranges_km": list(self.lisl_ranges_km),
            "power_limits_w": list(self.power_limits_w),
            "slot_count": self.slot_count,
            "slot_interval_s": self.slot_interval_s,
            "solver": self.solver,
            "node_delay_ms": self.node_delay_ms,
            "node_degree_cap": self.node_degree_cap,
            "grazing_altitude_km": self.grazing_altitude_km,
            "exact_max_commodities": self.exact_max_commodities,
            "exact_max_satellites": self.exact_max_satellites,
            "exact_node_limit": self.exact_node_limit,
            "exact_time_limit_s": self.exact_time_limit_s,
            "optics": dataclasses.asdict(self.optics),
            "atmosphere": dataclasses.asdict(self.atmosphere),
        }
        if self.output_dir is not None:
            d["output_dir"] = self.output_dir
        return d

    def content_hash(self) -> str:
        """SHA-256 over everything that affects results (the output directory does not)."""
        d = self.to_dict()
        d.pop("output_dir", None)
        blob = json.dumps(d, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()


# ---- parsing -------------------------------------------------------------

_TOP_KEYS = {
    "schema_version", "name", "constellation", "sites", "connections", "lisl_ranges_km",
    "power_limits_w", "slot_count", "slot_interval_s", "solver", "node_delay_ms",
    "node_degree_cap", "grazing_altitude_km", "exact_max_commodities", "exact_max_satellites",
    "exact_node_limit", "exact_time_limit_s", "optics", "atmosphere", "output_dir",
}


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _is_num(v) -> bool:
    return (isinstance(v, (int, float)) and not isinstance(v, bool)) and math.isfinite(v)


def _check_keys(where: str, data: Any, allowed) -> dict:
    if not isinstance(data, dict):
        raise ScenarioError(f"{where}: expected a mapping, got {type(data).__name__}")
    unknown = sorted(set(map(str, data)) - set(allowed))
    if unknown:
        raise ScenarioError(f"{where}: unknown key(s) {', '.join(unknown)}")
    return data


def _build_dataclass(cls, where: str, data: Any, base=None):
    """Instantiate a frozen dataclass from a mapping, type-checking each field."""
    names = {f.name: f for f in dataclasses.fields(cls)}
    _check_keys(where, data, names)
    kwargs = dataclasses.asdict(base) if base is not None else {}
    for key, value in data.items():
        default = kwargs.get(key, names[key].default)
        if isinstance(default, bool):
            ok = isinstance(value, bool)
        elif isinstance(default, int) and not isinstance(default, bool):
            ok = _is_int(value)
        elif isinstance(default, float):
            ok = _is_num(value)
        elif isinstance(default, str) or names[key].type in ("str",):
            ok = isinstance(value, str)
        else:
            ok = _is_num(value) or isinstance(value, str)
        if not ok:
            raise ScenarioError(f"{where}.{key}: invalid value {value!r}")
        kwargs[key] = float(value) if isinstance(default, float) else value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{where}: {exc}") from None


def _site(where: str, data: Any) -> GroundSite:
    data = _check_keys(where, data, {f.name for f in dataclasses.fields(GroundSite)})
    for req in ("name", "latitude_deg", "longitude_deg"):
        if req not in data:
            raise ScenarioError(f"{where}: missing required key {req}")
    if not isinstance(data["name"], str):
        raise ScenarioError(f"{where}.name: expected a string")
    return _build_dataclass(GroundSite, where, {k: v for k, v in data.items()},
                            base=GroundSite(data["name"], 0.0, 0.0))


def default_scenario_text() -> str:
    return resources.files("fsolatency").joinpath("data/default_scenario.yaml").read_text(encoding="utf-8")


def _load_yaml(text: str, origin: str) -> Any:
    try:
        return yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise ScenarioError(f"{origin}: parse error at {where}: {exc.problem}") from None
    except yaml.YAMLError as exc:
        raise ScenarioError(f"{origin}: parse error: {exc}") from None


_DEFAULTS: dict | None = None


def _defaults() -> dict:
    global _DEFAULTS
    if _DEFAULTS is None:
        _DEFAULTS = _load_yaml(default_scenario_text(), "default scenario")
    return _DEFAULTS


def parse_scenario(data: Any, origin: str = "scenario") -> Scenario:
    """Validate a decoded document and apply defaults."""
    if data is None:
        data = {}
    data = _check_keys(origin, data, _TOP_KEYS)
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ScenarioError(f"{origin}.schema_version: unsupported version {version!r} (expected {SCHEMA_VERSION})")
    builtin = {
        f.name: f.default for f in dataclasses.fields(Scenario)
        if f.default is not dataclasses.MISSING and f.name in _TOP_KEYS
    }
    merged = {**builtin, **_defaults(), **data}

    def num(key, *, positive=False, integer=False, optional=False):
        v = merged[key]
        if optional and v is None:
            return None
        if integer and not _is_int(v):
            raise ScenarioError(f"{origin}.{key}: expected an integer, got {v!r}")
        if not _is_num(v):
            raise ScenarioError(f"{origin}.{key}: expected a number, got {v!r}")
        if positive and v <= 0:
            raise ScenarioError(f"{origin}.{key}: must be positive, got {v!r}")
        return v if integer else float(v)

    constellation = _build_dataclass(ConstellationSpec, f"{origin}.constellation", merged["constellation"])

    raw_sites = merged["sites"]
    if not isinstance(raw_sites, list) or not raw_sites:
        raise ScenarioError(f"{origin}.sites: expected a non-empty list")
    sites = tuple(_site(f"{origin}.sites[{i}]", s) for i, s in enumerate(raw_sites))
    names = [s.name for s in sites]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise ScenarioError(f"{origin}.sites: duplicate site name(s) {', '.join(dupes)}")

    raw_conn = merged["connections"]
    if not isinstance(raw_conn, list):
        raise ScenarioError(f"{origin}.connections: expected a list of [source, destination] pairs")
    connections = []
    for i, c in enumerate(raw_conn):
        where = f"{origin}.connections[{i}]"
        if not (isinstance(c, list) and len(c) == 2 and all(isinstance(x, str) for x in c)):
            raise ScenarioError(f"{where}: expected [source, destination], got {c!r}")
        for end in c:
            if end not in names:
                raise ScenarioError(f"{where}: site {end!r} is not declared in sites")
        if c[0] == c[1]:
            raise ScenarioError(f"{where}: source and destination are the same site")
        connections.append((c[0], c[1]))
    if len(set(connections)) != len(connections):
        raise ScenarioError(f"{origin}.connections: duplicate connection")

    grazing = num("grazing_altitude_km")
    try:
        ceiling = max_feasible_lisl_range_km(constellation.altitude_km, grazing)
    except ValueError as exc:
        raise ScenarioError(f"{origin}.grazing_altitude_km: {exc}") from None
    ranges = merged["lisl_ranges_km"]
    if not isinstance(ranges, list) or not ranges:
        raise ScenarioError(f"{origin}.lisl_ranges_km: expected a non-empty list")
    for i, r in enumerate(ranges):
        if not _is_num(r) or not 0 < r <= ceiling:
            raise ScenarioError(
                f"{origin}.lisl_ranges_km[{i}]: {r!r} outside (0, {ceiling:.1f}] km (maximum feasible range)"
            )
    if len(set(ranges)) != len(ranges):
        raise ScenarioError(f"{origin}.lisl_ranges_km: duplicate range")

    limits = merged["power_limits_w"]
    if not isinstance(limits, list) or not limits:
        raise ScenarioError(f"{origin}.power_limits_w: expected a non-empty list (null = no limit)")
    for i, p in enumerate(limits):
        if p is not None and (not _is_num(p) or p <= 0):
            raise ScenarioError(f"{origin}.power_limits_w[{i}]: expected null or a positive number, got {p!r}")
    if len(set(limits)) != len(limits):
        raise ScenarioError(f"{origin}.power_limits_w: duplicate limit")

    slot_count = num("slot_count", integer=True)
    if slot_count < 1:
        raise ScenarioError(f"{origin}.slot_count: must be >= 1, got {slot_count}")
    solver = merged["solver"]
    if solver not in ("exact", "greedy", "auto"):
        raise ScenarioError(f"{origin}.solver: expected exact, greedy or auto, got {solver!r}")
    cap = num("node_degree_cap", integer=True)
    if cap < 2:
        raise ScenarioError(f"{origin}.node_degree_cap: must be >= 2")
    delay = num("node_delay_ms")
    if delay < 0:
        raise ScenarioError(f"{origin}.node_delay_ms: must be >= 0")
    name = merged["name"]
    if not isinstance(name, str):
        raise ScenarioError(f"{origin}.name: expected a string")
    out_dir = merged.get("output_dir")
    if out_dir is not None and not isinstance(out_dir, str):
        raise ScenarioError(f"{origin}.output_dir: expected a string")

    return Scenario(
        constellation=constellation,
        sites=sites,
        connections=tuple(connections),
        lisl_ranges_km=tuple(float(r) for r in ranges),
        power_limits_w=tuple(None if p is None else float(p) for p in limits),
        slot_count=slot_count,
        slot_interval_s=num("slot_interval_s", positive=True),
        solver=solver,
        name=name,
        node_delay_ms=delay,
        node_degree_cap=cap,
        grazing_altitude_km=grazing,
        exact_max_commodities=num("exact_max_commodities", integer=True),
        exact_max_satellites=num("exact_max_satellites", integer=True),
        exact_node_limit=num("exact_node_limit", integer=True, positive=True),
        exact_time_limit_s=num("exact_time_limit_s", positive=True, optional=True),
        optics=_build_dataclass(lb.OpticalParams, f"{origin}.optics", merged.get("optics") or {}),
        atmosphere=_build_dataclass(lb.AtmosphereParams, f"{origin}.atmosphere", merged.get("atmosphere") or {}),
        output_dir=out_dir,
    )


def load_scenario(path: str | Path) -> Scenario:
    """Read and validate a scenario file; ``"default"`` loads the packaged scenario."""
    if str(path) == "default":
        return default_scenario()
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"{p}: cannot read scenario ({exc.strerror})") from None
    return parse_scenario(_load_yaml(text, str(p)), str(p))


def default_scenario() -> Scenario:
    return parse_scenario({}, "default scenario")


def dump_scenario(scenario: Scenario) -> str:
    return yaml.safe_dump(scenario.to_dict(), sort_keys=False)
