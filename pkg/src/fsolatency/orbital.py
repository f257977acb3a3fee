"""Walker-delta constellation propagation and ground-station geometry.

Earth is a sphere of radius ``EARTH_RADIUS_KM``; orbits are circular and
unperturbed. Positions are returned in an Earth-centred Earth-fixed frame
(km) whose x axis points at latitude 0, longitude 0 and whose z axis is
the rotation axis. At clock time zero the inertial and Earth-fixed frames
coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .constants import (
    DEFAULT_GRAZING_ALTITUDE_KM,
    EARTH_MU_KM3_S2,
    EARTH_RADIUS_KM,
    EARTH_ROTATION_RAD_S,
)


@dataclass(frozen=True)
class ConstellationSpec:
    """Walker delta ``i:T/P/F`` shell.

    The default is the 53:1584/22/17 shell at 550 km.
    """

    plane_count: int = 22
    sats_per_plane: int = 72
    inclination_deg: float = 53.0
    altitude_km: float = 550.0
    phasing_factor: int = 17
    epoch_offset_s: float = 0.0
    raan_reference_deg: float = 0.0

    def __post_init__(self):
        if self.plane_count < 1:
            raise ValueError(f"plane_count must be >= 1, got {self.plane_count}")
        if self.sats_per_plane < 1:
            raise ValueError(f"sats_per_plane must be >= 1, got {self.sats_per_plane}")
        if not 0 <= self.phasing_factor < self.sats_per_plane:
            raise ValueError(
                f"phasing_factor must lie in [0, {self.sats_per_plane}), got {self.phasing_factor}"
            )
        if self.altitude_km <= 0:
            raise ValueError(f"altitude_km must be positive, got {self.altitude_km}")

    @property
    def total(self) -> int:
        return self.plane_count * self.sats_per_plane

    @property
    def semi_major_axis_km(self) -> float:
        return EARTH_RADIUS_KM + self.altitude_km

    @property
    def period_s(self) -> float:
        return orbital_period_s(self.semi_major_axis_km)

    def satellite_ids(self) -> list["SatelliteId"]:
        """All satellites in plane-major order (the row order of propagated arrays)."""
        return [SatelliteId(p, s) for p in range(self.plane_count) for s in range(self.sats_per_plane)]

    def __str__(self):
        return (
            f"{self.inclination_deg:g}:{self.total}/{self.plane_count}/{self.phasing_factor}"
            f" @ {self.altitude_km:g} km"
        )


@dataclass(frozen=True, order=True)
class SatelliteId:
    plane: int
    slot: int

    def index(self, spec: ConstellationSpec) -> int:
        if not (0 <= self.plane < spec.plane_count and 0 <= self.slot < spec.sats_per_plane):
            raise IndexError(f"{self} outside {spec}")
        return self.plane * spec.sats_per_plane + self.slot

    @property
    def label(self) -> str:
        return f"SAT-{self.plane:02d}-{self.slot:02d}"

    def __str__(self):
        return self.label


@dataclass(frozen=True)
class GroundSite:
    name: str
    latitude_deg: float
    longitude_deg: float
    altitude_km: float = 0.1
    max_slant_range_km: float = 1123.0

    def __post_init__(self):
        if not self.name:
            raise ValueError("ground site needs a name")
        if abs(self.latitude_deg) > 90:
            raise ValueError(f"{self.name}: |latitude| must be <= 90, got {self.latitude_deg}")
        if self.altitude_km < 0:
            raise ValueError(f"{self.name}: altitude_km must be >= 0, got {self.altitude_km}")
        if self.max_slant_range_km <= 0:
            raise ValueError(f"{self.name}: max_slant_range_km must be positive")
        object.__setattr__(self, "longitude_deg", normalize_longitude(self.longitude_deg))


def normalize_longitude(lon_deg: float) -> float:
    """Wrap a longitude into (-180, 180]."""
    lon = math.fmod(lon_deg, 360.0)
    if lon <= -180.0:
        lon += 360.0
    elif lon > 180.0:
        lon -= 360.0
    return lon


def orbital_period_s(semi_major_axis_km: float) -> float:
    return 2.0 * math.pi * math.sqrt(semi_major_axis_km**3 / EARTH_MU_KM3_S2)


def _orbit_angles(spec: ConstellationSpec, t: float) -> tuple[np.ndarray, np.ndarray]:
    """RAAN and argument of latitude (radians), both shaped (total,)."""
    planes = np.repeat(np.arange(spec.plane_count), spec.sats_per_plane)
    slots = np.tile(np.arange(spec.sats_per_plane), spec.plane_count)
    raan = np.deg2rad(spec.raan_reference_deg + planes * (360.0 / spec.plane_count))
    # Walker delta: adjacent planes are offset in-plane by F * 360 / T
    u0 = slots * (360.0 / spec.sats_per_plane) + planes * (spec.phasing_factor * 360.0 / spec.total)
    mean_motion = 2.0 * math.pi / spec.period_s
    u = np.deg2rad(u0) + mean_motion * (t + spec.epoch_offset_s)
    return raan, u


def propagate_inertial(spec: ConstellationSpec, t: float) -> np.ndarray:
    """Inertial positions (km), shape (total, 3), plane-major rows."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    raan, u = _orbit_angles(spec, t)
    inc = math.radians(spec.inclination_deg)
    a = spec.semi_major_axis_km
    cos_u, sin_u = np.cos(u), np.sin(u)
    cos_o, sin_o = np.cos(raan), np.sin(raan)
    out = np.empty((spec.total, 3))
    out[:, 0] = a * (cos_o * cos_u - sin_o * sin_u * math.cos(inc))
    out[:, 1] = a * (sin_o * cos_u + cos_o * sin_u * math.cos(inc))
    out[:, 2] = a * sin_u * math.sin(inc)
    return out


def earth_rotation_angle(t: float, epoch_offset_s: float = 0.0) -> float:
    return EARTH_ROTATION_RAD_S * (t + epoch_offset_s)


def inertial_to_ecef(positions: np.ndarray, angle_rad: float) -> np.ndarray:
    c, s = math.cos(angle_rad), math.sin(angle_rad)
    rot = np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])
    return positions @ rot.T


def propagate_constellation(spec: ConstellationSpec, t: float) -> np.ndarray:
    """Earth-fixed positions (km) of every satellite at clock time ``t`` seconds.

    Row ``k`` belongs to ``spec.satellite_ids()[k]``.
    """
    eci = propagate_inertial(spec, t)
    return inertial_to_ecef(eci, earth_rotation_angle(t, spec.epoch_offset_s))


def ground_to_ecef(site: GroundSite) -> np.ndarray:
    r = EARTH_RADIUS_KM + site.altitude_km
    lat = math.radians(site.latitude_deg)
    lon = math.radians(site.longitude_deg)
    return np.array([r * math.cos(lat) * math.cos(lon), r * math.cos(lat) * math.sin(lon), r * math.sin(lat)])


def slant_range_km(a, b) -> float:
    return float(np.linalg.norm(np.asarray(b, dtype=float) - np.asarray(a, dtype=float)))


def elevation_angle_deg(site: GroundSite | np.ndarray, sat) -> float:
    """Signed elevation of ``sat`` above the local horizontal plane at ``site``."""
    site_pos = ground_to_ecef(site) if isinstance(site, GroundSite) else np.asarray(site, dtype=float)
    los = np.asarray(sat, dtype=float) - site_pos
    dist = np.linalg.norm(los)
    if dist == 0.0:
        raise ValueError("satellite position coincides with the ground site")
    up = site_pos / np.linalg.norm(site_pos)
    sin_el = float(np.clip(np.dot(up, los) / dist, -1.0, 1.0))
    return math.degrees(math.asin(sin_el))


def elevation_angles_deg(site_pos: np.ndarray, sats: np.ndarray) -> np.ndarray:
    """Vectorised :func:`elevation_angle_deg` for an (n, 3) array of satellites."""
    los = np.asarray(sats, dtype=float) - site_pos
    dist = np.linalg.norm(los, axis=-1)
    up = site_pos / np.linalg.norm(site_pos)
    with np.errstate(invalid="ignore", divide="ignore"):
        sin_el = np.clip(los @ up / dist, -1.0, 1.0)
    return np.degrees(np.arcsin(sin_el))


def max_feasible_lisl_range_km(
    altitude_km: float, grazing_altitude_km: float = DEFAULT_GRAZING_ALTITUDE_KM
) -> float:
    """Longest chord between two satellites at ``altitude_km`` that stays above
    ``grazing_altitude_km``. 550 km / 80 km gives ~5016.6 km.
    """
    if grazing_altitude_km < 0:
        raise ValueError("grazing altitude must be >= 0")
    if altitude_km < grazing_altitude_km:
        raise ValueError(
            f"altitude {altitude_km} km is below the grazing altitude {grazing_altitude_km} km"
        )
    r_sat = EARTH_RADIUS_KM + altitude_km
    r_graze = EARTH_RADIUS_KM + grazing_altitude_km
    return 2.0 * math.sqrt(r_sat**2 - r_graze**2)


def central_angle_deg(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    cos_ang = np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b))
    return math.degrees(math.acos(float(np.clip(cos_ang, -1.0, 1.0))))


def great_circle_km(site_a: GroundSite, site_b: GroundSite) -> float:
    """Surface distance between two sites on the spherical Earth."""
    return math.radians(central_angle_deg(ground_to_ecef(site_a), ground_to_ecef(site_b))) * EARTH_RADIUS_KM


def iter_slot_times(slot_count: int, interval_s: float, start_s: float = 0.0) -> Iterator[float]:
    for k in range(slot_count):
        yield start_s + k * interval_s
