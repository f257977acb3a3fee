"""Required optical transmit power for inter-satellite links and ground links.

Transmit power is the received power requirement divided by the product of
optics efficiencies, gains, pointing losses, atmospheric loss (ground links
only) and free-space path loss::

    P_T = P_R / (eta_T eta_R G_T G_R L_T L_R [L_A] L_P)

Lengths are km at the public surface, powers W (dBm where named), angles
radians except elevations, which are degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

LinkKind = Literal["isl", "updown"]


@dataclass(frozen=True)
class OpticalParams:
    wavelength_nm: float = 1550.0
    eta_t: float = 0.8
    eta_r: float = 0.8
    divergence_full_angle_rad: float = 1.5e-6
    receiver_diameter_mm: float = 80.0
    point_err_tx_rad: float = 1e-6
    point_err_rx_rad: float = 1e-6
    rx_sensitivity_dbm: float = -35.5
    link_margin_isl_db: float = 3.0
    link_margin_updown_db: float = 6.0
    data_rate_gbps: float = 10.0
    bit_error_rate: float = 1e-12  # metadata only

    def __post_init__(self):
        for name in ("eta_t", "eta_r"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"{name} must be in (0, 1], got {v}")
        for name in ("divergence_full_angle_rad", "receiver_diameter_mm", "wavelength_nm"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("point_err_tx_rad", "point_err_rx_rad"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class AtmosphereParams:
    cloud_number_concentration: float = 0.5  # cm^-3
    liquid_water_content: float = 3.128e-4  # g/m^3
    particle_size_coeff: float = 1.6
    tropopause_height_km: float = 20.0
    site_altitude_km: float = 0.1

    def __post_init__(self):
        for name in ("cloud_number_concentration", "liquid_water_content", "particle_size_coeff",
                     "tropopause_height_km"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.site_altitude_km < 0:
            raise ValueError("site_altitude_km must be >= 0")
        if self.tropopause_height_km <= self.site_altitude_km:
            raise ValueError("tropopause must lie above the ground site")


DEFAULT_OPTICS = OpticalParams()
DEFAULT_ATMOSPHERE = AtmosphereParams()


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts) + 30.0


def transmitter_gain(params: OpticalParams = DEFAULT_OPTICS) -> float:
    return 16.0 / params.divergence_full_angle_rad**2


def receiver_gain(params: OpticalParams = DEFAULT_OPTICS) -> float:
    diameter_m = params.receiver_diameter_mm * 1e-3
    wavelength_m = params.wavelength_nm * 1e-9
    return (diameter_m * math.pi / wavelength_m) ** 2


def pointing_loss(gain: float, point_err_rad: float) -> float:
    if gain < 0:
        raise ValueError("gain must be >= 0")
    return math.exp(-gain * point_err_rad**2)


def free_space_path_loss(wavelength_nm: float, distance_km):
    """(lambda / 4 pi d)^2; accepts a scalar or an array of distances."""
    d = np.asarray(distance_km, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    loss = (wavelength_nm * 1e-9 / (4.0 * math.pi * d * 1e3)) ** 2
    return float(loss) if loss.ndim == 0 else loss


def received_power_w(sensitivity_dbm: float, link_margin_db: float) -> float:
    """Required received power: sensitivity raised by the link margin (dB add)."""
    return dbm_to_watts(sensitivity_dbm + link_margin_db)


def _terminal_product(params: OpticalParams) -> float:
    gt = transmitter_gain(params)
    gr = receiver_gain(params)
    lt = pointing_loss(gt, params.point_err_tx_rad)
    lr = pointing_loss(gr, params.point_err_rx_rad)
    return params.eta_t * params.eta_r * gt * gr * lt * lr


def isl_transmit_power_w(params: OpticalParams, distance_km):
    pr = received_power_w(params.rx_sensitivity_dbm, params.link_margin_isl_db)
    return pr / (_terminal_product(params) * free_space_path_loss(params.wavelength_nm, distance_km))


# ---- atmosphere ----------------------------------------------------------

def mie_coefficients(wavelength_um: float) -> tuple[float, float, float, float]:
    """Empirical cubic coefficients (a, b, c, d); wavelength in micrometres."""
    lam = wavelength_um
    a = -0.000545 * lam**2 + 0.002 * lam - 0.0038
    b = 0.00628 * lam**2 - 0.0232 * lam + 0.00439
    c = -0.028 * lam**2 + 0.101 * lam - 0.18
    d = -0.228 * lam**3 + 0.922 * lam**2 - 1.26 * lam + 0.719
    return a, b, c, d


def mie_extinction_ratio(wavelength_um: float, site_altitude_km: float) -> float:
    a, b, c, d = mie_coefficients(wavelength_um)
    h = site_altitude_km
    return a * h**3 + b * h**2 + c * h + d


def _csc_elevation(elevation_deg):
    el = np.asarray(elevation_deg, dtype=float)
    if np.any(el <= 0) or np.any(el > 90):
        raise ValueError("elevation must lie in (0, 90] degrees")
    return 1.0 / np.sin(np.radians(el))


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def mie_loss(rho: float, elevation_deg):
    return _scalar(np.exp(-rho * _csc_elevation(elevation_deg)))


def visibility_km(atm: AtmosphereParams = DEFAULT_ATMOSPHERE) -> float:
    product = atm.liquid_water_content * atm.cloud_number_concentration
    if product <= 0:
        raise ValueError("liquid water content x number concentration must be positive")
    return 1.002 / product**0.6473


def attenuation_coeff_per_km(visibility: float, wavelength_nm: float, particle_size_coeff: float) -> float:
    if visibility <= 0:
        raise ValueError("visibility must be positive")
    return (3.91 / visibility) * (wavelength_nm / 550.0) ** (-particle_size_coeff)


def geometric_loss(theta_a: float, atm: AtmosphereParams, elevation_deg):
    path_km = (atm.tropopause_height_km - atm.site_altitude_km) * _csc_elevation(elevation_deg)
    return _scalar(np.exp(-theta_a * path_km))


def atmospheric_loss(params: OpticalParams, atm: AtmosphereParams, elevation_deg):
    rho = mie_extinction_ratio(params.wavelength_nm * 1e-3, atm.site_altitude_km)
    theta_a = attenuation_coeff_per_km(visibility_km(atm), params.wavelength_nm, atm.particle_size_coeff)
    return mie_loss(rho, elevation_deg) * geometric_loss(theta_a, atm, elevation_deg)


def updown_transmit_power_w(params: OpticalParams, atm: AtmosphereParams, distance_km, elevation_deg):
    """Ground<->satellite transmit power; the same chain serves uplink and downlink."""
    pr = received_power_w(params.rx_sensitivity_dbm, params.link_margin_updown_db)
    la = atmospheric_loss(params, atm, elevation_deg)
    lp = free_space_path_loss(params.wavelength_nm, distance_km)
    return pr / (_terminal_product(params) * la * lp)


def transmit_power_w(kind: LinkKind, distance_km, params: OpticalParams = DEFAULT_OPTICS,
                     atm: AtmosphereParams = DEFAULT_ATMOSPHERE, elevation_deg=None):
    if kind == "isl":
        return isl_transmit_power_w(params, distance_km)
    if kind == "updown":
        if elevation_deg is None:
            raise ValueError("ground links need an elevation angle")
        return updown_transmit_power_w(params, atm, distance_km, elevation_deg)
    raise ValueError(f"unknown link kind {kind!r}")


def max_link_distance_km(power_limit_w: float, kind: LinkKind = "isl",
                         params: OpticalParams = DEFAULT_OPTICS,
                         atm: AtmosphereParams = DEFAULT_ATMOSPHERE,
                         elevation_deg: float | None = None) -> float:
    """Longest link whose required transmit power stays within ``power_limit_w``.

    Power scales with distance squared at fixed elevation, so the inversion is
    closed-form. Ground links are evaluated at a fixed ``elevation_deg``.
    """
    if not power_limit_w > 0:
        raise ValueError(f"power limit must be positive, got {power_limit_w}")
    per_km2 = transmit_power_w(kind, 1.0, params, atm, elevation_deg)
    if not math.isfinite(per_km2) or per_km2 <= 0:
        raise ValueError("no positive distance satisfies the power limit")
    return math.sqrt(power_limit_w / per_km2)
