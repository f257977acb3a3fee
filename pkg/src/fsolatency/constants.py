"""Physical constants shared across modules (km, s, ms units)."""

EARTH_RADIUS_KM = 6378.14
EARTH_MU_KM3_S2 = 398600.4418
EARTH_ROTATION_RAD_S = 7.2921159e-5

SPEED_OF_LIGHT_KM_S = 299792.458
SPEED_OF_LIGHT_KM_MS = SPEED_OF_LIGHT_KM_S / 1000.0

# lowest tangent altitude an inter-satellite beam may graze
DEFAULT_GRAZING_ALTITUDE_KM = 80.0
