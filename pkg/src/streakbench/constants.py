"""Shared physical constants (km, s)."""

MU_EARTH_KM3_S2 = 398600.4418
EARTH_RADIUS_KM = 6378.137
AU_KM = 149_597_870.7
